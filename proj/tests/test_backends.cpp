#include <doctest.h>

#include <stdexcept>

#include "mka/backends.hpp"
#include "mka/similarity.hpp"

using namespace mka;
using namespace mka::backends;

TEST_CASE("translate short-circuits identity language pairs") {
    // Fallback::error would throw on any real backend call, so a successful
    // identity translation proves the backend was never consulted.
    MockTranslator strict({}, MockTranslator::Fallback::error);
    CHECK_EQ(strict.translate("unchanged text", "eng_Latn", "eng_Latn"), "unchanged text");
    CHECK_THROWS_AS(strict.translate("text", "eng_Latn", "deu_Latn"), TransportError);
}

TEST_CASE("mock translator applies first matching rule") {
    MockTranslator mock({
        {"hello", "eng_Latn", "deu_Latn", "hallo"},
        {"hello", "eng_Latn", "*", "generic"},
        {"*", "*", "fra_Latn", "*"},  // echo into French
    });
    CHECK_EQ(mock.translate("hello", "eng_Latn", "deu_Latn"), "hallo");
    CHECK_EQ(mock.translate("hello", "eng_Latn", "spa_Latn"), "generic");
    CHECK_EQ(mock.translate("anything", "eng_Latn", "fra_Latn"), "anything");
    // unmatched -> suffix fallback
    CHECK_EQ(mock.translate("other", "eng_Latn", "zho_Hans"), "other#zho_Hans");
}

TEST_CASE("mock translator handles multi-line payloads per line") {
    MockTranslator mock({{"one", "e", "d", "eins"}, {"two", "e", "d", "zwei"}});
    CHECK_EQ(mock.translate("one\n|||\ntwo", "e", "d"), "eins\n|||\nzwei");
    // separator lines and blank lines pass through verbatim
    CHECK_EQ(mock.translate("one\n\ntwo", "e", "d"), "eins\n\nzwei");
}

TEST_CASE("mock translator rejects configured-unsupported codes fatally") {
    MockTranslator mock;
    mock.set_unsupported({"xx_None"});
    CHECK_THROWS_AS(mock.translate("text", "eng_Latn", "xx_None"), ConfigurationError);
    CHECK_THROWS_AS(mock.translate("text", "xx_None", "eng_Latn"), ConfigurationError);
}

TEST_CASE("chat rejects empty prompts before reaching the backend") {
    MockChat mock({}, MockChat::Fallback::fixed, "resp");
    CHECK_THROWS_AS(mock.chat(""), std::invalid_argument);
    CHECK_EQ(mock.chat("hi"), "resp");
}

TEST_CASE("empty generations surface as EmptyResponseError") {
    MockChat mock({}, MockChat::Fallback::empty);
    CHECK_THROWS_AS(mock.chat("prompt"), EmptyResponseError);
}

TEST_CASE("mock chat rules match on prompt substrings in order") {
    MockChat mock({{"red planet", "Mars"}, {"planet", "Venus"}}, MockChat::Fallback::fail);
    CHECK_EQ(mock.chat("about the red planet please"), "Mars");
    CHECK_EQ(mock.chat("some other planet"), "Venus");
    CHECK_THROWS_AS(mock.chat("no rule applies"), TransportError);
}

TEST_CASE("mock chat first_choice fallback picks the first enumerated option") {
    MockChat mock({}, MockChat::Fallback::first_choice);
    CHECK_EQ(mock.chat("Q?\nOptions: alpha, beta, gamma\nAnswer now."), "alpha");
    CHECK_EQ(mock.chat("Q?\nOptions: single\n"), "single");
}

TEST_CASE("embed validates input and output") {
    auto mock = MockEmbedder::hashed(16);
    CHECK_THROWS_AS(mock->embed(""), std::invalid_argument);
    CHECK_THROWS_AS(mock->embed("   "), std::invalid_argument);
    CHECK_EQ(mock->embed("text").dimension(), 16);
}

TEST_CASE("embedding dimension drift is a fatal configuration error") {
    struct DriftingEmbedder : EmbeddingBackend {
        int calls = 0;
        std::string identity() const override { return "drifting"; }
        calibration::Embedding embed_impl(const std::string&) override {
            ++calls;
            return {std::vector<double>(static_cast<std::size_t>(calls == 1 ? 4 : 8), 1.0)};
        }
    };
    DriftingEmbedder drift;
    CHECK_EQ(drift.embed("first").dimension(), 4);
    CHECK_THROWS_AS(drift.embed("second"), ConfigurationError);
}

TEST_CASE("non-finite embedding values are rejected") {
    struct BadEmbedder : EmbeddingBackend {
        std::string identity() const override { return "bad"; }
        calibration::Embedding embed_impl(const std::string&) override {
            return {{1.0, std::numeric_limits<double>::quiet_NaN()}};
        }
    };
    BadEmbedder bad;
    CHECK_THROWS_AS(bad.embed("text"), BackendError);
}

TEST_CASE("hashed mock embedder is a pure function of normalized text") {
    auto mock = MockEmbedder::hashed(32);
    const auto a1 = mock->embed("Some Answer");
    const auto a2 = mock->embed("some answer  ");  // same after normalization
    CHECK(a1.values == a2.values);

    const auto b = mock->embed("different");
    CHECK(a1.values != b.values);

    // A fresh instance produces identical vectors: no hidden state.
    auto fresh = MockEmbedder::hashed(32);
    CHECK(fresh->embed("Some Answer").values == a1.values);
}

TEST_CASE("orthogonal mock embedder gives distinct texts orthogonal vectors") {
    auto mock = MockEmbedder::orthogonal(4);
    const auto a = mock->embed("first");
    const auto b = mock->embed("second");
    const auto a_again = mock->embed("first");
    CHECK_EQ(similarity::cosine(a.values, b.values), 0.0);
    CHECK(a.values == a_again.values);
}

TEST_CASE("orthogonal mock embedder exhausts its basis loudly") {
    auto mock = MockEmbedder::orthogonal(2);
    mock->embed("a");
    mock->embed("b");
    CHECK_THROWS_AS(mock->embed("c"), ConfigurationError);
}

TEST_CASE("prefix_hash embedder keys on the normalized prefix") {
    auto mock = MockEmbedder::prefix_hash(16, 4);
    const auto a = mock->embed("abcdXYZ");
    const auto b = mock->embed("ABCD other tail");
    const auto c = mock->embed("abce");
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
}

TEST_CASE("anchor_table embedder realizes prescribed cosines") {
    auto mock = MockEmbedder::anchor_table("the cortex", {{"cortex", 0.956}, {"[crust]", 0.185}});
    const auto anchor = mock->embed("the cortex");
    CHECK_EQ(similarity::cosine(anchor.values, mock->embed("cortex").values),
             doctest::Approx(0.956).epsilon(1e-12));
    CHECK_EQ(similarity::cosine(anchor.values, mock->embed("[crust]").values),
             doctest::Approx(0.185).epsilon(1e-12));
    CHECK_THROWS_AS(mock->embed("unknown text"), ConfigurationError);
}

TEST_CASE("backoff schedule is linear and non-decreasing") {
    using std::chrono::milliseconds;
    CHECK_EQ(backoff_delay(milliseconds(250), 0), milliseconds(250));
    CHECK_EQ(backoff_delay(milliseconds(250), 1), milliseconds(500));
    CHECK_EQ(backoff_delay(milliseconds(250), 2), milliseconds(750));
    CHECK_EQ(backoff_delay(milliseconds(250), -3), milliseconds(250));
}

TEST_CASE("content hashes are stable across calls") {
    CHECK_EQ(fnv1a64("abc"), fnv1a64("abc"));
    CHECK_NE(fnv1a64("abc"), fnv1a64("abd"));
    std::uint64_t s1 = 42, s2 = 42;
    CHECK_EQ(splitmix64(s1), splitmix64(s2));
    CHECK_EQ(s1, s2);
}

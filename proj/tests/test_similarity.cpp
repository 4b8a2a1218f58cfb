#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "mka/similarity.hpp"

using namespace mka;
using similarity::NgramVector;

TEST_CASE("ngram_vector counts sliding windows with multiplicity") {
    const auto v = similarity::ngram_vector("abab", 2);
    REQUIRE_EQ(v.entries.size(), 2);
    CHECK_EQ(v.entries.at("ab"), 2.0);
    CHECK_EQ(v.entries.at("ba"), 1.0);

    const auto w = similarity::ngram_vector("banana", 3);
    CHECK_EQ(w.entries.at("ana"), 2.0);
    CHECK_EQ(w.entries.at("ban"), 1.0);
    CHECK_EQ(w.entries.at("nan"), 1.0);
    CHECK_EQ(w.entries.size(), 3);
}

TEST_CASE("ngram_vector falls back to a whole-text feature for short input") {
    const auto v = similarity::ngram_vector("ab", 3);
    REQUIRE_EQ(v.entries.size(), 1);
    CHECK_EQ(v.entries.at("ab"), 1.0);
}

TEST_CASE("ngram_vector normalizes before feature extraction") {
    const auto upper = similarity::ngram_vector("  AbAb ", 2);
    const auto lower = similarity::ngram_vector("abab", 2);
    CHECK(upper.entries == lower.entries);
}

TEST_CASE("ngram_vector of empty or blank text is empty") {
    CHECK(similarity::ngram_vector("", 3).empty());
    CHECK(similarity::ngram_vector("   \t", 3).empty());
}

TEST_CASE("ngram_vector operates on code points, not bytes") {
    // Two CJK characters: exactly one 2-gram window.
    const auto v = similarity::ngram_vector("\xE6\xB1\x89\xE5\xAD\x97", 2);
    REQUIRE_EQ(v.entries.size(), 1);
    CHECK_EQ(v.entries.begin()->second, 1.0);
}

TEST_CASE("ngram_vector rejects a non-positive window") {
    CHECK_THROWS_AS(similarity::ngram_vector("abc", 0), std::invalid_argument);
    CHECK_THROWS_AS(similarity::ngram_vector("abc", -2), std::invalid_argument);
}

TEST_CASE("sparse cosine matches a hand-computed value") {
    NgramVector u;
    u.entries = {{"a", 1.0}, {"b", 1.0}};
    NgramVector v;
    v.entries = {{"a", 1.0}, {"c", 1.0}};
    // 1 / (sqrt(2)*sqrt(2)); the norms are irrational, so allow rounding
    CHECK_EQ(similarity::cosine(u, v), doctest::Approx(0.5).epsilon(1e-12));

    NgramVector zero;
    CHECK_EQ(similarity::cosine(u, zero), 0.0);
    CHECK_EQ(similarity::cosine(zero, zero), 0.0);

    CHECK_EQ(similarity::cosine(u, u), doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dense cosine on spans") {
    const std::vector<double> a{1.0, 0.0};
    const std::vector<double> b{0.0, 1.0};
    const std::vector<double> c{2.0, 0.0};
    CHECK_EQ(similarity::cosine(std::span<const double>(a), std::span<const double>(b)), 0.0);
    CHECK_EQ(similarity::cosine(std::span<const double>(a), std::span<const double>(c)),
             doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<double> d{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(similarity::cosine(std::span<const double>(a), std::span<const double>(d)),
                    std::invalid_argument);
}

TEST_CASE("centroid_poll picks the majority answer and breaks ties low") {
    const auto majority = similarity::centroid_poll({"a", "a", "b"}, 3);
    CHECK_EQ(majority.index, 0);
    CHECK_EQ(majority.answer, "a");
    CHECK_EQ(majority.mean_similarity, 2.0 / 3.0);

    // Symmetric pair: both means equal, smallest index wins.
    const auto tie = similarity::centroid_poll({"xx", "yy"}, 2);
    CHECK_EQ(tie.index, 0);
    CHECK_EQ(tie.answer, "xx");

    const auto single = similarity::centroid_poll({"only"}, 3);
    CHECK_EQ(single.index, 0);
    CHECK_EQ(single.mean_similarity, doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(similarity::centroid_poll({}, 3), std::invalid_argument);
}

TEST_CASE("centroid_poll keeps the original text of the selected answer") {
    // Case differences vanish in the feature space but the returned answer is
    // the verbatim input at the winning index.
    const auto poll = similarity::centroid_poll({"The Cortex", "the cortex", "crust"}, 3);
    CHECK_EQ(poll.index, 0);
    CHECK_EQ(poll.answer, "The Cortex");
}

namespace {

// Independent O(n^2) re-derivation of the polling rule: mean similarity over
// all pairs (self included), argmax with smallest-index tie-break.
std::size_t brute_force_argmax(const std::vector<std::string>& answers, int n) {
    std::vector<similarity::NgramVector> vectors;
    vectors.reserve(answers.size());
    for (const auto& a : answers) vectors.push_back(similarity::ngram_vector(a, n));

    std::size_t best = 0;
    double best_mean = -1.0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < vectors.size(); ++j) {
            sum += similarity::cosine(vectors[i], vectors[j]);
        }
        const double mean = sum / static_cast<double>(vectors.size());
        if (mean > best_mean) {
            best_mean = mean;
            best = i;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("centroid_poll matches the brute-force oracle on random inputs") {
    std::mt19937_64 rng(20240813);
    std::uniform_int_distribution<int> list_len(2, 8);
    std::uniform_int_distribution<int> str_len(0, 12);
    std::uniform_int_distribution<int> letter(0, 5);

    for (int trial = 0; trial < 1200; ++trial) {
        std::vector<std::string> answers(static_cast<std::size_t>(list_len(rng)));
        for (auto& a : answers) {
            const int len = str_len(rng);
            for (int k = 0; k < len; ++k) a.push_back(static_cast<char>('a' + letter(rng)));
        }
        const auto poll = similarity::centroid_poll(answers, 3);
        const auto expected = brute_force_argmax(answers, 3);
        REQUIRE_EQ(poll.index, expected);
        REQUIRE_EQ(poll.answer, answers[expected]);
    }
}

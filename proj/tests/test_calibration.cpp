#include <doctest.h>

#include <random>
#include <stdexcept>

#include "mka/calibration.hpp"

using namespace mka;
using calibration::Embedding;

TEST_CASE("similarities computes cosine against each other answer in order") {
    const Embedding selected{{1.0, 0.0, 0.0}};
    const std::vector<Embedding> others{
        {{1.0, 0.0, 0.0}},   // identical
        {{0.0, 1.0, 0.0}},   // orthogonal
        {{-1.0, 0.0, 0.0}},  // opposite
    };
    const auto sims = calibration::similarities(selected, others);
    REQUIRE_EQ(sims.size(), 3);
    CHECK_EQ(sims[0], doctest::Approx(1.0).epsilon(1e-12));
    CHECK_EQ(sims[1], 0.0);
    CHECK_EQ(sims[2], doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("similarities rejects dimension mismatches") {
    const Embedding selected{{1.0, 0.0}};
    const std::vector<Embedding> others{{{1.0, 0.0, 0.0}}};
    CHECK_THROWS_AS(calibration::similarities(selected, others), std::invalid_argument);
}

TEST_CASE("confidence replays the published worked example") {
    // Similarities of the five other answers to the selected one; three are
    // near-duplicates and get the 1.5 boost, so the raw mean exceeds 1 and
    // the reported confidence clamps to exactly 1.
    const std::vector<double> sims{1.0, 0.496, 0.185, 1.0, 1.0};
    const auto conf = calibration::confidence_from_sims(sims, 0.8, 1.5);
    CHECK_EQ(conf.raw, doctest::Approx(1.0362).epsilon(1e-12));
    CHECK_EQ(conf.clamped, 1.0);
}

TEST_CASE("boost applies strictly above the threshold") {
    const auto at = calibration::confidence_from_sims(std::vector<double>{0.8}, 0.8, 1.5);
    CHECK_EQ(at.raw, 0.8);  // not boosted at equality

    const auto above = calibration::confidence_from_sims(std::vector<double>{0.81}, 0.8, 1.5);
    CHECK_EQ(above.raw, doctest::Approx(1.215).epsilon(1e-12));
}

TEST_CASE("confidence of an empty similarity list is zero") {
    const auto conf = calibration::confidence_from_sims({}, 0.8, 1.5);
    CHECK_EQ(conf.raw, 0.0);
    CHECK_EQ(conf.clamped, 0.0);
}

TEST_CASE("clamping bounds confidence to [0,1] from both sides") {
    const auto low = calibration::confidence_from_sims(std::vector<double>{-0.9, -0.7}, 0.8, 1.5);
    CHECK_EQ(low.raw, doctest::Approx(-0.8).epsilon(1e-12));
    CHECK_EQ(low.clamped, 0.0);

    const auto high = calibration::confidence_from_sims(std::vector<double>{1.0, 1.0}, 0.8, 1.5);
    CHECK_EQ(high.raw, doctest::Approx(1.5).epsilon(1e-12));
    CHECK_EQ(high.clamped, 1.0);
}

TEST_CASE("confidence validates its parameters") {
    const std::vector<double> sims{0.5};
    CHECK_THROWS_AS(calibration::confidence_from_sims(sims, -0.1, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(calibration::confidence_from_sims(sims, 1.1, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(calibration::confidence_from_sims(sims, 0.8, 0.99), std::invalid_argument);
}

TEST_CASE("with boost weight 1 confidence degenerates to the plain mean") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> sim(-1.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> sims(1 + static_cast<std::size_t>(rng() % 7));
        double sum = 0.0;
        for (auto& s : sims) {
            s = sim(rng);
            sum += s;
        }
        const double mean = sum / static_cast<double>(sims.size());
        const auto conf = calibration::confidence_from_sims(sims, 0.8, 1.0);
        REQUIRE_EQ(conf.raw, doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("confidence composes similarities and weighting end to end") {
    const Embedding selected{{1.0, 0.0}};
    const std::vector<Embedding> others{{{1.0, 0.0}}, {{0.0, 1.0}}};
    const auto conf = calibration::confidence(selected, others, 0.8, 1.5);
    // sims {1, 0} -> (1.5 + 0)/2
    CHECK_EQ(conf.raw, doctest::Approx(0.75).epsilon(1e-12));
    CHECK_EQ(conf.clamped, doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("decide answers at or above the cutoff and abstains below") {
    CHECK(calibration::decide(0.7, 0.7) == Decision::Answer);
    CHECK(calibration::decide(0.71, 0.7) == Decision::Answer);
    CHECK(calibration::decide(0.69, 0.7) == Decision::Abstain);
    CHECK(calibration::decide(1.0, 1.0) == Decision::Answer);
    CHECK(calibration::decide(0.0, 0.0) == Decision::Answer);
}

TEST_CASE("decide validates both inputs") {
    CHECK_THROWS_AS(calibration::decide(-0.1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(calibration::decide(1.1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(calibration::decide(0.5, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(calibration::decide(0.5, 1.1), std::invalid_argument);
}

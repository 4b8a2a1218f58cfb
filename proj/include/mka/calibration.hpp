#pragma once

#include <span>
#include <vector>

#include "mka/core_types.hpp"

namespace mka::calibration {

// Sentence embedding as returned by the backend; not re-normalized (cosine is
// scale-invariant).
struct Embedding {
    std::vector<double> values;

    std::size_t dimension() const { return values.size(); }
};

// Cosine of the selected answer's embedding against each other answer, in
// input order. Throws on dimension mismatch.
std::vector<double> similarities(const Embedding& selected, const std::vector<Embedding>& others);

struct Confidence {
    double raw = 0.0;
    double clamped = 0.0;  // min(max(raw, 0), 1)
};

// Similarity-weighted mean: terms above boost_threshold (strictly) are
// weighted by boost_weight, the rest by 1. Empty input yields 0.
Confidence confidence_from_sims(std::span<const double> sims, double boost_threshold, double boost_weight);

Confidence confidence(const Embedding& selected, const std::vector<Embedding>& others,
                      double boost_threshold, double boost_weight);

// Answer iff confidence >= cutoff; equality answers.
Decision decide(double confidence, double cutoff);

}  // namespace mka::calibration

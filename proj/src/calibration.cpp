#include "mka/calibration.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "mka/similarity.hpp"

namespace mka::calibration {

std::vector<double> similarities(const Embedding& selected, const std::vector<Embedding>& others) {
    std::vector<double> sims;
    sims.reserve(others.size());
    for (const auto& other : others) {
        if (other.dimension() != selected.dimension()) {
            throw std::invalid_argument("embedding dimension mismatch: " +
                                        std::to_string(selected.dimension()) + " vs " +
                                        std::to_string(other.dimension()));
        }
        sims.push_back(similarity::cosine(selected.values, other.values));
    }
    return sims;
}

Confidence confidence_from_sims(std::span<const double> sims, double boost_threshold, double boost_weight) {
    if (boost_threshold < 0.0 || boost_threshold > 1.0) {
        throw std::invalid_argument("boost_threshold must be in [0,1]");
    }
    if (boost_weight < 1.0) throw std::invalid_argument("boost_weight must be >= 1");
    if (sims.empty()) return {0.0, 0.0};

    double sum = 0.0;
    for (const double s : sims) {
        const double w = s > boost_threshold ? boost_weight : 1.0;
        sum += w * s;
    }
    const double raw = sum / static_cast<double>(sims.size());
    return {raw, std::min(std::max(raw, 0.0), 1.0)};
}

Confidence confidence(const Embedding& selected, const std::vector<Embedding>& others,
                      double boost_threshold, double boost_weight) {
    const std::vector<double> sims = similarities(selected, others);
    return confidence_from_sims(sims, boost_threshold, boost_weight);
}

Decision decide(double confidence, double cutoff) {
    if (confidence < 0.0 || confidence > 1.0) throw std::invalid_argument("confidence must be in [0,1]");
    if (cutoff < 0.0 || cutoff > 1.0) throw std::invalid_argument("cutoff must be in [0,1]");
    return confidence >= cutoff ? Decision::Answer : Decision::Abstain;
}

}  // namespace mka::calibration

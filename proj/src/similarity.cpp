#include "mka/similarity.hpp"

#include <cmath>
#include <stdexcept>

#include "mka/text.hpp"

namespace mka::similarity {

double NgramVector::total_count() const {
    double total = 0.0;
    for (const auto& [key, count] : entries) total += count;
    return total;
}

NgramVector ngram_vector(std::string_view text_in, int n) {
    if (n < 1) throw std::invalid_argument("ngram_vector: n must be >= 1");
    const std::vector<char32_t> cps = text::normalize(text_in);
    NgramVector v;
    if (cps.empty()) return v;
    const auto count = static_cast<std::size_t>(n);
    if (cps.size() < count) {
        v.entries[text::utf8_encode(cps)] = 1.0;
        return v;
    }
    for (std::size_t i = 0; i + count <= cps.size(); ++i) {
        v.entries[text::utf8_encode(cps.data() + i, count)] += 1.0;
    }
    return v;
}

namespace {

double norm(const NgramVector& v) {
    double sq = 0.0;
    for (const auto& [key, count] : v.entries) sq += count * count;
    return std::sqrt(sq);
}

}  // namespace

double cosine(const NgramVector& u, const NgramVector& v) {
    const NgramVector& small = u.entries.size() <= v.entries.size() ? u : v;
    const NgramVector& large = u.entries.size() <= v.entries.size() ? v : u;
    double dot = 0.0;
    for (const auto& [key, count] : small.entries) {
        const auto it = large.entries.find(key);
        if (it != large.entries.end()) dot += count * it->second;
    }
    const double nu = norm(u);
    const double nv = norm(v);
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return dot / (nu * nv);
}

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw std::invalid_argument("cosine: dimension mismatch");
    double dot = 0.0, uu = 0.0, vv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    if (uu == 0.0 || vv == 0.0) return 0.0;
    return dot / (std::sqrt(uu) * std::sqrt(vv));
}

PollResult centroid_poll(const std::vector<std::string>& answers, int n) {
    if (answers.empty()) throw std::invalid_argument("centroid_poll: no answers to poll");

    std::vector<NgramVector> vectors;
    vectors.reserve(answers.size());
    for (const auto& a : answers) vectors.push_back(ngram_vector(a, n));

    const std::size_t count = answers.size();
    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t i = 0; i < count; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < count; ++j) sum += cosine(vectors[i], vectors[j]);
        const double score = sum / static_cast<double>(count);
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return PollResult{best, answers[best], best_score};
}

}  // namespace mka::similarity

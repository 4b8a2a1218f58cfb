#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace mka::similarity {

// Sparse character n-gram count vector over normalized text.
// Ordered map: pairwise dot products accumulate in sorted-key order, so
// cosine scores are bit-reproducible run to run.
struct NgramVector {
    std::map<std::string, double> entries;

    bool empty() const { return entries.empty(); }
    double total_count() const;
};

// Counts all length-n code point windows of the normalized text.
// Texts shorter than n collapse to a single whole-text feature; empty or
// whitespace-only text yields an empty vector.
NgramVector ngram_vector(std::string_view text, int n);

// dot(u,v) / (|u||v|), 0 when either norm is 0.
double cosine(const NgramVector& u, const NgramVector& v);
double cosine(std::span<const double> u, std::span<const double> v);

struct PollResult {
    std::size_t index = 0;
    std::string answer;
    double mean_similarity = 0.0;
};

// Selects the answer with the highest average cosine similarity across all
// answers (self included). Ties go to the smallest index.
PollResult centroid_poll(const std::vector<std::string>& answers, int n);

}  // namespace mka::similarity

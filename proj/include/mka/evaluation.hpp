#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mka/backends.hpp"
#include "mka/core_types.hpp"
#include "mka/pipeline.hpp"

namespace mka::evaluation {

// Accuracy family over the A1-A4 confusion counts. Ratios whose denominator
// is zero are absent rather than zero: "no abstentions" is not the same claim
// as "every abstention was wrong".
struct MetricSet {
    std::optional<double> ac_abs;  // A2/(A1+A2): abstained items that were incorrect
    std::optional<double> ac_ans;  // A3/(A3+A4): answered items that were correct
    double ac_comp = 0.0;          // (A2+A3)/total
    double coverage = 0.0;         // (A3+A4)/total
    double ac_eff = 0.0;           // ac_comp * coverage
};

struct SweepRow {
    double cutoff = 0.0;
    ConfusionCounts counts;
    MetricSet metrics;
};

// True iff the answer matches the gold text semantically: exact string
// equality short-circuits, otherwise embedding cosine >= threshold. An empty
// answer is always wrong and never embedded.
bool judge(const std::string& model_answer, const std::string& gold_answer, double threshold,
           backends::EmbeddingBackend& embedder);

struct JudgeSummary {
    std::size_t judged = 0;
    std::size_t skipped = 0;  // embedding failures; excluded from metrics
    std::vector<std::string> warnings;
};

// Fills outcome.judged_correct on each result. Embedding failures leave the
// flag unset and add a warning instead of aborting the run.
JudgeSummary judge_all(std::vector<pipeline::ItemResult>& results, double threshold,
                       backends::EmbeddingBackend& embedder);

// Re-derives every decision from the stored confidence against the given
// cutoff, so a single inference run supports arbitrarily many cutoffs.
ConfusionCounts confusion(const std::vector<pipeline::ItemResult>& results, double cutoff);

MetricSet metrics(const ConfusionCounts& counts);

// {0.02, 0.04, ..., 1.00}: 50 cutoffs, with the degenerate 0 (which can never
// abstain under the >= decision rule) left out.
std::vector<double> default_cutoff_grid();

std::vector<SweepRow> sweep(const std::vector<pipeline::ItemResult>& results,
                            const std::vector<double>& cutoffs);

struct OptimalCutoff {
    double cutoff = 0.0;
    double mean_ac_eff = 0.0;
};

// Argmax of mean ac_eff across runs sharing one cutoff grid; ties resolve to
// the smallest cutoff.
OptimalCutoff optimal_cutoff(const std::vector<std::vector<SweepRow>>& per_run_sweeps);

struct CurvePoint {
    double coverage = 0.0;
    double ac_ans = 0.0;
};

// (coverage, answered-accuracy) per cutoff, for plotting; cutoffs where
// nothing was answered have no defined accuracy and are omitted.
std::vector<CurvePoint> accuracy_coverage_curve(const std::vector<pipeline::ItemResult>& results,
                                                const std::vector<double>& cutoffs);

}  // namespace mka::evaluation

#include "mka/evaluation.hpp"

#include <stdexcept>

#include "mka/calibration.hpp"
#include "mka/similarity.hpp"

namespace mka::evaluation {

bool judge(const std::string& model_answer, const std::string& gold_answer, double threshold,
           backends::EmbeddingBackend& embedder) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw std::invalid_argument("judge: threshold must lie in [0, 1]");
    }
    if (model_answer.empty()) return false;
    if (model_answer == gold_answer) return true;
    const auto a = embedder.embed(model_answer);
    const auto b = embedder.embed(gold_answer);
    return similarity::cosine(a.values, b.values) >= threshold;
}

JudgeSummary judge_all(std::vector<pipeline::ItemResult>& results, double threshold,
                       backends::EmbeddingBackend& embedder) {
    JudgeSummary summary;
    for (auto& result : results) {
        try {
            result.outcome.judged_correct =
                judge(result.outcome.selected_answer, result.item.gold_answer, threshold, embedder);
            ++summary.judged;
        } catch (const backends::ConfigurationError&) {
            throw;
        } catch (const backends::BackendError& e) {
            ++summary.skipped;
            summary.warnings.push_back("item " + result.item.id + ": judging skipped: " + e.what());
        }
    }
    return summary;
}

ConfusionCounts confusion(const std::vector<pipeline::ItemResult>& results, double cutoff) {
    ConfusionCounts counts;
    for (const auto& result : results) {
        if (!result.outcome.judged_correct.has_value()) {
            throw std::invalid_argument("confusion: unjudged result for item " + result.item.id);
        }
        const bool correct = *result.outcome.judged_correct;
        const Decision decision = calibration::decide(result.outcome.confidence, cutoff);
        if (decision == Decision::Abstain) {
            correct ? ++counts.a1 : ++counts.a2;
        } else {
            correct ? ++counts.a3 : ++counts.a4;
        }
    }
    return counts;
}

MetricSet metrics(const ConfusionCounts& counts) {
    const auto total = counts.total();
    if (total <= 0) throw std::invalid_argument("metrics: confusion counts are empty");

    MetricSet m;
    const double abstained = static_cast<double>(counts.a1 + counts.a2);
    const double answered = static_cast<double>(counts.a3 + counts.a4);
    if (abstained > 0) m.ac_abs = static_cast<double>(counts.a2) / abstained;
    if (answered > 0) m.ac_ans = static_cast<double>(counts.a3) / answered;
    m.ac_comp = static_cast<double>(counts.a2 + counts.a3) / static_cast<double>(total);
    m.coverage = answered / static_cast<double>(total);
    m.ac_eff = m.ac_comp * m.coverage;
    return m;
}

std::vector<double> default_cutoff_grid() {
    std::vector<double> grid;
    grid.reserve(50);
    // k/50.0 rather than k*0.02: the division is exact at the top of the
    // grid, so the 1.00 row really is 1.0 and equality-answers holds there.
    for (int k = 1; k <= 50; ++k) grid.push_back(k / 50.0);
    return grid;
}

std::vector<SweepRow> sweep(const std::vector<pipeline::ItemResult>& results,
                            const std::vector<double>& cutoffs) {
    if (results.empty()) throw std::invalid_argument("sweep: no results to sweep");
    if (cutoffs.empty()) throw std::invalid_argument("sweep: no cutoffs given");
    for (std::size_t i = 1; i < cutoffs.size(); ++i) {
        if (!(cutoffs[i] > cutoffs[i - 1])) {
            throw std::invalid_argument("sweep: cutoffs must be strictly increasing");
        }
    }

    std::vector<SweepRow> rows;
    rows.reserve(cutoffs.size());
    for (const double cutoff : cutoffs) {
        SweepRow row;
        row.cutoff = cutoff;
        row.counts = confusion(results, cutoff);
        row.metrics = metrics(row.counts);
        rows.push_back(std::move(row));
    }
    return rows;
}

OptimalCutoff optimal_cutoff(const std::vector<std::vector<SweepRow>>& per_run_sweeps) {
    if (per_run_sweeps.empty() || per_run_sweeps.front().empty()) {
        throw std::invalid_argument("optimal_cutoff: no sweep rows given");
    }
    const auto& first = per_run_sweeps.front();
    for (const auto& run : per_run_sweeps) {
        if (run.size() != first.size()) {
            throw std::invalid_argument("optimal_cutoff: cutoff grids differ across runs");
        }
        for (std::size_t i = 0; i < run.size(); ++i) {
            if (run[i].cutoff != first[i].cutoff) {
                throw std::invalid_argument("optimal_cutoff: cutoff grids differ across runs");
            }
        }
    }

    OptimalCutoff best;
    bool have_best = false;
    for (std::size_t i = 0; i < first.size(); ++i) {
        double sum = 0.0;
        for (const auto& run : per_run_sweeps) sum += run[i].metrics.ac_eff;
        const double mean = sum / static_cast<double>(per_run_sweeps.size());
        if (!have_best || mean > best.mean_ac_eff) {
            best.cutoff = first[i].cutoff;
            best.mean_ac_eff = mean;
            have_best = true;
        }
    }
    return best;
}

std::vector<CurvePoint> accuracy_coverage_curve(const std::vector<pipeline::ItemResult>& results,
                                                const std::vector<double>& cutoffs) {
    const auto rows = sweep(results, cutoffs);
    std::vector<CurvePoint> points;
    points.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.metrics.ac_ans.has_value()) {
            points.push_back(CurvePoint{row.metrics.coverage, *row.metrics.ac_ans});
        }
    }
    return points;
}

}  // namespace mka::evaluation

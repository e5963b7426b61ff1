#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "scarv/core.hpp"

namespace scarv {

/// Cross-run stability summary for one method.
struct StabilityReport {
    double mean_pairwise_spearman = 0.0;
    double topk_jaccard = 0.0;
    double bottomk_jaccard = 0.0;
    double subset_overlap = 0.0;
    double selection_gap = 0.0;          // filled by callers that have utilities
    std::vector<double> pair_spearman;   // one value per unordered ranking pair
};

/// Paired-comparison summary: mean delta, bootstrap CI, Wilcoxon p.
struct TestResult {
    double mean_delta = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;     // non-zero deltas used by the test
    bool exact = false;    // p from exact enumeration rather than normal approx
    bool degenerate = false;
};

enum class WilcoxonMode { Auto, Exact, Normal };

/// Pearson correlation of fractional ranks. Returns nullopt when undefined
/// (fewer than two values, or zero rank variance on either side); degenerate
/// inputs are never silently reported as 0.
std::optional<double> spearman(std::span<const double> a, std::span<const double> b);

/// Spearman between two rankings over the same id set (positions as ranks).
std::optional<double> spearman(const Ranking& a, const Ranking& b);

/// Mean Spearman over all unordered pairs of rankings. Throws ConfigError
/// with fewer than two rankings and DataError if any pair is degenerate.
double pairwise_stability(std::span<const Ranking> rankings);

enum class RankEnd { Top, Bottom };

/// Jaccard overlap of the two rankings' top-k (or bottom-k) id sets.
double topk_jaccard(const Ranking& a, const Ranking& b, std::size_t k, RankEnd end);

/// Mean pairwise Jaccard of the top-floor(budget*n) id sets.
double subset_overlap(std::span<const Ranking> rankings, double budget);

/// Cross-run spread of retained-subset utility: max - min.
double selection_gap(std::span<const double> utilities);

/// Mann-Whitney statistic P(score_pos > score_neg) + 0.5 * P(tie), computed
/// via fractional ranks. Needs at least one positive and one negative.
double auroc(std::span<const double> scores, const std::vector<bool>& positives);

/// Precision and recall over the k highest-scoring ids (callers pass
/// suspiciousness scores: higher = more suspicious). Ties break by id.
std::pair<double, double> precision_recall_at_k(std::span<const double> scores,
                                                std::span<const ExampleId> ids,
                                                const std::vector<bool>& positives,
                                                std::size_t k);

/// Seeded percentile bootstrap interval for the mean of `deltas`.
std::pair<double, double> paired_bootstrap_ci(std::span<const double> deltas,
                                              std::size_t resamples, double level,
                                              std::uint64_t seed);

/// Two-sided Wilcoxon signed-rank test. Zero deltas are dropped; exact
/// enumeration of all sign assignments for n <= 25 (via a rank-sum count
/// table), normal approximation with tie and continuity correction above.
/// All-zero input yields p = 1 with the degenerate flag set. The bootstrap
/// CI fields are not filled here; see paired_test.
TestResult wilcoxon_signed_rank(std::span<const double> deltas,
                                WilcoxonMode mode = WilcoxonMode::Auto);

/// Wilcoxon p plus percentile-bootstrap CI for the mean delta.
TestResult paired_test(std::span<const double> deltas, std::size_t resamples = 10000,
                       double level = 0.95, std::uint64_t seed = 0x7e577e57ULL);

/// Stability, local overlap and subset overlap for one set of rankings.
StabilityReport stability_report(std::span<const Ranking> rankings, std::size_t k,
                                 double budget);

}  // namespace scarv

#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "scarv/core.hpp"

namespace scarv {

enum class ClusterAggRule { Mean, Median, Softmax };
enum class AllocRule { Shrink, Collapse };
enum class CrossSeedRule { Median, Mean, Borda };

std::string cross_seed_to_string(CrossSeedRule rule);
CrossSeedRule cross_seed_from_string(const std::string& name);
ClusterAggRule cluster_agg_from_string(const std::string& name);
AllocRule alloc_from_string(const std::string& name);

/// Knobs of the aggregation pipeline. The defaults are the pipeline's
/// standard instantiation: diversity weight 0.2, k = 10 neighbors, mean
/// cluster aggregation, shrink(0.5) allocation, median across seeds.
struct ScarvConfig {
    double diversity_weight = 0.2;
    std::size_t knn_k = 10;
    ClusterAggRule cluster_agg = ClusterAggRule::Mean;
    AllocRule alloc = AllocRule::Shrink;
    double shrink_lambda = 0.5;
    CrossSeedRule cross_seed = CrossSeedRule::Median;
    double softmax_temperature = 0.25;

    void validate() const;
};

enum class MethodFamily { Bare, SeedOnly, ClusterOnly, FullScarv, DedupApprox, DedupOracle };

/// A named method variant. SeedOnly carries its cross-seed rule; the other
/// families take theirs from ScarvConfig.
struct MethodKind {
    MethodFamily family = MethodFamily::Bare;
    CrossSeedRule seed_rule = CrossSeedRule::Median;

    static MethodKind parse(const std::string& name);
    std::string name() const;
};

/// u = (1 - w) * normalized + w * d, elementwise; inputs must be in [0, 1].
std::vector<double> diversity_blend(std::span<const double> normalized,
                                    std::span<const double> d, double w);

/// Cluster-level summary a_k of the member values under the given rule.
/// The softmax rule is the exp(u/T)-weighted mean with T = temperature.
std::unordered_map<int, double> cluster_aggregate(std::span<const double> u,
                                                  std::span<const ExampleId> ids,
                                                  const ClusterMap& map,
                                                  ClusterAggRule rule,
                                                  double temperature = 0.25);

/// Allocates cluster signal back to members. Shrink: lambda * u_i +
/// (1 - lambda) * a_c(i) for non-singletons; collapse: a_c(i). Singletons
/// keep u_i under every rule.
std::vector<double> allocate(std::span<const double> u,
                             const std::unordered_map<int, double>& cluster_values,
                             std::span<const ExampleId> ids, const ClusterMap& map,
                             AllocRule rule, double lambda);

/// Robust per-row aggregation across seed columns. Median and mean act on
/// the values; Borda assigns each column's fractional-rank points (higher
/// score, more points) and sums them across columns.
std::vector<double> cross_seed_aggregate(const std::vector<std::vector<double>>& columns,
                                         CrossSeedRule rule);
std::vector<double> cross_seed_aggregate(const ScoreMatrix& m, CrossSeedRule rule);

/// One seed column through normalize -> diversity blend -> cluster
/// aggregate -> allocate. `d` may be empty (treated as all zeros, e.g. for
/// score sources without features).
std::vector<double> structural_stage(std::span<const double> raw_column,
                                     std::span<const ExampleId> ids, const ClusterMap& map,
                                     std::span<const double> d, const ScarvConfig& cfg);

/// Full method dispatch; see MethodFamily. Dedup variants rank one
/// representative per cluster (lowest id) by seed-median aggregation and
/// place the remaining members right after their representative in id
/// order. The caller chooses which cluster map a dedup variant consumes.
Ranking run_method(const MethodKind& kind, const ScoreMatrix& m, const ClusterMap& map,
                   std::span<const double> d, const ScarvConfig& cfg);

}  // namespace scarv

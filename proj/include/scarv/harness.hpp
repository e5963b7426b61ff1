#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scarv/aggregate.hpp"
#include "scarv/config.hpp"
#include "scarv/evalstats.hpp"
#include "scarv/mining.hpp"
#include "scarv/proxies.hpp"
#include "scarv/textgen.hpp"

namespace scarv {

/// Stable 64-bit seed for the (master, outer run, role, index) tuple:
/// FNV-1a over the little-endian bytes of master, outer_run, the role
/// string, a zero separator and index, finished with splitmix64. Every
/// random draw in the harness flows through seeds derived here, which is
/// what keeps outer runs and roles independent and results portable.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t outer_run,
                          std::string_view role, std::uint64_t index);

struct SyntheticSpec {
    std::size_t n = 2000;
    std::size_t vocab_size = 500;
    int class_count = 2;
    std::size_t heldout = 500;
};

struct RedundancySpec {
    double rate = 0.3;
    double strength = 0.6;
    std::size_t cluster_size = 2;
};

/// Direct score generator used for frontier property tests where trained
/// scores would be too slow: score = quality_scale * q_i + cluster_effect
/// * g_c(i) + noise * eps_i^(r), with q and g planted per configuration
/// and eps drawn per column. A test oracle, not a data pipeline.
struct ScoreModelSpec {
    std::size_t n = 500;
    double coverage = 0.4;          // fraction of examples inside 2+ clusters
    std::size_t cluster_size = 2;
    double quality_scale = 1.0;
    double cluster_effect = 1.0;
    double noise = 1.0;
};

struct ScoreModel {
    std::vector<ExampleId> ids;
    ClusterMap map;
    std::vector<double> base;  // planted deterministic part
    double noise = 1.0;
};

ScoreModel make_score_model(const ScoreModelSpec& spec, std::uint64_t seed);
ScoreMatrix sample_score_columns(const ScoreModel& model,
                                 std::span<const std::uint64_t> seeds);

struct ExperimentConfig {
    // exactly one source
    std::optional<SyntheticSpec> synthetic;
    std::string dataset_path;
    std::optional<ScoreModelSpec> score_model;

    std::optional<RedundancySpec> redundancy;  // injected duplicates
    std::string cluster_csv;                   // imported map (oracle for JSONL data)
    double noise_rate = 0.0;

    ProxyKind proxy = ProxyKind::Loss;
    std::vector<MethodKind> methods;
    std::size_t seeds_per_run = 5;  // R internal scoring seeds per outer run
    std::size_t outer_runs = 5;
    std::uint64_t master_seed = 1;
    std::vector<double> budgets = {0.3};
    std::size_t topk = 10;
    double val_fraction = 0.2;  // held-out split for JSONL sources
    double mine_threshold = kDefaultTfidfThreshold;
    int jobs = 1;

    ScarvConfig scarv;
    TrainConfig train;
    TfidfConfig tfidf;

    void validate() const;
};

/// Builds an ExperimentConfig from a flat key/value config file.
ExperimentConfig experiment_config_from(const KeyValueConfig& kv);

std::string config_hash(const ExperimentConfig& cfg);

/// Aggregate rows use outer_run = -1; per-run rows carry the run index.
struct ResultRecord {
    int outer_run = -1;
    std::string method;
    std::string metric;
    double value = 0.0;
};

struct ExperimentResult {
    std::string config_hash;
    std::vector<ResultRecord> records;
    std::map<std::string, std::vector<Ranking>> rankings;  // per method, per outer run
    double wall_seconds = 0.0;

    double value(const std::string& method, const std::string& metric,
                 int outer_run = -1) const;
    bool has_value(const std::string& method, const std::string& metric,
                   int outer_run = -1) const;
    std::vector<double> per_run_values(const std::string& method,
                                       const std::string& metric) const;
};

/// Full protocol: per outer run score R seed columns, apply every method,
/// then compute cross-run stability, subset-selection utilities (when a
/// held-out set exists) and noisy-label retrieval (when noise was
/// injected). All methods in one experiment share the same derived score
/// seeds, so method deltas are attributable to aggregation alone.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct FrontierRow {
    std::size_t seeds = 0;  // R
    double full_scarv = 0.0;
    double seed_mean = 0.0;
    double seed_median = 0.0;
    double seed_borda = 0.0;
    double best_upper = 0.0;  // max over the three seed-only rules
    double delta_best = 0.0;  // full_scarv - best_upper
    CrossSeedRule winner = CrossSeedRule::Mean;
};

/// Seed-budget frontier: for each R, full SCARV and all three seed-only
/// rules under identical derived seeds (columns for smaller R are prefixes
/// of the max-R columns, keeping the comparison paired).
std::vector<FrontierRow> run_frontier(const ExperimentConfig& cfg,
                                      std::span<const std::size_t> r_list);

/// Mechanism decomposition: bare, cluster-only, the three seed-only rules,
/// full SCARV and both dedup-then-rank variants in one paired experiment.
/// Needs a ground-truth map (injected or imported) for dedup_oracle.
ExperimentResult run_decomposition(const ExperimentConfig& cfg);

/// Per-run paired deltas (method_a - method_b) of a per-run metric.
std::vector<double> paired_deltas(const ExperimentResult& result,
                                  const std::string& method_a,
                                  const std::string& method_b,
                                  const std::string& metric);

// Long-format results CSV: config_hash,outer_run,method,metric,value.
void write_results_csv(const ExperimentResult& result, const std::string& path);
ExperimentResult read_results_csv(const std::string& path);

void write_frontier_csv(std::span<const FrontierRow> rows, const std::string& path);
std::vector<FrontierRow> read_frontier_csv(const std::string& path);

/// Bar chart of per-method stability. Byte-stable for identical inputs.
void emit_method_bar_svg(const ExperimentResult& result, const std::string& path);

/// Line chart of stability vs seed budget, one polyline per method and one
/// circle per R value. Byte-stable for identical inputs.
void emit_frontier_svg(std::span<const FrontierRow> rows, const std::string& path);

}  // namespace scarv

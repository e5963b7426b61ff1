#pragma once

#include <span>
#include <string>
#include <vector>

#include "scarv/modelkit.hpp"

namespace scarv {

/// All proxies share the "higher = better / more helpful" orientation;
/// suspicious-example retrieval flips the sign at the metric layer.
enum class ProxyKind { Loss, Margin, Confidence, TracIn };

ProxyKind proxy_from_string(const std::string& name);
std::string proxy_to_string(ProxyKind kind);

struct ValBatch {
    FeatureSet features;
    std::vector<int> labels;
};

/// Per-example proxy score under one trained model.
///   loss       -> negated cross-entropy, i.e. log p_gold (<= 0)
///   margin     -> p_gold - max other-class probability (in [-1, 1])
///   confidence -> p_gold (in [0, 1])
///   tracin     -> sum over stored checkpoints of eta_t * <grad loss(i),
///                 mean validation gradient>; needs a trace and val batch
std::vector<double> score_proxy(ProxyKind kind, const LinearModel& model,
                                const FeatureSet& features, std::span<const int> labels,
                                const ValBatch* val = nullptr);

/// One score column per seed: column r comes from the model trained with
/// seeds[r]. Deterministic given the seed list; columns are independent
/// jobs when jobs > 1.
ScoreMatrix score_matrix(const FeatureSet& features, std::span<const int> labels,
                         std::span<const ExampleId> ids, ProxyKind kind,
                         std::span<const std::uint64_t> seeds, const TrainConfig& hp,
                         const ValBatch* val = nullptr, int n_classes = 0, int jobs = 1);

/// Leave-one-out diagnostic: values[i] = U(D) - U(D \ {i}) with U =
/// validation accuracy, every retraining under one fixed seed.
struct LooResult {
    std::vector<ExampleId> ids;
    std::vector<double> values;
    double utility_full = 0.0;
};

inline constexpr std::size_t kLooDefaultGuard = 2000;

LooResult loo_values(const FeatureSet& train_x, std::span<const int> train_y,
                     std::span<const ExampleId> ids, const FeatureSet& val_x,
                     std::span<const int> val_y, const TrainConfig& hp,
                     std::uint64_t seed, int n_classes = 0,
                     std::size_t guard = kLooDefaultGuard, bool override_guard = false,
                     int jobs = 1);

}  // namespace scarv

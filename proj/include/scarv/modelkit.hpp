#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scarv/core.hpp"

namespace scarv {

/// Sparse feature rows plus their shared dimensionality.
struct FeatureSet {
    std::vector<SparseVector> rows;
    std::size_t dim = 0;

    std::size_t size() const { return rows.size(); }
};

struct TfidfConfig {
    std::size_t min_df = 1;
    std::size_t max_features = 0;  // 0 = unlimited
};

/// tf * idf with idf = ln((1 + N) / (1 + df)) + 1 and L2-normalized rows.
struct TfidfModel {
    std::unordered_map<std::string, int> vocabulary;
    std::vector<double> idf;
    TfidfConfig config;

    std::size_t dim() const { return idf.size(); }
    SparseVector transform(const std::string& text) const;
    FeatureSet transform_all(std::span<const std::string> texts) const;
};

std::pair<TfidfModel, FeatureSet> tfidf_fit_transform(std::span<const std::string> texts,
                                                      const TfidfConfig& cfg = {});

struct TrainConfig {
    int epochs = 4;
    int batch = 32;
    double learning_rate = 2.0;   // decays as 1/sqrt(step)
    double l2 = 1e-4;
    double init_scale = 0.1;
    int checkpoints = 3;
};

struct Checkpoint {
    std::vector<double> weights;
    std::vector<double> bias;
    double step_size = 0.0;  // learning rate in effect at this checkpoint
    std::size_t step = 0;
};

/// Multinomial logistic regression parameters (classes x features,
/// row-major) plus evenly spaced training checkpoints.
struct LinearModel {
    int n_classes = 0;
    std::size_t n_features = 0;
    std::vector<double> weights;
    std::vector<double> bias;
    std::vector<Checkpoint> trace;

    double weight(int c, std::size_t f) const {
        return weights[static_cast<std::size_t>(c) * n_features + f];
    }
};

/// Mini-batch SGD with seed-dependent init and per-epoch shuffling;
/// bit-identical results for identical inputs and seed. Throws DataError
/// (with the step index) if the loss goes non-finite.
LinearModel train_logreg(const FeatureSet& features, std::span<const int> labels,
                         std::uint64_t seed, const TrainConfig& hp = {},
                         int n_classes = 0);

/// Softmax class probabilities, one row per input.
std::vector<std::vector<double>> predict_proba(const LinearModel& model,
                                               const FeatureSet& features);

std::vector<double> predict_proba_row(const LinearModel& model, const SparseVector& row);

double accuracy(const LinearModel& model, const FeatureSet& features,
                std::span<const int> labels);

/// Mean cross-entropy over the given rows.
double mean_cross_entropy(const LinearModel& model, const FeatureSet& features,
                          std::span<const int> labels);

/// Accumulates scale * d(cross-entropy)/d(theta) for one example into
/// (grad_w, grad_b); no regularization term.
void add_ce_gradient(const LinearModel& model, const SparseVector& row, int label,
                     std::span<double> grad_w, std::span<double> grad_b, double scale);

/// View of a stored checkpoint as a standalone model (no trace).
LinearModel checkpoint_model(const LinearModel& model, std::size_t index);

/// Per-example mean cosine distance to the k nearest neighbors (self
/// excluded, k clipped to n-1), min-max normalized across the dataset.
/// All-zero rows sit at distance 1 from everything.
std::vector<double> knn_mean_cosine_distance(const FeatureSet& features, std::size_t k);

}  // namespace scarv

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scarv/core.hpp"

namespace scarv {

/// One labeled text example. `source_id` is set on injected duplicate
/// copies and points at the original; `flipped` marks label-noise targets.
struct Example {
    ExampleId id = 0;
    std::string text;
    int label = 0;
    std::optional<ExampleId> source_id;
    bool flipped = false;
};

struct Dataset {
    std::vector<Example> examples;
    int num_classes = 0;

    std::size_t size() const { return examples.size(); }
    std::vector<ExampleId> ids() const;
    std::vector<int> labels() const;
    std::vector<std::string> texts() const;
    std::vector<bool> flip_mask() const;
};

/// Perturbation strength s in [0, 1] and the per-transform probabilities
/// derived from it. s = 0 is the identity transform. Replacement draws
/// from `vocabulary` when provided, otherwise from the sentence itself.
struct PerturbationConfig {
    double strength = 0.0;
    std::vector<std::string> vocabulary;

    double dropout_prob() const { return 0.15 * strength; }
    double swap_prob() const { return 0.15 * strength; }
    double repeat_prob() const { return 0.10 * strength; }
    double replace_prob() const { return 0.15 * strength; }
    double segment_shuffle_prob() const { return 0.30 * strength; }
};

std::vector<std::string> tokenize(const std::string& text);
std::string join_tokens(const std::vector<std::string>& tokens);

/// Sorted unique tokens across the dataset.
std::vector<std::string> corpus_vocabulary(const Dataset& d);

/// Synthetic labeled corpus: 5-30 token sentences whose label is carried
/// by class-specific keyword tokens, so a linear model on bag-of-words
/// features can learn it. Deterministic given the seed.
Dataset make_synthetic_corpus(std::size_t n, std::size_t vocab_size, int class_count,
                              std::uint64_t seed);

/// Stochastic combination of word dropout, local word swaps, word
/// repetition, token replacement and segment shuffle, applied in that
/// order. At least one token always survives; deterministic given seed.
std::string perturb_text(const std::string& text, const PerturbationConfig& cfg,
                         std::uint64_t seed);

/// Appends floor(rate * n) perturbed copies of sampled source examples.
/// Copies of one source share its cluster (source + up to cluster_size - 1
/// copies, filled round-robin); untouched examples are singletons.
std::pair<Dataset, ClusterMap> inject_near_duplicates(const Dataset& d, double rate,
                                                      const PerturbationConfig& cfg,
                                                      std::size_t cluster_size,
                                                      std::uint64_t seed);

/// Flips exactly floor(rate * n) labels to a uniformly random other class
/// and marks exactly those examples in the flip mask.
Dataset inject_label_noise(const Dataset& d, double rate, std::uint64_t seed);

}  // namespace scarv

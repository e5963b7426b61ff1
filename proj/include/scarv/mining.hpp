#pragma once

#include <span>
#include <string>
#include <vector>

#include "scarv/core.hpp"

namespace scarv {

struct SimilarityPair {
    ExampleId a = 0;
    ExampleId b = 0;
    double similarity = 0.0;
};

/// Summary of a discovered cluster map (coverage, size and quality).
struct ClusterStats {
    double coverage = 0.0;                // fraction of ids in clusters of size >= 2
    std::size_t non_singleton_count = 0;
    double mean_size = 0.0;               // mean non-singleton cluster size
    std::size_t max_size = 0;
    double mean_within_similarity = 0.0;  // mean pairwise cosine inside non-singletons
    bool has_similarity = false;
    double purity = 0.0;                  // size-weighted majority-label fraction
};

/// Connected components over edges with similarity >= threshold (union-find
/// transitive closure); everything else becomes a singleton. Cluster ids
/// are 1..K, assigned by smallest member id.
ClusterMap threshold_clusters(std::span<const ExampleId> ids,
                              std::span<const SimilarityPair> pairs, double threshold);

/// All unordered pairs whose cosine (on L2-normalized vectors) reaches
/// the threshold. All-zero vectors emit no pairs. Pair enumeration is
/// quadratic; intended for corpora up to ~20k examples.
std::vector<SimilarityPair> tfidf_cosine_pairs(std::span<const ExampleId> ids,
                                               std::span<const SparseVector> vectors,
                                               double threshold);

/// All unordered pairs whose character n-gram Jaccard similarity reaches
/// the threshold. Texts shorter than the gram length contribute one gram.
std::vector<SimilarityPair> chargram_jaccard_pairs(std::span<const ExampleId> ids,
                                                   std::span<const std::string> texts,
                                                   int gram_len, double threshold);

/// Coverage/size/quality statistics. `vectors` may be null (then the
/// similarity column is marked absent); labels are aligned with ids.
ClusterStats cluster_stats(const ClusterMap& map, std::span<const ExampleId> ids,
                           const std::vector<SparseVector>* vectors,
                           std::span<const int> labels);

inline constexpr double kDefaultTfidfThreshold = 0.9;
inline constexpr double kDefaultChargramThreshold = 0.6;
inline constexpr int kDefaultGramLength = 3;

}  // namespace scarv

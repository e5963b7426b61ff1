#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace scarv {

/// Stable per-example identifier; non-negative, unique within a dataset.
using ExampleId = std::int64_t;

/// Sparse feature row: (column, value) entries sorted by column.
using SparseVector = std::vector<std::pair<int, double>>;

/// Configuration / validation problems. CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Runtime / data problems. CLI exit code 3.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Denominator guard used by min-max normalization.
inline constexpr double kNormalizeEpsilon = 1e-12;

/// Raw proxy scores: n examples (rows) x R seeds (columns), row-major.
class ScoreMatrix {
public:
    ScoreMatrix(std::vector<ExampleId> example_ids,
                std::vector<std::uint64_t> seed_labels,
                std::vector<double> values);

    std::size_t n_examples() const { return example_ids_.size(); }
    std::size_t n_seeds() const { return seed_labels_.size(); }

    double at(std::size_t row, std::size_t col) const {
        return values_[row * n_seeds() + col];
    }
    double& at(std::size_t row, std::size_t col) {
        return values_[row * n_seeds() + col];
    }

    std::vector<double> column(std::size_t col) const;
    std::span<const double> row(std::size_t r) const {
        return {values_.data() + r * n_seeds(), n_seeds()};
    }

    const std::vector<ExampleId>& example_ids() const { return example_ids_; }
    const std::vector<std::uint64_t>& seed_labels() const { return seed_labels_; }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<ExampleId> example_ids_;
    std::vector<std::uint64_t> seed_labels_;
    std::vector<double> values_;
};

enum class RankDirection { Descending, Ascending };

/// Total order over example ids. Position 0 holds the best example under
/// the chosen direction; `scores` is aligned with `order` (empty when the
/// order was not produced from per-id scores).
struct Ranking {
    std::vector<ExampleId> order;
    std::vector<double> scores;

    std::size_t size() const { return order.size(); }
};

/// Hard partition of example ids into clusters. Singletons are ordinary
/// one-member clusters; a map is "total" over a set of ids when every id
/// has an assignment.
class ClusterMap {
public:
    ClusterMap() = default;

    static ClusterMap singletons(std::span<const ExampleId> ids);

    void assign(ExampleId id, int cluster) { assignment_[id] = cluster; }
    bool contains(ExampleId id) const { return assignment_.count(id) > 0; }
    int cluster_of(ExampleId id) const;
    std::size_t size() const { return assignment_.size(); }

    /// Members per cluster, each member list sorted by id.
    std::map<int, std::vector<ExampleId>> groups() const;

    /// Copy of this map with fresh singleton clusters for any id in `ids`
    /// that has no assignment yet.
    ClusterMap completed(std::span<const ExampleId> ids) const;

    /// Throws DataError unless every id in `ids` is assigned.
    void require_total(std::span<const ExampleId> ids) const;

    const std::unordered_map<ExampleId, int>& assignment() const { return assignment_; }

private:
    std::unordered_map<ExampleId, int> assignment_;
};

/// (x - min) / (max - min + epsilon), elementwise. Order-preserving; a
/// constant input maps to all zeros. Throws DataError on non-finite input,
/// naming the offending index.
std::vector<double> minmax_normalize(std::span<const double> scores,
                                     double epsilon = kNormalizeEpsilon);

/// Sort ids by score in the given direction; ties break by ascending id,
/// so the result is a deterministic function of its inputs.
Ranking to_ranking(std::span<const ExampleId> ids, std::span<const double> scores,
                   RankDirection direction);

/// 1-based ranks, smallest value = rank 1; tied values receive the mean of
/// the rank positions they span.
std::vector<double> fractional_ranks(std::span<const double> scores);

}  // namespace scarv

#include "scarv/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace scarv {

ScoreMatrix::ScoreMatrix(std::vector<ExampleId> example_ids,
                         std::vector<std::uint64_t> seed_labels,
                         std::vector<double> values)
    : example_ids_(std::move(example_ids)),
      seed_labels_(std::move(seed_labels)),
      values_(std::move(values)) {
    if (example_ids_.empty()) throw DataError("score matrix needs at least one example");
    if (seed_labels_.empty()) throw DataError("score matrix needs at least one seed column");
    if (values_.size() != example_ids_.size() * seed_labels_.size())
        throw DataError("score matrix shape mismatch: " + std::to_string(values_.size()) +
                        " values for " + std::to_string(example_ids_.size()) + "x" +
                        std::to_string(seed_labels_.size()));
    std::unordered_set<ExampleId> seen;
    for (ExampleId id : example_ids_) {
        if (id < 0) throw DataError("negative example id " + std::to_string(id));
        if (!seen.insert(id).second)
            throw DataError("duplicate example id " + std::to_string(id));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]))
            throw DataError("non-finite score at flat index " + std::to_string(i));
    }
}

std::vector<double> ScoreMatrix::column(std::size_t col) const {
    std::vector<double> out(n_examples());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i, col);
    return out;
}

ClusterMap ClusterMap::singletons(std::span<const ExampleId> ids) {
    ClusterMap map;
    int next = 1;
    for (ExampleId id : ids) map.assignment_[id] = next++;
    return map;
}

int ClusterMap::cluster_of(ExampleId id) const {
    auto it = assignment_.find(id);
    if (it == assignment_.end())
        throw DataError("id " + std::to_string(id) + " has no cluster assignment");
    return it->second;
}

std::map<int, std::vector<ExampleId>> ClusterMap::groups() const {
    std::map<int, std::vector<ExampleId>> out;
    for (const auto& [id, cluster] : assignment_) out[cluster].push_back(id);
    for (auto& [cluster, members] : out) std::sort(members.begin(), members.end());
    return out;
}

ClusterMap ClusterMap::completed(std::span<const ExampleId> ids) const {
    ClusterMap out = *this;
    int next = 0;
    for (const auto& [id, cluster] : assignment_) next = std::max(next, cluster);
    ++next;
    for (ExampleId id : ids) {
        if (!out.contains(id)) out.assignment_[id] = next++;
    }
    return out;
}

void ClusterMap::require_total(std::span<const ExampleId> ids) const {
    for (ExampleId id : ids) {
        if (!contains(id))
            throw DataError("cluster map is not total: id " + std::to_string(id) +
                            " is unassigned");
    }
}

std::vector<double> minmax_normalize(std::span<const double> scores, double epsilon) {
    if (scores.empty()) throw DataError("cannot normalize an empty score vector");
    if (epsilon <= 0.0) throw ConfigError("normalization epsilon must be positive");
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i]))
            throw DataError("non-finite score at index " + std::to_string(i));
    }
    double lo = scores[0], hi = scores[0];
    for (double v : scores) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double denom = hi - lo + epsilon;
    std::vector<double> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = (scores[i] - lo) / denom;
    return out;
}

Ranking to_ranking(std::span<const ExampleId> ids, std::span<const double> scores,
                   RankDirection direction) {
    if (ids.size() != scores.size())
        throw DataError("to_ranking: " + std::to_string(ids.size()) + " ids but " +
                        std::to_string(scores.size()) + " scores");
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i]))
            throw DataError("non-finite score at index " + std::to_string(i));
    }
    std::vector<std::size_t> idx(ids.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) {
            return direction == RankDirection::Descending ? scores[a] > scores[b]
                                                          : scores[a] < scores[b];
        }
        return ids[a] < ids[b];
    });
    Ranking r;
    r.order.reserve(ids.size());
    r.scores.reserve(ids.size());
    for (std::size_t i : idx) {
        r.order.push_back(ids[i]);
        r.scores.push_back(scores[i]);
    }
    return r;
}

std::vector<double> fractional_ranks(std::span<const double> scores) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i]))
            throw DataError("non-finite score at index " + std::to_string(i));
    }
    const std::size_t n = scores.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[idx[j + 1]] == scores[idx[i]]) ++j;
        // Positions i..j (0-based) share the mean of 1-based ranks i+1..j+1.
        double mean_rank = 0.5 * static_cast<double>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace scarv

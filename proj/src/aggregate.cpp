#include "scarv/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace scarv {

std::string cross_seed_to_string(CrossSeedRule rule) {
    switch (rule) {
        case CrossSeedRule::Median: return "median";
        case CrossSeedRule::Mean: return "mean";
        case CrossSeedRule::Borda: return "borda";
    }
    return "?";
}

CrossSeedRule cross_seed_from_string(const std::string& name) {
    if (name == "median") return CrossSeedRule::Median;
    if (name == "mean") return CrossSeedRule::Mean;
    if (name == "borda") return CrossSeedRule::Borda;
    throw ConfigError("unknown cross-seed rule '" + name + "'");
}

ClusterAggRule cluster_agg_from_string(const std::string& name) {
    if (name == "mean") return ClusterAggRule::Mean;
    if (name == "median") return ClusterAggRule::Median;
    if (name == "softmax") return ClusterAggRule::Softmax;
    throw ConfigError("unknown cluster aggregation rule '" + name + "'");
}

AllocRule alloc_from_string(const std::string& name) {
    if (name == "shrink") return AllocRule::Shrink;
    if (name == "collapse") return AllocRule::Collapse;
    throw ConfigError("unknown allocation rule '" + name + "'");
}

void ScarvConfig::validate() const {
    if (diversity_weight < 0.0 || diversity_weight > 1.0)
        throw ConfigError("diversity weight must be in [0, 1]");
    if (shrink_lambda < 0.0 || shrink_lambda > 1.0)
        throw ConfigError("shrink lambda must be in [0, 1]");
    if (knn_k == 0) throw ConfigError("knn_k must be >= 1");
    if (softmax_temperature <= 0.0) throw ConfigError("softmax temperature must be > 0");
}

MethodKind MethodKind::parse(const std::string& name) {
    if (name == "bare") return {MethodFamily::Bare};
    if (name == "cluster_only") return {MethodFamily::ClusterOnly};
    if (name == "full_scarv") return {MethodFamily::FullScarv};
    if (name == "dedup_approx") return {MethodFamily::DedupApprox};
    if (name == "dedup_oracle") return {MethodFamily::DedupOracle};
    const std::string prefix = "seed_only_";
    if (name.rfind(prefix, 0) == 0)
        return {MethodFamily::SeedOnly, cross_seed_from_string(name.substr(prefix.size()))};
    throw ConfigError("unknown method '" + name + "'");
}

std::string MethodKind::name() const {
    switch (family) {
        case MethodFamily::Bare: return "bare";
        case MethodFamily::SeedOnly: return "seed_only_" + cross_seed_to_string(seed_rule);
        case MethodFamily::ClusterOnly: return "cluster_only";
        case MethodFamily::FullScarv: return "full_scarv";
        case MethodFamily::DedupApprox: return "dedup_approx";
        case MethodFamily::DedupOracle: return "dedup_oracle";
    }
    return "?";
}

std::vector<double> diversity_blend(std::span<const double> normalized,
                                    std::span<const double> d, double w) {
    if (normalized.size() != d.size()) throw DataError("diversity blend length mismatch");
    if (w < 0.0 || w > 1.0) throw ConfigError("diversity weight must be in [0, 1]");
    std::vector<double> out(normalized.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (normalized[i] < 0.0 || normalized[i] > 1.0 || d[i] < 0.0 || d[i] > 1.0)
            throw DataError("diversity blend inputs must be in [0, 1] (index " +
                            std::to_string(i) + ")");
        out[i] = (1.0 - w) * normalized[i] + w * d[i];
    }
    return out;
}

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::unordered_map<int, double> cluster_aggregate(std::span<const double> u,
                                                  std::span<const ExampleId> ids,
                                                  const ClusterMap& map,
                                                  ClusterAggRule rule,
                                                  double temperature) {
    if (u.size() != ids.size()) throw DataError("cluster_aggregate length mismatch");
    map.require_total(ids);
    std::unordered_map<int, std::vector<double>> values;
    for (std::size_t i = 0; i < ids.size(); ++i)
        values[map.cluster_of(ids[i])].push_back(u[i]);

    std::unordered_map<int, double> out;
    out.reserve(values.size());
    for (auto& [cluster, members] : values) {
        switch (rule) {
            case ClusterAggRule::Mean:
                out[cluster] = std::accumulate(members.begin(), members.end(), 0.0) /
                               static_cast<double>(members.size());
                break;
            case ClusterAggRule::Median:
                out[cluster] = median_of(members);
                break;
            case ClusterAggRule::Softmax: {
                // exp(u/T)-weighted mean; sorting makes the reduction
                // independent of member iteration order
                std::sort(members.begin(), members.end());
                double hi = members.back();
                double num = 0.0, den = 0.0;
                for (double v : members) {
                    double e = std::exp((v - hi) / temperature);
                    num += v * e;
                    den += e;
                }
                out[cluster] = num / den;
                break;
            }
        }
    }
    return out;
}

std::vector<double> allocate(std::span<const double> u,
                             const std::unordered_map<int, double>& cluster_values,
                             std::span<const ExampleId> ids, const ClusterMap& map,
                             AllocRule rule, double lambda) {
    if (u.size() != ids.size()) throw DataError("allocate length mismatch");
    if (lambda < 0.0 || lambda > 1.0) throw ConfigError("shrink lambda must be in [0, 1]");
    std::unordered_map<int, std::size_t> sizes;
    for (std::size_t i = 0; i < ids.size(); ++i) ++sizes[map.cluster_of(ids[i])];

    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        int cluster = map.cluster_of(ids[i]);
        if (sizes[cluster] < 2) {
            out[i] = u[i];  // singletons pass through unchanged
            continue;
        }
        auto it = cluster_values.find(cluster);
        if (it == cluster_values.end())
            throw DataError("no aggregate value for cluster " + std::to_string(cluster));
        out[i] = rule == AllocRule::Collapse ? it->second
                                             : lambda * u[i] + (1.0 - lambda) * it->second;
    }
    return out;
}

std::vector<double> cross_seed_aggregate(const std::vector<std::vector<double>>& columns,
                                         CrossSeedRule rule) {
    if (columns.empty()) throw DataError("cross-seed aggregation needs >= 1 column");
    const std::size_t n = columns[0].size();
    for (const auto& col : columns) {
        if (col.size() != n) throw DataError("cross-seed columns differ in length");
    }
    std::vector<double> out(n, 0.0);
    switch (rule) {
        case CrossSeedRule::Mean: {
            for (const auto& col : columns)
                for (std::size_t i = 0; i < n; ++i) out[i] += col[i];
            for (double& v : out) v /= static_cast<double>(columns.size());
            break;
        }
        case CrossSeedRule::Median: {
            std::vector<double> row(columns.size());
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t r = 0; r < columns.size(); ++r) row[r] = columns[r][i];
                out[i] = median_of(row);
            }
            break;
        }
        case CrossSeedRule::Borda: {
            // column points = fractional rank - 1, so the highest score in a
            // column of n earns n - 1 points and ties split points evenly
            for (const auto& col : columns) {
                auto ranks = fractional_ranks(col);
                for (std::size_t i = 0; i < n; ++i) out[i] += ranks[i] - 1.0;
            }
            break;
        }
    }
    return out;
}

std::vector<double> cross_seed_aggregate(const ScoreMatrix& m, CrossSeedRule rule) {
    std::vector<std::vector<double>> columns;
    columns.reserve(m.n_seeds());
    for (std::size_t r = 0; r < m.n_seeds(); ++r) columns.push_back(m.column(r));
    return cross_seed_aggregate(columns, rule);
}

std::vector<double> structural_stage(std::span<const double> raw_column,
                                     std::span<const ExampleId> ids, const ClusterMap& map,
                                     std::span<const double> d, const ScarvConfig& cfg) {
    auto normalized = minmax_normalize(raw_column);
    std::vector<double> zeros;
    if (d.empty()) {
        zeros.assign(raw_column.size(), 0.0);
        d = zeros;
    }
    auto blended = diversity_blend(normalized, d, cfg.diversity_weight);
    auto agg = cluster_aggregate(blended, ids, map, cfg.cluster_agg, cfg.softmax_temperature);
    return allocate(blended, agg, ids, map, cfg.alloc, cfg.shrink_lambda);
}

namespace {

Ranking dedup_ranking(const ScoreMatrix& m, const ClusterMap& map) {
    const auto& ids = m.example_ids();
    map.require_total(ids);
    auto groups = map.groups();

    // representative = lowest id in each cluster
    std::unordered_map<ExampleId, const std::vector<ExampleId>*> members_of_rep;
    std::vector<std::size_t> rep_rows;
    std::unordered_map<ExampleId, std::size_t> row_of;
    for (std::size_t i = 0; i < ids.size(); ++i) row_of[ids[i]] = i;
    for (const auto& [cluster, members] : groups) {
        members_of_rep[members.front()] = &members;
    }
    std::vector<ExampleId> rep_ids;
    for (ExampleId id : ids) {
        if (members_of_rep.count(id)) {
            rep_ids.push_back(id);
            rep_rows.push_back(row_of[id]);
        }
    }

    // seed-only median over the representative sub-matrix
    std::vector<std::vector<double>> columns(m.n_seeds());
    for (std::size_t r = 0; r < m.n_seeds(); ++r) {
        std::vector<double> col(rep_rows.size());
        for (std::size_t i = 0; i < rep_rows.size(); ++i) col[i] = m.at(rep_rows[i], r);
        columns[r] = minmax_normalize(col);
    }
    auto agg = cross_seed_aggregate(columns, CrossSeedRule::Median);
    Ranking reps = to_ranking(rep_ids, agg, RankDirection::Descending);

    Ranking out;
    out.order.reserve(ids.size());
    out.scores.reserve(ids.size());
    for (std::size_t p = 0; p < reps.size(); ++p) {
        ExampleId rep = reps.order[p];
        out.order.push_back(rep);
        out.scores.push_back(reps.scores[p]);
        for (ExampleId member : *members_of_rep[rep]) {
            if (member == rep) continue;
            out.order.push_back(member);
            out.scores.push_back(reps.scores[p]);
        }
    }
    return out;
}

}  // namespace

Ranking run_method(const MethodKind& kind, const ScoreMatrix& m, const ClusterMap& map,
                   std::span<const double> d, const ScarvConfig& cfg) {
    cfg.validate();
    const auto& ids = m.example_ids();
    if (!d.empty() && d.size() != ids.size())
        throw DataError("diversity vector length mismatch");

    switch (kind.family) {
        case MethodFamily::Bare:
            return to_ranking(ids, m.column(0), RankDirection::Descending);
        case MethodFamily::SeedOnly: {
            std::vector<std::vector<double>> columns;
            columns.reserve(m.n_seeds());
            for (std::size_t r = 0; r < m.n_seeds(); ++r)
                columns.push_back(minmax_normalize(m.column(r)));
            auto agg = cross_seed_aggregate(columns, kind.seed_rule);
            return to_ranking(ids, agg, RankDirection::Descending);
        }
        case MethodFamily::ClusterOnly: {
            auto shaped = structural_stage(m.column(0), ids, map, d, cfg);
            return to_ranking(ids, shaped, RankDirection::Descending);
        }
        case MethodFamily::FullScarv: {
            std::vector<std::vector<double>> columns;
            columns.reserve(m.n_seeds());
            for (std::size_t r = 0; r < m.n_seeds(); ++r)
                columns.push_back(structural_stage(m.column(r), ids, map, d, cfg));
            auto agg = cross_seed_aggregate(columns, cfg.cross_seed);
            return to_ranking(ids, agg, RankDirection::Descending);
        }
        case MethodFamily::DedupApprox:
        case MethodFamily::DedupOracle:
            return dedup_ranking(m, map);
    }
    throw ConfigError("unhandled method family");
}

}  // namespace scarv

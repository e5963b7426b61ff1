#include "scarv/mining.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>

namespace scarv {

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;

    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

double l2_norm(const SparseVector& v) {
    double s = 0.0;
    for (const auto& [_, x] : v) s += x * x;
    return std::sqrt(s);
}

double sparse_dot(const SparseVector& a, const SparseVector& b) {
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first == b[j].first) {
            s += a[i].second * b[j].second;
            ++i;
            ++j;
        } else if (a[i].first < b[j].first) {
            ++i;
        } else {
            ++j;
        }
    }
    return s;
}

// Character n-grams packed losslessly into 8 bytes when they fit; longer
// grams fall back to FNV-1a hashing.
std::vector<std::uint64_t> gram_set(const std::string& text, int n) {
    std::vector<std::uint64_t> grams;
    auto encode = [&](std::size_t start, std::size_t len) -> std::uint64_t {
        if (len <= 8) {
            std::uint64_t v = 0;
            for (std::size_t k = 0; k < len; ++k)
                v = (v << 8) | static_cast<unsigned char>(text[start + k]);
            return v | (static_cast<std::uint64_t>(len) << 56);
        }
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (std::size_t k = 0; k < len; ++k) {
            h ^= static_cast<unsigned char>(text[start + k]);
            h *= 0x100000001b3ULL;
        }
        return h;
    };
    const std::size_t len = text.size();
    const std::size_t un = static_cast<std::size_t>(n);
    if (len < un) {
        if (len > 0) grams.push_back(encode(0, len));
    } else {
        grams.reserve(len - un + 1);
        for (std::size_t i = 0; i + un <= len; ++i) grams.push_back(encode(i, un));
    }
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    return grams;
}

double jaccard_sorted(const std::vector<std::uint64_t>& a,
                      const std::vector<std::uint64_t>& b) {
    std::size_t inter = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++inter;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    std::size_t uni = a.size() + b.size() - inter;
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

ClusterMap threshold_clusters(std::span<const ExampleId> ids,
                              std::span<const SimilarityPair> pairs, double threshold) {
    if (threshold < -1.0 || threshold > 1.0)
        throw ConfigError("similarity threshold must be in [-1, 1]");
    std::unordered_map<ExampleId, std::size_t> index;
    index.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = i;

    UnionFind uf(ids.size());
    for (const auto& p : pairs) {
        if (p.similarity < -1.0 || p.similarity > 1.0)
            throw DataError("similarity outside [-1, 1] for pair (" + std::to_string(p.a) +
                            "," + std::to_string(p.b) + ")");
        auto ia = index.find(p.a);
        auto ib = index.find(p.b);
        if (ia == index.end()) throw DataError("unknown id " + std::to_string(p.a) + " in pair");
        if (ib == index.end()) throw DataError("unknown id " + std::to_string(p.b) + " in pair");
        if (p.similarity >= threshold) uf.unite(ia->second, ib->second);
    }

    // Canonicalize: components ordered by smallest member id get 1..K.
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    ClusterMap map;
    std::unordered_map<std::size_t, int> root_cluster;
    int next = 1;
    for (std::size_t i : order) {
        std::size_t root = uf.find(i);
        auto it = root_cluster.find(root);
        if (it == root_cluster.end()) it = root_cluster.emplace(root, next++).first;
        map.assign(ids[i], it->second);
    }
    return map;
}

std::vector<SimilarityPair> tfidf_cosine_pairs(std::span<const ExampleId> ids,
                                               std::span<const SparseVector> vectors,
                                               double threshold) {
    if (ids.size() != vectors.size()) throw DataError("ids/vectors length mismatch");
    if (threshold < -1.0 || threshold > 1.0)
        throw ConfigError("cosine threshold must be in [-1, 1]");

    std::vector<SparseVector> unit(vectors.size());
    std::vector<bool> zero(vectors.size(), false);
    int max_col = -1;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        double norm = l2_norm(vectors[i]);
        if (norm == 0.0) {
            zero[i] = true;
            continue;
        }
        unit[i] = vectors[i];
        for (auto& [col, x] : unit[i]) {
            x /= norm;
            max_col = std::max(max_col, col);
        }
    }

    // Inverted index keeps the scan near-linear in the number of rows that
    // actually share a feature.
    std::vector<std::vector<std::pair<std::size_t, double>>> postings(
        static_cast<std::size_t>(max_col + 1));
    for (std::size_t i = 0; i < unit.size(); ++i) {
        for (const auto& [col, x] : unit[i])
            postings[static_cast<std::size_t>(col)].push_back({i, x});
    }

    std::vector<SimilarityPair> out;
    std::vector<double> acc(unit.size(), 0.0);
    std::vector<std::size_t> touched;
    for (std::size_t i = 0; i < unit.size(); ++i) {
        if (zero[i]) continue;
        touched.clear();
        for (const auto& [col, x] : unit[i]) {
            for (const auto& [j, y] : postings[static_cast<std::size_t>(col)]) {
                if (j <= i) continue;
                if (acc[j] == 0.0) touched.push_back(j);
                acc[j] += x * y;
            }
        }
        std::sort(touched.begin(), touched.end());
        for (std::size_t j : touched) {
            double sim = std::min(1.0, std::max(-1.0, acc[j]));
            // snap exact matches that lost a few ulps to rounding
            if (1.0 - sim < 1e-12) sim = 1.0;
            if (sim >= threshold) out.push_back({ids[i], ids[j], sim});
            acc[j] = 0.0;
        }
    }
    return out;
}

std::vector<SimilarityPair> chargram_jaccard_pairs(std::span<const ExampleId> ids,
                                                   std::span<const std::string> texts,
                                                   int gram_len, double threshold) {
    if (ids.size() != texts.size()) throw DataError("ids/texts length mismatch");
    if (gram_len < 1) throw ConfigError("gram length must be >= 1");
    if (threshold < -1.0 || threshold > 1.0)
        throw ConfigError("jaccard threshold must be in [-1, 1]");

    std::vector<std::vector<std::uint64_t>> grams(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) grams[i] = gram_set(texts[i], gram_len);

    std::vector<SimilarityPair> out;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        for (std::size_t j = i + 1; j < texts.size(); ++j) {
            double sim = jaccard_sorted(grams[i], grams[j]);
            if (sim >= threshold) out.push_back({ids[i], ids[j], sim});
        }
    }
    return out;
}

ClusterStats cluster_stats(const ClusterMap& map, std::span<const ExampleId> ids,
                           const std::vector<SparseVector>* vectors,
                           std::span<const int> labels) {
    if (ids.size() != labels.size()) throw DataError("ids/labels length mismatch");
    map.require_total(ids);
    std::unordered_map<ExampleId, std::size_t> index;
    for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = i;

    ClusterStats stats;
    auto groups = map.groups();
    std::size_t covered = 0, member_total = 0, majority_total = 0;
    double sim_sum = 0.0;
    std::size_t sim_pairs = 0;
    for (const auto& [cluster, members] : groups) {
        stats.max_size = std::max(stats.max_size, members.size());
        if (members.size() < 2) continue;
        ++stats.non_singleton_count;
        covered += members.size();
        member_total += members.size();

        std::unordered_map<int, std::size_t> label_counts;
        for (ExampleId id : members) ++label_counts[labels[index.at(id)]];
        std::size_t majority = 0;
        for (const auto& [_, c] : label_counts) majority = std::max(majority, c);
        majority_total += majority;

        if (vectors) {
            for (std::size_t a = 0; a < members.size(); ++a) {
                for (std::size_t b = a + 1; b < members.size(); ++b) {
                    const SparseVector& va = (*vectors)[index.at(members[a])];
                    const SparseVector& vb = (*vectors)[index.at(members[b])];
                    double na = l2_norm(va), nb = l2_norm(vb);
                    double sim = (na == 0.0 || nb == 0.0)
                                     ? 0.0
                                     : sparse_dot(va, vb) / (na * nb);
                    sim_sum += sim;
                    ++sim_pairs;
                }
            }
        }
    }
    stats.coverage = ids.empty() ? 0.0
                                 : static_cast<double>(covered) /
                                       static_cast<double>(ids.size());
    stats.mean_size = stats.non_singleton_count == 0
                          ? 0.0
                          : static_cast<double>(member_total) /
                                static_cast<double>(stats.non_singleton_count);
    stats.purity = member_total == 0 ? 0.0
                                     : static_cast<double>(majority_total) /
                                           static_cast<double>(member_total);
    if (vectors && sim_pairs > 0) {
        stats.mean_within_similarity = sim_sum / static_cast<double>(sim_pairs);
        stats.has_similarity = true;
    }
    return stats;
}

}  // namespace scarv

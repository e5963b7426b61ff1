#include "scarv/evalstats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "scarv/rng.hpp"

namespace scarv {

namespace {

double pearson(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return std::nan("");
    return sab / std::sqrt(saa * sbb);
}

std::unordered_set<ExampleId> end_set(const Ranking& r, std::size_t k, RankEnd end) {
    std::unordered_set<ExampleId> out;
    if (end == RankEnd::Top) {
        for (std::size_t i = 0; i < k; ++i) out.insert(r.order[i]);
    } else {
        for (std::size_t i = r.size() - k; i < r.size(); ++i) out.insert(r.order[i]);
    }
    return out;
}

double jaccard(const std::unordered_set<ExampleId>& a, const std::unordered_set<ExampleId>& b) {
    std::size_t inter = 0;
    for (ExampleId id : a) inter += b.count(id);
    std::size_t uni = a.size() + b.size() - inter;
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

std::optional<double> spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DataError("spearman inputs differ in length");
    if (a.size() < 2) return std::nullopt;
    auto ra = fractional_ranks(a);
    auto rb = fractional_ranks(b);
    double rho = pearson(ra, rb);
    if (std::isnan(rho)) return std::nullopt;
    return rho;
}

std::optional<double> spearman(const Ranking& a, const Ranking& b) {
    if (a.size() != b.size()) throw DataError("rankings differ in length");
    std::unordered_map<ExampleId, double> pos_b;
    pos_b.reserve(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) pos_b[b.order[i]] = static_cast<double>(i);
    std::vector<double> ra(a.size()), rb(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto it = pos_b.find(a.order[i]);
        if (it == pos_b.end())
            throw DataError("rankings cover different id sets (id " +
                            std::to_string(a.order[i]) + " missing)");
        ra[i] = static_cast<double>(i);
        rb[i] = it->second;
    }
    if (a.size() < 2) return std::nullopt;
    double rho = pearson(ra, rb);
    if (std::isnan(rho)) return std::nullopt;
    return rho;
}

double pairwise_stability(std::span<const Ranking> rankings) {
    if (rankings.size() < 2)
        throw ConfigError("pairwise stability needs at least two rankings");
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < rankings.size(); ++i) {
        for (std::size_t j = i + 1; j < rankings.size(); ++j) {
            auto rho = spearman(rankings[i], rankings[j]);
            if (!rho)
                throw DataError("degenerate Spearman for ranking pair (" +
                                std::to_string(i) + "," + std::to_string(j) + ")");
            sum += *rho;
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

double topk_jaccard(const Ranking& a, const Ranking& b, std::size_t k, RankEnd end) {
    if (k == 0) throw ConfigError("topk_jaccard needs k >= 1");
    if (k > a.size() || k > b.size())
        throw ConfigError("topk_jaccard k exceeds ranking length");
    return jaccard(end_set(a, k, end), end_set(b, k, end));
}

double subset_overlap(std::span<const Ranking> rankings, double budget) {
    if (rankings.size() < 2) throw ConfigError("subset overlap needs at least two rankings");
    if (budget <= 0.0 || budget > 1.0) throw ConfigError("budget must be in (0, 1]");
    std::size_t k = static_cast<std::size_t>(budget * static_cast<double>(rankings[0].size()));
    if (k == 0) throw ConfigError("selection budget yields an empty subset");
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < rankings.size(); ++i) {
        for (std::size_t j = i + 1; j < rankings.size(); ++j) {
            sum += jaccard(end_set(rankings[i], k, RankEnd::Top),
                           end_set(rankings[j], k, RankEnd::Top));
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

double selection_gap(std::span<const double> utilities) {
    if (utilities.size() < 2) throw ConfigError("selection gap needs at least two runs");
    auto [lo, hi] = std::minmax_element(utilities.begin(), utilities.end());
    return *hi - *lo;
}

double auroc(std::span<const double> scores, const std::vector<bool>& positives) {
    if (scores.size() != positives.size()) throw DataError("auroc input length mismatch");
    std::size_t n_pos = 0;
    for (bool p : positives) n_pos += p ? 1 : 0;
    std::size_t n_neg = scores.size() - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw DataError("auroc needs at least one positive and one negative");
    auto ranks = fractional_ranks(scores);
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (positives[i]) rank_sum += ranks[i];
    }
    double np = static_cast<double>(n_pos);
    return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

std::pair<double, double> precision_recall_at_k(std::span<const double> scores,
                                                std::span<const ExampleId> ids,
                                                const std::vector<bool>& positives,
                                                std::size_t k) {
    if (scores.size() != ids.size() || scores.size() != positives.size())
        throw DataError("precision_recall_at_k input length mismatch");
    if (k == 0 || k > scores.size()) throw ConfigError("k must be in [1, n]");
    std::size_t total_pos = 0;
    for (bool p : positives) total_pos += p ? 1 : 0;
    if (total_pos == 0) throw DataError("recall is undefined with no positives");
    Ranking r = to_ranking(ids, scores, RankDirection::Descending);
    std::unordered_map<ExampleId, bool> pos_by_id;
    for (std::size_t i = 0; i < ids.size(); ++i) pos_by_id[ids[i]] = positives[i];
    std::size_t hits = 0;
    for (std::size_t i = 0; i < k; ++i) hits += pos_by_id[r.order[i]] ? 1 : 0;
    return {static_cast<double>(hits) / static_cast<double>(k),
            static_cast<double>(hits) / static_cast<double>(total_pos)};
}

std::pair<double, double> paired_bootstrap_ci(std::span<const double> deltas,
                                              std::size_t resamples, double level,
                                              std::uint64_t seed) {
    if (deltas.size() < 2) throw ConfigError("bootstrap needs at least two deltas");
    if (resamples < 1000) throw ConfigError("bootstrap needs at least 1000 resamples");
    if (level <= 0.0 || level >= 1.0) throw ConfigError("level must be in (0, 1)");
    Rng rng(seed);
    const std::size_t n = deltas.size();
    std::vector<double> means(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += deltas[rng.below(n)];
        means[b] = sum / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    auto quantile = [&](double q) {
        double pos = q * static_cast<double>(resamples - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        double frac = pos - static_cast<double>(lo);
        if (lo + 1 >= resamples) return means.back();
        return means[lo] * (1.0 - frac) + means[lo + 1] * frac;
    };
    double alpha = 1.0 - level;
    return {quantile(alpha / 2.0), quantile(1.0 - alpha / 2.0)};
}

TestResult wilcoxon_signed_rank(std::span<const double> deltas, WilcoxonMode mode) {
    TestResult out;
    if (deltas.empty()) throw ConfigError("wilcoxon needs at least one delta");
    double mean = 0.0;
    for (double d : deltas) mean += d;
    out.mean_delta = mean / static_cast<double>(deltas.size());

    std::vector<double> nonzero;
    for (double d : deltas) {
        if (!std::isfinite(d)) throw DataError("non-finite delta");
        if (d != 0.0) nonzero.push_back(d);
    }
    out.n = nonzero.size();
    if (nonzero.empty()) {
        out.p_value = 1.0;
        out.degenerate = true;
        out.exact = true;
        return out;
    }

    const std::size_t n = nonzero.size();
    std::vector<double> abs_vals(n);
    for (std::size_t i = 0; i < n; ++i) abs_vals[i] = std::fabs(nonzero[i]);
    auto ranks = fractional_ranks(abs_vals);
    double w_plus = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (nonzero[i] > 0.0) w_plus += ranks[i];
    }

    bool exact = mode == WilcoxonMode::Exact || (mode == WilcoxonMode::Auto && n <= 25);
    if (exact) {
        // Fractional ranks step in halves, so doubled ranks are integers.
        // Count, over all 2^n sign assignments, how many land at each
        // doubled rank-sum; identical to direct enumeration.
        std::vector<long long> w2(n);
        long long total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            w2[i] = std::llround(2.0 * ranks[i]);
            total += w2[i];
        }
        std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
        count[0] = 1.0;
        long long reach = 0;
        for (std::size_t i = 0; i < n; ++i) {
            reach += w2[i];
            for (long long s = reach; s >= w2[i]; --s)
                count[static_cast<std::size_t>(s)] +=
                    count[static_cast<std::size_t>(s - w2[i])];
        }
        long long t_obs = std::llround(2.0 * w_plus);
        long long center2 = total;  // 2 * mu in doubled units is `total`
        long long dev_obs = std::llabs(2 * t_obs - center2);
        double tail = 0.0, all = 0.0;
        for (long long s = 0; s <= total; ++s) {
            all += count[static_cast<std::size_t>(s)];
            if (std::llabs(2 * s - center2) >= dev_obs)
                tail += count[static_cast<std::size_t>(s)];
        }
        out.p_value = tail / all;
        out.exact = true;
    } else {
        double nn = static_cast<double>(n);
        double mu = nn * (nn + 1.0) / 4.0;
        double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
        // Tie correction: subtract (t^3 - t) / 48 per tie group.
        std::vector<double> sorted_abs = abs_vals;
        std::sort(sorted_abs.begin(), sorted_abs.end());
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && sorted_abs[j + 1] == sorted_abs[i]) ++j;
            double t = static_cast<double>(j - i + 1);
            var -= (t * t * t - t) / 48.0;
            i = j + 1;
        }
        if (var <= 0.0) {
            out.p_value = 1.0;
            out.degenerate = true;
            return out;
        }
        double diff = w_plus - mu;
        double cc = diff > 0.0 ? -0.5 : (diff < 0.0 ? 0.5 : 0.0);
        double z = (diff + cc) / std::sqrt(var);
        out.p_value = std::clamp(2.0 * (1.0 - normal_cdf(std::fabs(z))), 0.0, 1.0);
        out.exact = false;
    }
    return out;
}

TestResult paired_test(std::span<const double> deltas, std::size_t resamples, double level,
                       std::uint64_t seed) {
    TestResult out = wilcoxon_signed_rank(deltas);
    if (deltas.size() >= 2) {
        auto [lo, hi] = paired_bootstrap_ci(deltas, resamples, level, seed);
        out.ci_low = lo;
        out.ci_high = hi;
    } else {
        out.ci_low = out.ci_high = out.mean_delta;
    }
    return out;
}

StabilityReport stability_report(std::span<const Ranking> rankings, std::size_t k,
                                 double budget) {
    StabilityReport rep;
    if (rankings.size() < 2) throw ConfigError("stability report needs at least two rankings");
    double top_sum = 0.0, bottom_sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < rankings.size(); ++i) {
        for (std::size_t j = i + 1; j < rankings.size(); ++j) {
            auto rho = spearman(rankings[i], rankings[j]);
            if (!rho)
                throw DataError("degenerate Spearman for ranking pair (" +
                                std::to_string(i) + "," + std::to_string(j) + ")");
            rep.pair_spearman.push_back(*rho);
            top_sum += topk_jaccard(rankings[i], rankings[j], k, RankEnd::Top);
            bottom_sum += topk_jaccard(rankings[i], rankings[j], k, RankEnd::Bottom);
            ++pairs;
        }
    }
    double np = static_cast<double>(pairs);
    rep.mean_pairwise_spearman =
        std::accumulate(rep.pair_spearman.begin(), rep.pair_spearman.end(), 0.0) / np;
    rep.topk_jaccard = top_sum / np;
    rep.bottomk_jaccard = bottom_sum / np;
    rep.subset_overlap = subset_overlap(rankings, budget);
    return rep;
}

}  // namespace scarv

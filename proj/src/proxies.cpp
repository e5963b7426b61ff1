#include "scarv/proxies.hpp"

#include <algorithm>
#include <cmath>

#include "scarv/parallel.hpp"

namespace scarv {

ProxyKind proxy_from_string(const std::string& name) {
    if (name == "loss") return ProxyKind::Loss;
    if (name == "margin") return ProxyKind::Margin;
    if (name == "confidence") return ProxyKind::Confidence;
    if (name == "tracin") return ProxyKind::TracIn;
    throw ConfigError("unknown proxy '" + name + "'");
}

std::string proxy_to_string(ProxyKind kind) {
    switch (kind) {
        case ProxyKind::Loss: return "loss";
        case ProxyKind::Margin: return "margin";
        case ProxyKind::Confidence: return "confidence";
        case ProxyKind::TracIn: return "tracin";
    }
    return "?";
}

namespace {

std::vector<double> tracin_scores(const LinearModel& model, const FeatureSet& features,
                                  std::span<const int> labels, const ValBatch& val) {
    if (model.trace.empty())
        throw DataError("tracin proxy needs a model with a training trace");
    if (val.features.size() == 0) throw DataError("tracin proxy needs a validation batch");

    std::vector<double> scores(features.size(), 0.0);
    const std::size_t wsize = static_cast<std::size_t>(model.n_classes) * model.n_features;
    std::vector<double> val_grad_w(wsize);
    std::vector<double> val_grad_b(static_cast<std::size_t>(model.n_classes));

    for (std::size_t t = 0; t < model.trace.size(); ++t) {
        LinearModel ckpt = checkpoint_model(model, t);
        std::fill(val_grad_w.begin(), val_grad_w.end(), 0.0);
        std::fill(val_grad_b.begin(), val_grad_b.end(), 0.0);
        const double inv_val = 1.0 / static_cast<double>(val.features.size());
        for (std::size_t v = 0; v < val.features.size(); ++v) {
            add_ce_gradient(ckpt, val.features.rows[v], val.labels[v], val_grad_w,
                            val_grad_b, inv_val);
        }
        const double eta = model.trace[t].step_size;
        for (std::size_t i = 0; i < features.size(); ++i) {
            auto p = predict_proba_row(ckpt, features.rows[i]);
            double dot = 0.0;
            for (int c = 0; c < ckpt.n_classes; ++c) {
                double r = p[static_cast<std::size_t>(c)] - (c == labels[i] ? 1.0 : 0.0);
                const double* gw = val_grad_w.data() +
                                   static_cast<std::size_t>(c) * ckpt.n_features;
                double row_dot = val_grad_b[static_cast<std::size_t>(c)];
                // <grad_i, mean val grad> restricted to class c: the weight
                // gradient of example i is r * x_i, nonzero only on x_i's
                // support.
                double wpart = 0.0;
                for (const auto& [col, x] : features.rows[i]) wpart += gw[col] * x;
                dot += r * (wpart + row_dot);
            }
            scores[i] += eta * dot;
        }
    }
    return scores;
}

}  // namespace

std::vector<double> score_proxy(ProxyKind kind, const LinearModel& model,
                                const FeatureSet& features, std::span<const int> labels,
                                const ValBatch* val) {
    if (features.size() != labels.size()) throw DataError("features/labels length mismatch");
    if (kind == ProxyKind::TracIn) {
        if (!val) throw DataError("tracin proxy needs a validation batch");
        return tracin_scores(model, features, labels, *val);
    }
    std::vector<double> scores(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        auto p = predict_proba_row(model, features.rows[i]);
        double gold = p[static_cast<std::size_t>(labels[i])];
        switch (kind) {
            case ProxyKind::Loss:
                scores[i] = std::log(std::max(gold, 1e-300));
                break;
            case ProxyKind::Confidence:
                scores[i] = gold;
                break;
            case ProxyKind::Margin: {
                double best_other = 0.0;
                for (int c = 0; c < model.n_classes; ++c) {
                    if (c == labels[i]) continue;
                    best_other = std::max(best_other, p[static_cast<std::size_t>(c)]);
                }
                scores[i] = gold - best_other;
                break;
            }
            case ProxyKind::TracIn:
                break;  // handled above
        }
    }
    return scores;
}

ScoreMatrix score_matrix(const FeatureSet& features, std::span<const int> labels,
                         std::span<const ExampleId> ids, ProxyKind kind,
                         std::span<const std::uint64_t> seeds, const TrainConfig& hp,
                         const ValBatch* val, int n_classes, int jobs) {
    if (seeds.empty()) throw ConfigError("score matrix needs at least one seed");
    if (ids.size() != features.size()) throw DataError("ids/features length mismatch");

    const std::size_t n = features.size();
    const std::size_t r_count = seeds.size();
    std::vector<double> values(n * r_count);
    parallel_for(r_count, jobs, [&](std::size_t r) {
        LinearModel model = train_logreg(features, labels, seeds[r], hp, n_classes);
        auto col = score_proxy(kind, model, features, labels, val);
        for (std::size_t i = 0; i < n; ++i) values[i * r_count + r] = col[i];
    });
    return ScoreMatrix({ids.begin(), ids.end()}, {seeds.begin(), seeds.end()},
                       std::move(values));
}

LooResult loo_values(const FeatureSet& train_x, std::span<const int> train_y,
                     std::span<const ExampleId> ids, const FeatureSet& val_x,
                     std::span<const int> val_y, const TrainConfig& hp,
                     std::uint64_t seed, int n_classes, std::size_t guard,
                     bool override_guard, int jobs) {
    if (train_x.size() != train_y.size() || train_x.size() != ids.size())
        throw DataError("loo input length mismatch");
    if (val_x.size() == 0) throw ConfigError("loo needs a non-empty validation set");
    if (train_x.size() > guard && !override_guard)
        throw ConfigError("loo over " + std::to_string(train_x.size()) +
                          " examples exceeds the guard of " + std::to_string(guard) +
                          " retrainings; pass the override to proceed");

    LooResult out;
    out.ids.assign(ids.begin(), ids.end());
    LinearModel full = train_logreg(train_x, train_y, seed, hp, n_classes);
    out.utility_full = accuracy(full, val_x, val_y);

    const std::size_t n = train_x.size();
    out.values.resize(n);
    parallel_for(n, jobs, [&](std::size_t drop) {
        FeatureSet sub;
        sub.dim = train_x.dim;
        sub.rows.reserve(n - 1);
        std::vector<int> sub_y;
        sub_y.reserve(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == drop) continue;
            sub.rows.push_back(train_x.rows[i]);
            sub_y.push_back(train_y[i]);
        }
        LinearModel m = train_logreg(sub, sub_y, seed, hp, n_classes);
        out.values[drop] = out.utility_full - accuracy(m, val_x, val_y);
    });
    return out;
}

}  // namespace scarv

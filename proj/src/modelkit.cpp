#include "scarv/modelkit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "scarv/rng.hpp"
#include "scarv/textgen.hpp"

namespace scarv {

namespace {

void l2_normalize(SparseVector& v) {
    double s = 0.0;
    for (const auto& [_, x] : v) s += x * x;
    if (s == 0.0) return;
    double inv = 1.0 / std::sqrt(s);
    for (auto& [_, x] : v) x *= inv;
}

std::vector<double> softmax(std::vector<double> logits) {
    double hi = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& z : logits) {
        z = std::exp(z - hi);
        sum += z;
    }
    for (double& z : logits) z /= sum;
    return logits;
}

std::vector<double> logits_for(const LinearModel& model, const SparseVector& row) {
    std::vector<double> z(static_cast<std::size_t>(model.n_classes));
    for (int c = 0; c < model.n_classes; ++c) {
        double acc = model.bias[static_cast<std::size_t>(c)];
        const double* w = model.weights.data() +
                          static_cast<std::size_t>(c) * model.n_features;
        for (const auto& [col, x] : row) acc += w[col] * x;
        z[static_cast<std::size_t>(c)] = acc;
    }
    return z;
}

void check_dim(const LinearModel& model, const FeatureSet& features) {
    if (features.dim > model.n_features)
        throw DataError("feature dimension " + std::to_string(features.dim) +
                        " exceeds model dimension " + std::to_string(model.n_features));
}

}  // namespace

SparseVector TfidfModel::transform(const std::string& text) const {
    std::map<int, double> counts;
    for (const auto& tok : tokenize(text)) {
        auto it = vocabulary.find(tok);
        if (it != vocabulary.end()) counts[it->second] += 1.0;
    }
    SparseVector v;
    v.reserve(counts.size());
    for (const auto& [col, tf] : counts)
        v.push_back({col, tf * idf[static_cast<std::size_t>(col)]});
    l2_normalize(v);
    return v;
}

FeatureSet TfidfModel::transform_all(std::span<const std::string> texts) const {
    FeatureSet out;
    out.dim = dim();
    out.rows.reserve(texts.size());
    for (const auto& t : texts) out.rows.push_back(transform(t));
    return out;
}

std::pair<TfidfModel, FeatureSet> tfidf_fit_transform(std::span<const std::string> texts,
                                                      const TfidfConfig& cfg) {
    if (texts.empty()) throw ConfigError("tfidf needs a non-empty corpus");
    std::map<std::string, std::size_t> df;  // ordered for deterministic columns
    for (const auto& text : texts) {
        std::map<std::string, bool> seen;
        for (const auto& tok : tokenize(text)) seen[tok] = true;
        for (const auto& [tok, _] : seen) ++df[tok];
    }
    std::vector<std::pair<std::string, std::size_t>> kept;
    for (const auto& [tok, count] : df) {
        if (count >= cfg.min_df) kept.push_back({tok, count});
    }
    if (cfg.max_features > 0 && kept.size() > cfg.max_features) {
        // keep the most frequent tokens, ties by lexicographic order
        std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        kept.resize(cfg.max_features);
        std::sort(kept.begin(), kept.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    if (kept.empty()) throw DataError("tfidf vocabulary is empty after filtering");

    TfidfModel model;
    model.config = cfg;
    model.idf.resize(kept.size());
    const double n_docs = static_cast<double>(texts.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        model.vocabulary[kept[i].first] = static_cast<int>(i);
        model.idf[i] = std::log((1.0 + n_docs) / (1.0 + static_cast<double>(kept[i].second))) + 1.0;
    }
    return {model, model.transform_all(texts)};
}

LinearModel train_logreg(const FeatureSet& features, std::span<const int> labels,
                         std::uint64_t seed, const TrainConfig& hp, int n_classes) {
    if (features.size() != labels.size()) throw DataError("features/labels length mismatch");
    if (features.size() == 0) throw DataError("cannot train on an empty dataset");
    std::vector<bool> present;
    int max_label = 0;
    for (int y : labels) {
        if (y < 0) throw DataError("negative label");
        max_label = std::max(max_label, y);
    }
    if (n_classes == 0) n_classes = max_label + 1;
    if (max_label >= n_classes) throw DataError("label outside declared class set");
    present.assign(static_cast<std::size_t>(n_classes), false);
    for (int y : labels) present[static_cast<std::size_t>(y)] = true;
    if (std::count(present.begin(), present.end(), true) < 2)
        throw DataError("training needs at least two classes present");
    if (hp.epochs < 1 || hp.batch < 1) throw ConfigError("epochs and batch must be >= 1");

    LinearModel model;
    model.n_classes = n_classes;
    model.n_features = features.dim;
    model.weights.resize(static_cast<std::size_t>(n_classes) * features.dim);
    model.bias.assign(static_cast<std::size_t>(n_classes), 0.0);

    Rng rng(seed);
    for (double& w : model.weights) w = hp.init_scale * rng.normal();

    const std::size_t n = features.size();
    const std::size_t batches_per_epoch = (n + static_cast<std::size_t>(hp.batch) - 1) /
                                          static_cast<std::size_t>(hp.batch);
    const std::size_t total_steps = batches_per_epoch * static_cast<std::size_t>(hp.epochs);
    const int n_checkpoints = std::max(1, hp.checkpoints);
    std::vector<std::size_t> checkpoint_steps;
    for (int k = 1; k <= n_checkpoints; ++k)
        checkpoint_steps.push_back(total_steps * static_cast<std::size_t>(k) /
                                   static_cast<std::size_t>(n_checkpoints));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grad_b(static_cast<std::size_t>(n_classes));
    std::size_t step = 0;

    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(hp.batch)) {
            ++step;
            const std::size_t end = std::min(n, start + static_cast<std::size_t>(hp.batch));
            const double inv_batch = 1.0 / static_cast<double>(end - start);
            const double eta = hp.learning_rate / std::sqrt(static_cast<double>(step));

            if (hp.l2 > 0.0) {
                const double decay = 1.0 - eta * hp.l2;
                for (double& w : model.weights) w *= decay;
            }

            std::fill(grad_b.begin(), grad_b.end(), 0.0);
            double batch_loss = 0.0;
            for (std::size_t bi = start; bi < end; ++bi) {
                const std::size_t i = order[bi];
                const SparseVector& row = features.rows[i];
                auto p = softmax(logits_for(model, row));
                batch_loss -= std::log(std::max(p[static_cast<std::size_t>(labels[i])], 1e-300));
                for (int c = 0; c < n_classes; ++c) {
                    double r = p[static_cast<std::size_t>(c)] -
                               (c == labels[i] ? 1.0 : 0.0);
                    grad_b[static_cast<std::size_t>(c)] += r;
                    double coef = eta * inv_batch * r;
                    double* w = model.weights.data() +
                                static_cast<std::size_t>(c) * model.n_features;
                    for (const auto& [col, x] : row) w[col] -= coef * x;
                }
            }
            for (int c = 0; c < n_classes; ++c)
                model.bias[static_cast<std::size_t>(c)] -=
                    eta * inv_batch * grad_b[static_cast<std::size_t>(c)];

            if (!std::isfinite(batch_loss))
                throw DataError("training diverged at step " + std::to_string(step));

            if (std::find(checkpoint_steps.begin(), checkpoint_steps.end(), step) !=
                checkpoint_steps.end()) {
                model.trace.push_back({model.weights, model.bias, eta, step});
            }
        }
    }
    return model;
}

std::vector<double> predict_proba_row(const LinearModel& model, const SparseVector& row) {
    for (const auto& [col, _] : row) {
        if (static_cast<std::size_t>(col) >= model.n_features)
            throw DataError("feature index " + std::to_string(col) +
                            " exceeds model dimension");
    }
    return softmax(logits_for(model, row));
}

std::vector<std::vector<double>> predict_proba(const LinearModel& model,
                                               const FeatureSet& features) {
    check_dim(model, features);
    std::vector<std::vector<double>> out;
    out.reserve(features.size());
    for (const auto& row : features.rows) out.push_back(softmax(logits_for(model, row)));
    return out;
}

double accuracy(const LinearModel& model, const FeatureSet& features,
                std::span<const int> labels) {
    if (features.size() != labels.size()) throw DataError("features/labels length mismatch");
    if (features.size() == 0) throw DataError("accuracy over an empty set");
    check_dim(model, features);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        auto z = logits_for(model, features.rows[i]);
        std::size_t best = 0;
        for (std::size_t c = 1; c < z.size(); ++c) {
            if (z[c] > z[best]) best = c;
        }
        hits += (static_cast<int>(best) == labels[i]) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(features.size());
}

double mean_cross_entropy(const LinearModel& model, const FeatureSet& features,
                          std::span<const int> labels) {
    if (features.size() != labels.size()) throw DataError("features/labels length mismatch");
    check_dim(model, features);
    double loss = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        auto p = softmax(logits_for(model, features.rows[i]));
        loss -= std::log(std::max(p[static_cast<std::size_t>(labels[i])], 1e-300));
    }
    return loss / static_cast<double>(features.size());
}

void add_ce_gradient(const LinearModel& model, const SparseVector& row, int label,
                     std::span<double> grad_w, std::span<double> grad_b, double scale) {
    auto p = softmax(logits_for(model, row));
    for (int c = 0; c < model.n_classes; ++c) {
        double r = p[static_cast<std::size_t>(c)] - (c == label ? 1.0 : 0.0);
        grad_b[static_cast<std::size_t>(c)] += scale * r;
        double* g = grad_w.data() + static_cast<std::size_t>(c) * model.n_features;
        for (const auto& [col, x] : row) g[col] += scale * r * x;
    }
}

LinearModel checkpoint_model(const LinearModel& model, std::size_t index) {
    if (index >= model.trace.size()) throw DataError("checkpoint index out of range");
    LinearModel out;
    out.n_classes = model.n_classes;
    out.n_features = model.n_features;
    out.weights = model.trace[index].weights;
    out.bias = model.trace[index].bias;
    return out;
}

std::vector<double> knn_mean_cosine_distance(const FeatureSet& features, std::size_t k) {
    const std::size_t n = features.size();
    if (n < 2) throw ConfigError("knn distance needs at least two examples");
    if (k == 0) throw ConfigError("k must be >= 1");
    k = std::min(k, n - 1);

    std::vector<SparseVector> unit(n);
    std::vector<bool> zero(n, false);
    int max_col = -1;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (const auto& [col, x] : features.rows[i]) {
            s += x * x;
            max_col = std::max(max_col, col);
        }
        if (s == 0.0) {
            zero[i] = true;
            continue;
        }
        unit[i] = features.rows[i];
        double inv = 1.0 / std::sqrt(s);
        for (auto& [_, x] : unit[i]) x *= inv;
    }

    std::vector<std::vector<std::pair<std::size_t, double>>> postings(
        static_cast<std::size_t>(max_col + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [col, x] : unit[i])
            postings[static_cast<std::size_t>(col)].push_back({i, x});
    }

    std::vector<double> raw(n);
    std::vector<double> dist(n);
    std::vector<std::size_t> nn;
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(dist.begin(), dist.end(), 1.0);  // zero overlap -> distance 1
        if (!zero[i]) {
            for (const auto& [col, x] : unit[i]) {
                for (const auto& [j, y] : postings[static_cast<std::size_t>(col)]) {
                    if (j != i) dist[j] -= x * y;
                }
            }
        }
        nn.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) nn.push_back(j);
        }
        std::nth_element(nn.begin(), nn.begin() + static_cast<std::ptrdiff_t>(k - 1), nn.end(),
                         [&](std::size_t a, std::size_t b) {
                             if (dist[a] != dist[b]) return dist[a] < dist[b];
                             return a < b;
                         });
        double sum = 0.0;
        for (std::size_t t = 0; t < k; ++t) sum += std::clamp(dist[nn[t]], 0.0, 2.0);
        raw[i] = sum / static_cast<double>(k);
    }
    return minmax_normalize(raw);
}

}  // namespace scarv

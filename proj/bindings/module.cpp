// Python bindings for the main ranking, aggregation and statistics
// operations. Matrices travel as list-of-rows; cluster maps as
// {id: cluster} dicts; rankings as (order, scores) tuples.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "scarv/aggregate.hpp"
#include "scarv/evalstats.hpp"
#include "scarv/harness.hpp"
#include "scarv/mining.hpp"
#include "scarv/textgen.hpp"

namespace py = pybind11;
using namespace scarv;

namespace {

Ranking ranking_from_order(const std::vector<ExampleId>& order) {
    Ranking r;
    r.order = order;
    return r;
}

ScarvConfig config_from_dict(const py::dict& d) {
    ScarvConfig cfg;
    for (auto item : d) {
        auto key = item.first.cast<std::string>();
        if (key == "diversity_weight") cfg.diversity_weight = item.second.cast<double>();
        else if (key == "knn_k") cfg.knn_k = item.second.cast<std::size_t>();
        else if (key == "cluster_agg")
            cfg.cluster_agg = cluster_agg_from_string(item.second.cast<std::string>());
        else if (key == "alloc") cfg.alloc = alloc_from_string(item.second.cast<std::string>());
        else if (key == "shrink_lambda") cfg.shrink_lambda = item.second.cast<double>();
        else if (key == "cross_seed")
            cfg.cross_seed = cross_seed_from_string(item.second.cast<std::string>());
        else if (key == "softmax_temperature")
            cfg.softmax_temperature = item.second.cast<double>();
        else throw ConfigError("unknown config key '" + key + "'");
    }
    return cfg;
}

ClusterMap map_from_dict(const py::dict& d, const std::vector<ExampleId>& ids) {
    ClusterMap map;
    for (auto item : d)
        map.assign(item.first.cast<ExampleId>(), item.second.cast<int>());
    return map.completed(ids);
}

ScoreMatrix matrix_from_rows(const std::vector<ExampleId>& ids,
                             const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw DataError("score matrix needs at least one row");
    const std::size_t r_count = rows[0].size();
    std::vector<double> values;
    values.reserve(rows.size() * r_count);
    for (const auto& row : rows) {
        if (row.size() != r_count) throw DataError("ragged score matrix");
        values.insert(values.end(), row.begin(), row.end());
    }
    std::vector<std::uint64_t> seeds(r_count);
    for (std::size_t r = 0; r < r_count; ++r) seeds[r] = r;
    return ScoreMatrix(ids, std::move(seeds), std::move(values));
}

}  // namespace

PYBIND11_MODULE(_scarv, m) {
    m.doc() = "Stability-oriented aggregation for proxy-induced sample rankings";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);

    m.def("minmax_normalize",
          [](const std::vector<double>& scores, double epsilon) {
              return minmax_normalize(scores, epsilon);
          },
          py::arg("scores"), py::arg("epsilon") = kNormalizeEpsilon);

    m.def("fractional_ranks",
          [](const std::vector<double>& scores) { return fractional_ranks(scores); },
          py::arg("scores"));

    m.def("to_ranking",
          [](const std::vector<ExampleId>& ids, const std::vector<double>& scores,
             bool descending) {
              return to_ranking(ids, scores,
                                descending ? RankDirection::Descending
                                           : RankDirection::Ascending)
                  .order;
          },
          py::arg("ids"), py::arg("scores"), py::arg("descending") = true);

    m.def("spearman",
          [](const std::vector<double>& a, const std::vector<double>& b) -> py::object {
              auto rho = spearman(std::span<const double>(a), std::span<const double>(b));
              if (!rho) return py::none();
              return py::float_(*rho);
          },
          py::arg("a"), py::arg("b"));

    m.def("pairwise_stability",
          [](const std::vector<std::vector<ExampleId>>& orders) {
              std::vector<Ranking> ranks;
              ranks.reserve(orders.size());
              for (const auto& o : orders) ranks.push_back(ranking_from_order(o));
              return pairwise_stability(ranks);
          },
          py::arg("orders"));

    m.def("topk_jaccard",
          [](const std::vector<ExampleId>& a, const std::vector<ExampleId>& b, std::size_t k,
             const std::string& end) {
              return topk_jaccard(ranking_from_order(a), ranking_from_order(b), k,
                                  end == "bottom" ? RankEnd::Bottom : RankEnd::Top);
          },
          py::arg("a"), py::arg("b"), py::arg("k"), py::arg("end") = "top");

    m.def("subset_overlap",
          [](const std::vector<std::vector<ExampleId>>& orders, double budget) {
              std::vector<Ranking> ranks;
              ranks.reserve(orders.size());
              for (const auto& o : orders) ranks.push_back(ranking_from_order(o));
              return subset_overlap(ranks, budget);
          },
          py::arg("orders"), py::arg("budget"));

    m.def("auroc",
          [](const std::vector<double>& scores, const std::vector<bool>& positives) {
              return auroc(scores, positives);
          },
          py::arg("scores"), py::arg("positives"));

    m.def("precision_recall_at_k",
          [](const std::vector<double>& scores, const std::vector<ExampleId>& ids,
             const std::vector<bool>& positives, std::size_t k) {
              return precision_recall_at_k(scores, ids, positives, k);
          },
          py::arg("scores"), py::arg("ids"), py::arg("positives"), py::arg("k"));

    m.def("paired_bootstrap_ci",
          [](const std::vector<double>& deltas, std::size_t resamples, double level,
             std::uint64_t seed) {
              return paired_bootstrap_ci(deltas, resamples, level, seed);
          },
          py::arg("deltas"), py::arg("resamples") = 10000, py::arg("level") = 0.95,
          py::arg("seed") = 0x7e577e57ULL);

    m.def("wilcoxon_signed_rank",
          [](const std::vector<double>& deltas) {
              TestResult t = wilcoxon_signed_rank(deltas);
              py::dict out;
              out["mean_delta"] = t.mean_delta;
              out["p_value"] = t.p_value;
              out["n"] = t.n;
              out["exact"] = t.exact;
              out["degenerate"] = t.degenerate;
              return out;
          },
          py::arg("deltas"));

    m.def("threshold_clusters",
          [](const std::vector<ExampleId>& ids,
             const std::vector<std::tuple<ExampleId, ExampleId, double>>& pairs,
             double threshold) {
              std::vector<SimilarityPair> sp;
              sp.reserve(pairs.size());
              for (const auto& [a, b, s] : pairs) sp.push_back({a, b, s});
              auto map = threshold_clusters(ids, sp, threshold);
              py::dict out;
              for (ExampleId id : ids) out[py::int_(id)] = map.cluster_of(id);
              return out;
          },
          py::arg("ids"), py::arg("pairs"), py::arg("threshold"));

    m.def("chargram_jaccard_pairs",
          [](const std::vector<ExampleId>& ids, const std::vector<std::string>& texts,
             int gram_len, double threshold) {
              std::vector<std::tuple<ExampleId, ExampleId, double>> out;
              for (const auto& p : chargram_jaccard_pairs(ids, texts, gram_len, threshold))
                  out.push_back({p.a, p.b, p.similarity});
              return out;
          },
          py::arg("ids"), py::arg("texts"), py::arg("gram_len") = kDefaultGramLength,
          py::arg("threshold") = kDefaultChargramThreshold);

    m.def("cross_seed_aggregate",
          [](const std::vector<std::vector<double>>& rows, const std::string& rule) {
              const std::size_t r_count = rows.empty() ? 0 : rows[0].size();
              std::vector<std::vector<double>> columns(r_count,
                                                       std::vector<double>(rows.size()));
              for (std::size_t i = 0; i < rows.size(); ++i) {
                  if (rows[i].size() != r_count) throw DataError("ragged score matrix");
                  for (std::size_t r = 0; r < r_count; ++r) columns[r][i] = rows[i][r];
              }
              return cross_seed_aggregate(columns, cross_seed_from_string(rule));
          },
          py::arg("rows"), py::arg("rule") = "median");

    m.def("run_method",
          [](const std::string& method, const std::vector<ExampleId>& ids,
             const std::vector<std::vector<double>>& rows, const py::dict& clusters,
             const std::vector<double>& diversity, const py::dict& config) {
              auto matrix = matrix_from_rows(ids, rows);
              auto map = map_from_dict(clusters, ids);
              auto cfg = config_from_dict(config);
              Ranking r = run_method(MethodKind::parse(method), matrix, map, diversity, cfg);
              return py::make_tuple(r.order, r.scores);
          },
          py::arg("method"), py::arg("ids"), py::arg("rows"),
          py::arg("clusters") = py::dict(), py::arg("diversity") = std::vector<double>{},
          py::arg("config") = py::dict());

    m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("outer_run"),
          py::arg("role"), py::arg("index"));

    m.def("make_synthetic_corpus",
          [](std::size_t n, std::size_t vocab_size, int class_count, std::uint64_t seed) {
              Dataset d = make_synthetic_corpus(n, vocab_size, class_count, seed);
              std::vector<std::tuple<ExampleId, std::string, int>> out;
              out.reserve(d.size());
              for (const auto& e : d.examples) out.push_back({e.id, e.text, e.label});
              return out;
          },
          py::arg("n"), py::arg("vocab_size"), py::arg("class_count"), py::arg("seed"));

    m.def("perturb_text",
          [](const std::string& text, double strength, std::uint64_t seed,
             const std::vector<std::string>& vocabulary) {
              PerturbationConfig cfg;
              cfg.strength = strength;
              cfg.vocabulary = vocabulary;
              return perturb_text(text, cfg, seed);
          },
          py::arg("text"), py::arg("strength"), py::arg("seed"),
          py::arg("vocabulary") = std::vector<std::string>{});

    m.def("inject_near_duplicates",
          [](const std::vector<std::tuple<ExampleId, std::string, int>>& examples,
             double rate, double strength, std::size_t cluster_size, std::uint64_t seed) {
              Dataset d;
              int max_label = 0;
              for (const auto& [id, text, label] : examples) {
                  d.examples.push_back({id, text, label, std::nullopt, false});
                  max_label = std::max(max_label, label);
              }
              d.num_classes = max_label + 1;
              PerturbationConfig cfg;
              cfg.strength = strength;
              cfg.vocabulary = corpus_vocabulary(d);
              auto [augmented, map] = inject_near_duplicates(d, rate, cfg, cluster_size, seed);
              std::vector<std::tuple<ExampleId, std::string, int>> rows;
              rows.reserve(augmented.size());
              py::dict clusters;
              for (const auto& e : augmented.examples) {
                  rows.push_back({e.id, e.text, e.label});
                  clusters[py::int_(e.id)] = map.cluster_of(e.id);
              }
              return py::make_tuple(rows, clusters);
          },
          py::arg("examples"), py::arg("rate"), py::arg("strength") = 0.6,
          py::arg("cluster_size") = 2, py::arg("seed") = 0);

    m.def("inject_label_noise",
          [](const std::vector<std::tuple<ExampleId, std::string, int>>& examples,
             double rate, std::uint64_t seed) {
              Dataset d;
              int max_label = 0;
              for (const auto& [id, text, label] : examples) {
                  d.examples.push_back({id, text, label, std::nullopt, false});
                  max_label = std::max(max_label, label);
              }
              d.num_classes = max_label + 1;
              Dataset noisy = inject_label_noise(d, rate, seed);
              std::vector<std::tuple<ExampleId, std::string, int, bool>> out;
              out.reserve(noisy.size());
              for (const auto& e : noisy.examples)
                  out.push_back({e.id, e.text, e.label, e.flipped});
              return out;
          },
          py::arg("examples"), py::arg("rate"), py::arg("seed") = 0);
}

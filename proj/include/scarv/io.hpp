#pragma once

#include <string>
#include <vector>

#include "scarv/core.hpp"
#include "scarv/modelkit.hpp"
#include "scarv/textgen.hpp"

namespace scarv {

/// Floats in every emitted file use 6 significant digits, '.' decimal point.
std::string format_float(double v);

// Dataset JSONL: one object per line with integer `id`, `text` (or
// `text_a`/`text_b`, joined with " [SEP] "), integer `label`, optional
// `flipped` and `source_id`.
Dataset read_dataset_jsonl(const std::string& path);
void write_dataset_jsonl(const std::string& path, const Dataset& d);

// Cluster CSV: header `example_id,cluster_id`; singletons are omitted on
// write and implied on read (complete against the dataset's ids).
ClusterMap read_cluster_csv(const std::string& path);
void write_cluster_csv(const std::string& path, const ClusterMap& map);

// Score matrix CSV: header `example_id,seed_<s1>,seed_<s2>,...`. This is
// the ingestion point for externally produced score matrices.
ScoreMatrix read_score_csv(const std::string& path);
void write_score_csv(const std::string& path, const ScoreMatrix& m);

// Ranking CSV: header `position,example_id,score`.
Ranking read_ranking_csv(const std::string& path);
void write_ranking_csv(const std::string& path, const Ranking& r);

// Dense vector CSV: header `example_id,v0,v1,...`; rows become sparse
// features (zeros dropped).
std::pair<std::vector<ExampleId>, FeatureSet> read_vectors_csv(const std::string& path);

}  // namespace scarv

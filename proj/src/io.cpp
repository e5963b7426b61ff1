#include "scarv/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace scarv {

namespace {

using nlohmann::json;

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path + " for reading");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

long long parse_int(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("cannot parse " + what + " from '" + s + "'");
    }
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("cannot parse " + what + " from '" + s + "'");
    }
}

}  // namespace

std::string format_float(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

Dataset read_dataset_jsonl(const std::string& path) {
    auto in = open_in(path);
    Dataset d;
    std::unordered_set<ExampleId> seen;
    std::string line;
    std::size_t line_no = 0;
    int max_label = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        Example e;
        if (!obj.contains("id") || !obj["id"].is_number_integer())
            throw DataError(path + ":" + std::to_string(line_no) + ": missing integer id");
        e.id = obj["id"].get<ExampleId>();
        if (e.id < 0)
            throw DataError(path + ":" + std::to_string(line_no) + ": negative id");
        if (!seen.insert(e.id).second)
            throw DataError(path + ":" + std::to_string(line_no) + ": duplicate id " +
                            std::to_string(e.id));
        if (obj.contains("text")) {
            e.text = obj["text"].get<std::string>();
        } else if (obj.contains("text_a") && obj.contains("text_b")) {
            e.text = obj["text_a"].get<std::string>() + " [SEP] " +
                     obj["text_b"].get<std::string>();
        } else {
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": need `text` or `text_a`/`text_b`");
        }
        if (!obj.contains("label") || !obj["label"].is_number_integer())
            throw DataError(path + ":" + std::to_string(line_no) + ": missing integer label");
        e.label = obj["label"].get<int>();
        if (e.label < 0)
            throw DataError(path + ":" + std::to_string(line_no) + ": negative label");
        max_label = std::max(max_label, e.label);
        if (obj.contains("flipped")) e.flipped = obj["flipped"].get<bool>();
        if (obj.contains("source_id")) e.source_id = obj["source_id"].get<ExampleId>();
        d.examples.push_back(std::move(e));
    }
    if (d.examples.empty()) throw DataError(path + ": empty dataset");
    for (const auto& e : d.examples) {
        if (e.source_id && !seen.count(*e.source_id))
            throw DataError(path + ": source_id " + std::to_string(*e.source_id) +
                            " of example " + std::to_string(e.id) + " does not exist");
    }
    d.num_classes = max_label + 1;
    return d;
}

void write_dataset_jsonl(const std::string& path, const Dataset& d) {
    auto out = open_out(path);
    for (const auto& e : d.examples) {
        json obj;
        obj["id"] = e.id;
        obj["text"] = e.text;
        obj["label"] = e.label;
        if (e.flipped) obj["flipped"] = true;
        if (e.source_id) obj["source_id"] = *e.source_id;
        out << obj.dump() << '\n';
    }
}

ClusterMap read_cluster_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) !=
                                       std::vector<std::string>{"example_id", "cluster_id"})
        throw DataError(path + ": expected header example_id,cluster_id");
    ClusterMap map;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 2)
            throw DataError(path + ":" + std::to_string(line_no) + ": expected 2 fields");
        map.assign(parse_int(fields[0], "example_id"),
                   static_cast<int>(parse_int(fields[1], "cluster_id")));
    }
    return map;
}

void write_cluster_csv(const std::string& path, const ClusterMap& map) {
    auto out = open_out(path);
    out << "example_id,cluster_id\n";
    for (const auto& [cluster, members] : map.groups()) {
        if (members.size() < 2) continue;
        for (ExampleId id : members) out << id << ',' << cluster << '\n';
    }
}

ScoreMatrix read_score_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "example_id")
        throw DataError(path + ": expected header example_id,seed_<s>,...");
    std::vector<std::uint64_t> seeds;
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c].rfind("seed_", 0) != 0)
            throw DataError(path + ": seed column '" + header[c] +
                            "' must be named seed_<s>");
        seeds.push_back(static_cast<std::uint64_t>(
            parse_int(header[c].substr(5), "seed label")));
    }
    std::vector<ExampleId> ids;
    std::vector<double> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields");
        ids.push_back(parse_int(fields[0], "example_id"));
        for (std::size_t c = 1; c < fields.size(); ++c)
            values.push_back(parse_double(fields[c], "score"));
    }
    return ScoreMatrix(std::move(ids), std::move(seeds), std::move(values));
}

void write_score_csv(const std::string& path, const ScoreMatrix& m) {
    auto out = open_out(path);
    out << "example_id";
    for (std::uint64_t s : m.seed_labels()) out << ",seed_" << s;
    out << '\n';
    for (std::size_t i = 0; i < m.n_examples(); ++i) {
        out << m.example_ids()[i];
        for (std::size_t r = 0; r < m.n_seeds(); ++r) out << ',' << format_float(m.at(i, r));
        out << '\n';
    }
}

Ranking read_ranking_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) ||
        split_csv_line(line) != std::vector<std::string>{"position", "example_id", "score"})
        throw DataError(path + ": expected header position,example_id,score");
    Ranking r;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 3)
            throw DataError(path + ":" + std::to_string(line_no) + ": expected 3 fields");
        auto pos = static_cast<std::size_t>(parse_int(fields[0], "position"));
        if (pos != r.order.size())
            throw DataError(path + ":" + std::to_string(line_no) + ": positions must be " +
                            "contiguous from 0");
        r.order.push_back(parse_int(fields[1], "example_id"));
        r.scores.push_back(parse_double(fields[2], "score"));
    }
    return r;
}

void write_ranking_csv(const std::string& path, const Ranking& r) {
    auto out = open_out(path);
    out << "position,example_id,score\n";
    for (std::size_t i = 0; i < r.size(); ++i) {
        out << i << ',' << r.order[i] << ','
            << format_float(r.scores.empty() ? 0.0 : r.scores[i]) << '\n';
    }
}

std::pair<std::vector<ExampleId>, FeatureSet> read_vectors_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "example_id" || header[1] != "v0")
        throw DataError(path + ": expected header example_id,v0,v1,...");
    FeatureSet features;
    features.dim = header.size() - 1;
    std::vector<ExampleId> ids;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields");
        ids.push_back(parse_int(fields[0], "example_id"));
        SparseVector row;
        for (std::size_t c = 1; c < fields.size(); ++c) {
            double v = parse_double(fields[c], "vector entry");
            if (v != 0.0) row.push_back({static_cast<int>(c - 1), v});
        }
        features.rows.push_back(std::move(row));
    }
    return {std::move(ids), std::move(features)};
}

}  // namespace scarv

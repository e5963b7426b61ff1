#pragma once

#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace scarv {

/// Flat TOML-style `key = value` config file. Lines starting with `#` are
/// comments; values may be quoted; list values are comma separated (with
/// or without brackets). Typed getters throw ConfigError with the key name
/// on malformed values.
class KeyValueConfig {
public:
    KeyValueConfig() = default;
    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_string(const std::string& text);

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key, const std::string& fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const;
    std::vector<std::string> get_string_list(
        const std::string& key, const std::vector<std::string>& fallback) const;

    /// Keys present in the file but never read; used to warn about typos.
    std::vector<std::string> unused_keys() const;

    /// Canonical `key = value` dump (sorted), used for config hashing.
    std::string canonical() const;

private:
    std::unordered_map<std::string, std::string> values_;
    mutable std::set<std::string> touched_;
};

}  // namespace scarv

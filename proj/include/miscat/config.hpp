#pragma once

// Flat key=value run configuration: file parsing, command-line overrides,
// typed access, content fingerprinting, round-trip output. Order of first
// appearance is preserved so emitted files diff cleanly.

#include <cstdint>
#include <string>
#include <vector>

#include "miscat/grid.hpp"

namespace miscat {

struct KeyValueConfig {
    std::vector<std::pair<std::string, std::string>> entries;

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);  // replace or append

    std::string get(const std::string& key, const std::string& fallback) const;
    int get_int(const std::string& key, int fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    std::string require(const std::string& key) const;
};

// Lines are "key = value"; blank lines and lines starting with '#' are
// skipped; whitespace around key and value is trimmed.
KeyValueConfig parse_config_file(const std::string& path);

// Each override is "key=value"; malformed items raise.
void apply_overrides(KeyValueConfig& config, const std::vector<std::string>& overrides);

void write_config_file(const KeyValueConfig& config, const std::string& path);

// FNV-1a over the sorted canonical "key=value" list; insensitive to entry
// order and formatting, sensitive to every value.
std::uint64_t key_value_fingerprint(const KeyValueConfig& config);

}  // namespace miscat

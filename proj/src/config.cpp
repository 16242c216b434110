#include "miscat/config.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace miscat {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

bool KeyValueConfig::has(const std::string& key) const {
    for (const auto& [k, v] : entries)
        if (k == key) return true;
    return false;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries.emplace_back(key, value);
}

std::string KeyValueConfig::get(const std::string& key, const std::string& fallback) const {
    for (const auto& [k, v] : entries)
        if (k == key) return v;
    return fallback;
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const std::string v = require(key);
    std::size_t pos = 0;
    int out = std::stoi(v, &pos);
    if (pos != v.size()) throw error("config key '" + key + "': not an integer: " + v);
    return out;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const std::string v = require(key);
    std::size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos != v.size()) throw error("config key '" + key + "': not a number: " + v);
    return out;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = require(key);
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw error("config key '" + key + "': not a boolean: " + v);
}

std::string KeyValueConfig::require(const std::string& key) const {
    for (const auto& [k, v] : entries)
        if (k == key) return v;
    throw error("config key '" + key + "' is missing");
}

KeyValueConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open config file " + path);
    KeyValueConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw error(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw error(path + ":" + std::to_string(lineno) + ": empty key");
        cfg.set(key, value);
    }
    return cfg;
}

void apply_overrides(KeyValueConfig& config, const std::vector<std::string>& overrides) {
    for (const auto& item : overrides) {
        std::size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw error("override must be key=value: " + item);
        config.set(trim(item.substr(0, eq)), trim(item.substr(eq + 1)));
    }
}

void write_config_file(const KeyValueConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw error("cannot write config file " + path);
    for (const auto& [k, v] : config.entries) out << k << " = " << v << "\n";
}

std::uint64_t key_value_fingerprint(const KeyValueConfig& config) {
    std::vector<std::string> lines;
    lines.reserve(config.entries.size());
    for (const auto& [k, v] : config.entries) lines.push_back(k + "=" + v);
    std::sort(lines.begin(), lines.end());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& line : lines) {
        for (unsigned char c : line) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        h ^= '\n';
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace miscat

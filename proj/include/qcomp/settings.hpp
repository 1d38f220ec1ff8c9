#pragma once

// Resolved experiment configuration: a flat key=value map built from an
// optional config file overlaid with command-line flags. Typed getters
// record the defaults they fall back to, so the map handed to the output
// writers is the complete set of values a run actually used.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "qcomp/errors.hpp"

namespace qcomp {

using Config = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

inline std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

}  // namespace detail

/// Parses `key = value` lines. `#` starts a comment line; a leading `--` on
/// keys is accepted so flags can be pasted verbatim.
inline Config parse_config_text(const std::string& text) {
    Config config;
    std::stringstream stream(text);
    std::string line;
    int number = 0;
    while (std::getline(stream, line)) {
        ++number;
        line = detail::trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidParameter("config line " + std::to_string(number) + " is not key=value");
        std::string key = detail::trim(line.substr(0, eq));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        if (key.empty()) throw InvalidParameter("config line " + std::to_string(number) + " has an empty key");
        config[key] = detail::trim(line.substr(eq + 1));
    }
    return config;
}

inline Config read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

/// Keys that steer where and how a run executes but never change results.
/// They are kept out of embedded configs so identical runs write identical bytes.
inline const std::set<std::string>& runtime_only_keys() {
    static const std::set<std::string> keys{"out", "config", "workers", "format"};
    return keys;
}

class Settings {
public:
    Settings() = default;
    explicit Settings(Config values) : values_(std::move(values)) {}

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void set_default(const std::string& key, const std::string& value) { values_.try_emplace(key, value); }

    std::string text(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw InvalidParameter("missing required parameter --" + key);
        return it->second;
    }
    std::string text_or(const std::string& key, const std::string& fallback) {
        set_default(key, fallback);
        return text(key);
    }

    std::uint64_t count(const std::string& key) const { return parse_count(key, text(key)); }
    std::uint64_t count_or(const std::string& key, std::uint64_t fallback) {
        set_default(key, std::to_string(fallback));
        return count(key);
    }

    double real(const std::string& key) const { return parse_real(key, text(key)); }
    double real_or(const std::string& key, double fallback) {
        set_default(key, format_real(fallback));
        return real(key);
    }

    bool flag(const std::string& key) {
        set_default(key, "false");
        const std::string value = text(key);
        if (value == "true" || value == "1" || value == "yes") return true;
        if (value == "false" || value == "0" || value == "no") return false;
        throw InvalidParameter("--" + key + " expects true or false, got '" + value + "'");
    }

    std::vector<std::uint64_t> counts(const std::string& key) const {
        std::vector<std::uint64_t> out;
        for (const auto& item : detail::split_list(text(key))) out.push_back(parse_count(key, item));
        if (out.empty()) throw InvalidParameter("--" + key + " needs at least one value");
        return out;
    }
    std::vector<double> reals(const std::string& key) const {
        std::vector<double> out;
        for (const auto& item : detail::split_list(text(key))) out.push_back(parse_real(key, item));
        if (out.empty()) throw InvalidParameter("--" + key + " needs at least one value");
        return out;
    }

    const Config& resolved() const { return values_; }

    /// The resolved values without runtime-only keys.
    Config embedded() const {
        Config out;
        for (const auto& [key, value] : values_)
            if (!runtime_only_keys().count(key)) out.emplace(key, value);
        return out;
    }

    static std::string format_real(double value) {
        char buffer[64];
        const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
        return std::string(buffer, result.ptr);
    }

private:
    static std::uint64_t parse_count(const std::string& key, const std::string& text) {
        std::uint64_t value = 0;
        const auto* end = text.data() + text.size();
        const auto result = std::from_chars(text.data(), end, value);
        if (result.ec != std::errc{} || result.ptr != end)
            throw InvalidParameter("--" + key + " expects a nonnegative integer, got '" + text + "'");
        return value;
    }
    static double parse_real(const std::string& key, const std::string& text) {
        double value = 0.0;
        const auto* end = text.data() + text.size();
        const auto result = std::from_chars(text.data(), end, value);
        if (result.ec != std::errc{} || result.ptr != end || !std::isfinite(value))
            throw InvalidParameter("--" + key + " expects a number, got '" + text + "'");
        return value;
    }

    Config values_;
};

}  // namespace qcomp

#include "voidwave/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace voidwave {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

Real parse_real(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    std::size_t consumed = 0;
    Real value = 0.0;
    try {
        value = std::stod(t, &consumed);
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected a number, got '" + text + "'");
    }
    if (consumed != t.size()) {
        throw ConfigError(where + ": trailing characters after number in '" + text + "'");
    }
    return value;
}

long parse_int(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    long value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
        throw ConfigError(where + ": expected an integer, got '" + text + "'");
    }
    return value;
}

} // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config config;
    config.origin_ = origin;

    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_number = 0;
    int order = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const std::string where = origin + ":" + std::to_string(line_number);
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(where + ": unterminated section header '" + line + "'");
            }
            section = lower(trim(line.substr(1, line.size() - 2)));
            if (section.empty()) {
                throw ConfigError(where + ": empty section name");
            }
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
        }
        if (section.empty()) {
            throw ConfigError(where + ": entry before any [section] header");
        }
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(where + ": empty key");
        }
        auto& slot = config.sections_[section][key];
        slot = Entry{value, line_number, order++, false};
    }
    return config;
}

void Config::set_override(const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("override '" + assignment + "' must look like section.key=value");
    }
    const std::string target = trim(assignment.substr(0, eq));
    const std::size_t dot = target.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 >= target.size()) {
        throw ConfigError("override '" + assignment + "' must look like section.key=value");
    }
    auto& slot = sections_[lower(target.substr(0, dot))][lower(target.substr(dot + 1))];
    slot = Entry{trim(assignment.substr(eq + 1)), 0, 1 << 20, false};
}

const Config::Entry* Config::find(const std::string& section, const std::string& key) const {
    const auto sit = sections_.find(lower(section));
    if (sit == sections_.end()) {
        return nullptr;
    }
    const auto kit = sit->second.find(lower(key));
    if (kit == sit->second.end()) {
        return nullptr;
    }
    kit->second.used = true;
    return &kit->second;
}

const Config::Entry& Config::require(const std::string& section, const std::string& key) const {
    const Entry* entry = find(section, key);
    if (!entry) {
        throw ConfigError(origin_ + ": missing required key [" + section + "] " + key);
    }
    return *entry;
}

bool Config::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

bool Config::has_section(const std::string& section) const {
    return sections_.count(lower(section)) > 0;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
    return require(section, key).value;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    const Entry* entry = find(section, key);
    return entry ? entry->value : fallback;
}

Real Config::get_real(const std::string& section, const std::string& key) const {
    return parse_real(require(section, key).value, "[" + section + "] " + key);
}

Real Config::get_real(const std::string& section, const std::string& key, Real fallback) const {
    const Entry* entry = find(section, key);
    return entry ? parse_real(entry->value, "[" + section + "] " + key) : fallback;
}

long Config::get_int(const std::string& section, const std::string& key) const {
    return parse_int(require(section, key).value, "[" + section + "] " + key);
}

long Config::get_int(const std::string& section, const std::string& key, long fallback) const {
    const Entry* entry = find(section, key);
    return entry ? parse_int(entry->value, "[" + section + "] " + key) : fallback;
}

bool Config::get_bool(const std::string& section, const std::string& key) const {
    const std::string v = lower(trim(require(section, key).value));
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ConfigError("[" + section + "] " + key + ": expected a boolean, got '" + v + "'");
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    return find(section, key) ? get_bool(section, key) : fallback;
}

std::vector<Real> Config::get_reals(const std::string& section, const std::string& key) const {
    const std::string text = require(section, key).value;
    const std::string where = "[" + section + "] " + key;
    std::vector<Real> values;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        if (trim(item).empty()) {
            throw ConfigError(where + ": empty list item in '" + text + "'");
        }
        values.push_back(parse_real(item, where));
    }
    if (values.empty()) {
        throw ConfigError(where + ": expected at least one value");
    }
    return values;
}

Real Config::get_length(const std::string& section, const std::string& base) const {
    const bool metres = has(section, base + "_m");
    const bool millimetres = has(section, base + "_mm");
    if (metres && millimetres) {
        throw ConfigError("[" + section + "] " + base + ": give either _m or _mm, not both");
    }
    if (metres) return get_real(section, base + "_m");
    if (millimetres) return 1e-3 * get_real(section, base + "_mm");
    throw ConfigError(origin_ + ": missing required key [" + section + "] " + base +
                      "_m (or " + base + "_mm)");
}

Real Config::get_length(const std::string& section, const std::string& base,
                        Real fallback) const {
    return has_length(section, base) ? get_length(section, base) : fallback;
}

bool Config::has_length(const std::string& section, const std::string& base) const {
    return has(section, base + "_m") || has(section, base + "_mm");
}

std::vector<std::string> Config::keys_with_prefix(const std::string& section,
                                                  const std::string& prefix) const {
    std::vector<std::pair<int, std::string>> hits;
    const auto sit = sections_.find(lower(section));
    if (sit != sections_.end()) {
        for (const auto& [key, entry] : sit->second) {
            if (key.rfind(lower(prefix), 0) == 0) {
                hits.emplace_back(entry.order, key);
            }
        }
    }
    std::sort(hits.begin(), hits.end());
    std::vector<std::string> keys;
    keys.reserve(hits.size());
    for (auto& [order, key] : hits) {
        keys.push_back(std::move(key));
    }
    return keys;
}

void Config::reject_unused() const {
    std::vector<std::string> unknown;
    for (const auto& [section, entries] : sections_) {
        for (const auto& [key, entry] : entries) {
            if (!entry.used) {
                unknown.push_back("[" + section + "] " + key +
                                  (entry.line > 0 ? " (line " + std::to_string(entry.line) + ")"
                                                  : ""));
            }
        }
    }
    if (!unknown.empty()) {
        std::string message = origin_ + ": unknown configuration keys:";
        for (const std::string& item : unknown) {
            message += "\n  " + item;
        }
        throw ConfigError(message);
    }
}

} // namespace voidwave

#pragma once

#include "voidwave/core.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace voidwave {

// INI-style configuration: "[section]" headers, "key = value" entries,
// '#' comments. Every read is recorded so that unknown keys (usually
// typos) can be rejected after a driver has pulled everything it knows.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    // Applies a "section.key=value" command-line override.
    void set_override(const std::string& assignment);

    bool has(const std::string& section, const std::string& key) const;
    bool has_section(const std::string& section) const;

    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;

    Real get_real(const std::string& section, const std::string& key) const;
    Real get_real(const std::string& section, const std::string& key, Real fallback) const;

    long get_int(const std::string& section, const std::string& key) const;
    long get_int(const std::string& section, const std::string& key, long fallback) const;

    bool get_bool(const std::string& section, const std::string& key) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

    // Comma-separated list of reals ("1.0, 2.5, 4").
    std::vector<Real> get_reals(const std::string& section, const std::string& key) const;

    // Length in metres from either "<base>_m" or "<base>_mm"; exactly one
    // of the two spellings must be present unless a fallback is supplied.
    Real get_length(const std::string& section, const std::string& base) const;
    Real get_length(const std::string& section, const std::string& base, Real fallback) const;
    bool has_length(const std::string& section, const std::string& base) const;

    // Keys in `section` whose name starts with `prefix`, in file order.
    std::vector<std::string> keys_with_prefix(const std::string& section,
                                              const std::string& prefix) const;

    // Throws if any entry was never read; call once parsing is complete.
    void reject_unused() const;

    const std::string& origin() const { return origin_; }

private:
    struct Entry {
        std::string value;
        int line = 0;
        int order = 0;
        mutable bool used = false;
    };

    const Entry* find(const std::string& section, const std::string& key) const;
    const Entry& require(const std::string& section, const std::string& key) const;

    std::string origin_;
    std::map<std::string, std::map<std::string, Entry>> sections_;
};

} // namespace voidwave

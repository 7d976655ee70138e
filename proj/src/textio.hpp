#pragma once

// Small text format helpers shared by the archive, trial-log and plan
// readers. Numbers round-trip through to_chars/from_chars so files written
// on one run parse bit-identically on the next.

#include "sitemap/errors.hpp"

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sitemap::textio {

inline void append_double(std::string& out, double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, r.ptr);
}

inline double parse_double(std::string_view s, const std::string& what, std::size_t line) {
    double v;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
        throw DataError("line " + std::to_string(line) + ": bad " + what + " '" + std::string(s) + "'");
    }
    return v;
}

inline std::uint64_t parse_u64(std::string_view s, const std::string& what, std::size_t line) {
    std::uint64_t v;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
        throw DataError("line " + std::to_string(line) + ": bad " + what + " '" + std::string(s) + "'");
    }
    return v;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

} // namespace sitemap::textio

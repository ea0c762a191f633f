#pragma once

// Flat "key = value" text files. Blank lines and lines starting with '#' are
// ignored; later duplicates override earlier ones.

#include <charconv>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace cdsfcrf::kv {

using Table = std::map<std::string, std::string, std::less<>>;

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline Table parse(std::string_view text) {
    Table out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw FormatError("line " + std::to_string(line_no) + ": expected key = value");
        }
        auto key = trim(line.substr(0, eq));
        if (key.empty()) throw FormatError("line " + std::to_string(line_no) + ": empty key");
        out[std::string(key)] = std::string(trim(line.substr(eq + 1)));
    }
    return out;
}

inline std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline double to_double(std::string_view key, std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw FormatError("key '" + std::string(key) + "': not a number: " + std::string(s));
    }
    return v;
}

inline std::uint64_t to_uint(std::string_view key, std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw FormatError("key '" + std::string(key) + "': not a non-negative integer: " + std::string(s));
    }
    return v;
}

inline bool to_bool(std::string_view key, std::string_view s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw FormatError("key '" + std::string(key) + "': not a boolean: " + std::string(s));
}

inline const std::string& require(const Table& t, std::string_view key) {
    auto it = t.find(key);
    if (it == t.end()) throw FormatError("missing key '" + std::string(key) + "'");
    return it->second;
}

} // namespace cdsfcrf::kv

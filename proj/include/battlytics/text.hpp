#pragma once

#include <charconv>
#include <string>
#include <string_view>

namespace battlytics::text {

/// Shortest representation that parses back to the same double; plain decimal
/// notation in the usual range so timestamps stay readable.
inline std::string format_double(double v) {
    char buf[512];
    const double a = v < 0 ? -v : v;
    const auto fmt = (a == 0.0 || (a >= 1e-4 && a < 1e16)) ? std::chars_format::fixed : std::chars_format::general;
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, fmt);
    return std::string(buf, res.ptr);
}

inline std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace battlytics::text

#pragma once

#include <charconv>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace satmec {

/// Shortest round-trip decimal form; identical on every run and platform.
inline std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep = ";") {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

inline std::string join_numbers(const std::vector<double>& v, std::string_view sep = ";") {
    std::vector<std::string> parts;
    parts.reserve(v.size());
    for (double d : v) parts.push_back(format_number(d));
    return join(parts, sep);
}

/// Fields never contain commas or quotes in this project, so no quoting.
inline void write_csv_row(std::ostream& os, std::initializer_list<std::string> fields) {
    bool first = true;
    for (const auto& f : fields) {
        if (!first) os << ',';
        os << f;
        first = false;
    }
    os << '\n';
}

} // namespace satmec

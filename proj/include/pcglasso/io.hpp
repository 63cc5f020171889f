#pragma once

// Plain numeric CSV: one matrix row per line, comma separated. Matrix files carry no
// header; data files may start with a non-numeric header row.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pcglasso/core.hpp"

namespace pcglasso::io {

struct Table {
    std::vector<std::string> header;  ///< empty when the file had none
    Matrix values;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline bool parse_double(std::string_view s, double& v) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

}  // namespace detail

inline Table parse_table(std::istream& in, bool allow_header) {
    Table t;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split(line);
        std::vector<double> row(cells.size());
        bool numeric = true;
        for (std::size_t k = 0; k < cells.size(); ++k)
            if (!detail::parse_double(cells[k], row[k])) numeric = false;
        if (!numeric) {
            if (allow_header && rows.empty() && t.header.empty()) {
                for (auto c : cells) t.header.emplace_back(c);
                continue;
            }
            throw DataError("line " + std::to_string(lineno) + ": non-numeric value");
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw DataError("line " + std::to_string(lineno) + ": expected " +
                            std::to_string(rows.front().size()) + " columns, found " +
                            std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("no numeric rows");
    if (!t.header.empty() && t.header.size() != rows.front().size())
        throw DataError("header has " + std::to_string(t.header.size()) + " fields but rows have " +
                        std::to_string(rows.front().size()));
    t.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            t.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    return t;
}

inline Table read_table(const std::string& path, bool allow_header) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    try {
        return parse_table(in, allow_header);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

/// Observations in rows, variables in columns, optional header.
inline Table read_data_csv(const std::string& path) {
    Table t = read_table(path, true);
    if (t.values.cols() == 0) throw DataError(path + ": no columns");
    return t;
}

/// Headerless symmetric matrix.
inline Matrix read_matrix_csv(const std::string& path) {
    Table t = read_table(path, false);
    if (t.values.rows() != t.values.cols()) throw DataError(path + ": matrix is not square");
    if (!is_symmetric(t.values)) throw DataError(path + ": matrix is not symmetric");
    return std::move(t.values);
}

/// Shortest round-trip representation (17 significant digits).
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_matrix(std::ostream& out, const Matrix& m) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

inline void write_matrix_csv(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    write_matrix(out, m);
}

}  // namespace pcglasso::io

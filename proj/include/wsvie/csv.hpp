#pragma once

#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "matrix.hpp"

namespace wsvie::csv {

/// Scientific notation, 9 significant digits. Fixed so reruns diff cleanly.
inline std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.8e", v);
    return buf;
}

inline void header(std::ostream& out, std::span<const std::string_view> columns) {
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << '\n';
}

inline void row(std::ostream& out, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << number(values[i]);
    out << '\n';
}

inline void matrix(std::ostream& out, const Matrix& M) {
    for (std::size_t i = 0; i < M.rows(); ++i) row(out, M.row(i));
}

}  // namespace wsvie::csv

#pragma once

#include <opmean/hpdcore.hpp>

#include <algorithm>
#include <cmath>

namespace testing_support {

inline double max_abs_diff(const opmean::Matrix& a, const opmean::Matrix& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
    return d;
}

inline double rel_diff(const opmean::Matrix& a, const opmean::Matrix& b) {
    return (a - b).frobenius() / std::max(1e-300, b.frobenius());
}

inline opmean::Matrix real_matrix(std::initializer_list<std::initializer_list<double>> rows) {
    opmean::Matrix m(rows.size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

}  // namespace testing_support

#pragma once

// Scalar utilities shared by the representing-function and log-map code:
// the canonical log-spaced grid and a bracketed solver for increasing maps.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>

#include "error.hpp"

namespace opmean {

// Shortest of %.15g/%.16g/%.17g that reads back to the same double.
inline std::string format_double(double x) {
    char buf[40];
    for (int digits : {15, 16}) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, x);
        if (std::strtod(buf, nullptr) == x) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

using ScalarFn = std::function<double(double)>;

// 64 log-spaced points in [1e-4, 1e4].
inline const std::array<double, 64>& test_grid() {
    static const std::array<double, 64> grid = [] {
        std::array<double, 64> g{};
        for (int i = 0; i < 64; ++i) g[i] = std::pow(10.0, -4.0 + 8.0 * i / 63.0);
        g[0] = 1e-4;
        g[63] = 1e4;
        return g;
    }();
    return grid;
}

namespace detail {

// Solves phi(x) = y on [lo, hi] for increasing phi with phi(lo) <= y <= phi(hi).
// phi may return -inf/+inf as out-of-domain sentinels; those points only
// move the bracket. Illinois steps with a bisection fallback.
template <class Phi>
double solve_increasing(Phi&& phi, double y, double lo, double hi, double flo, double fhi) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    int side = 0;
    int stalled = 0;
    double prev_width = hi - lo;
    for (int it = 0; it < 400; ++it) {
        double x;
        const bool secant = std::isfinite(flo) && std::isfinite(fhi) && stalled < 3;
        if (secant) {
            x = (lo * fhi - hi * flo) / (fhi - flo);
        } else {
            x = (lo > 0.0 && hi > 4.0 * lo) ? std::sqrt(lo) * std::sqrt(hi) : 0.5 * (lo + hi);
            stalled = 0;
        }
        if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
        if (!(x > lo && x < hi)) break;  // no representable interior point

        const double fx = phi(x) - y;
        if (std::isnan(fx)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "scalar inversion: function is undefined at " << x;
            throw range_error(msg.str());
        }
        if (fx == 0.0) return x;
        if (fx < 0.0) {
            lo = x;
            flo = fx;
            if (side == -1 && std::isfinite(fhi)) fhi *= 0.5;
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if (side == +1 && std::isfinite(flo)) flo *= 0.5;
            side = +1;
        }
        const double width = hi - lo;
        if (width <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi))) break;
        stalled = (width > 0.5 * prev_width) ? stalled + 1 : 0;
        prev_width = width;
    }
    if (!std::isfinite(flo)) return hi;
    if (!std::isfinite(fhi)) return lo;
    return std::abs(flo) <= std::abs(fhi) ? lo : hi;
}

// Non-throwing inversion over (0, inf): expands geometrically from the hint
// (default [1,1]) within [1e-12, 1e12]. Empty if y is out of reach.
template <class Phi>
std::optional<double> try_invert(Phi&& phi, double y, std::optional<std::pair<double, double>> hint = std::nullopt) {
    constexpr double lo_limit = 1e-12, hi_limit = 1e12;
    double lo = 1.0, hi = 1.0;
    if (hint) {
        lo = std::max(lo_limit, hint->first);
        hi = std::min(hi_limit, hint->second);
        if (!(lo <= hi)) lo = hi = 1.0;
    }
    double flo = phi(lo) - y;
    double fhi = (hi == lo) ? flo : phi(hi) - y;
    while (!(fhi >= 0.0)) {
        if (std::isnan(fhi) || hi >= hi_limit) return std::nullopt;
        lo = hi;
        flo = fhi;
        hi = std::min(hi_limit, 2.0 * hi);
        fhi = phi(hi) - y;
    }
    while (!(flo <= 0.0)) {
        if (std::isnan(flo) || lo <= lo_limit) return std::nullopt;
        hi = lo;
        fhi = flo;
        lo = std::max(lo_limit, 0.5 * lo);
        flo = phi(lo) - y;
    }
    return solve_increasing(phi, y, lo, hi, flo, fhi);
}

}  // namespace detail

// Inverse of a strictly increasing function on (0, inf).
inline double scalar_invert(const ScalarFn& phi, double y,
                            std::optional<std::pair<double, double>> bracket_hint = std::nullopt) {
    if (auto x = detail::try_invert(phi, y, bracket_hint)) return *x;
    std::ostringstream msg;
    msg.precision(17);
    msg << "scalar inversion: value " << y << " is outside the range reached on [1e-12, 1e12]";
    throw range_error(msg.str());
}

}  // namespace opmean

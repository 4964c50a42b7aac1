#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hpdcore.hpp"

namespace opmean {

struct ThompsonDistance {
    double value = 0.0;
    operator double() const noexcept { return value; }
};

struct ContractionEstimate {
    double rho;
    double r;
    double a;
    double b;
};

namespace detail {

// Eigenvalues of B^{-1/2} A B^{-1/2}, ascending.
inline std::vector<double> relative_spectrum(const PdMatrix& a, const PdMatrix& b) {
    a.mat().check_same(b.mat());
    const HermMatrix ib = apply_fn(b.eig(), [](double x) { return 1.0 / std::sqrt(x); });
    return eigh(congruence(ib, a.mat())).values;
}

}  // namespace detail

// Largest eigenvalue of B^{-1/2} A B^{-1/2}.
inline double mratio(const PdMatrix& a, const PdMatrix& b) { return detail::relative_spectrum(a, b).back(); }

// Evaluated from both orderings so that d_inf(a, b) == d_inf(b, a) bit for bit.
inline ThompsonDistance d_inf(const PdMatrix& a, const PdMatrix& b) {
    const auto mu = detail::relative_spectrum(a, b);
    const auto nu = detail::relative_spectrum(b, a);
    return {std::max({0.0, std::log(mu.back()), -std::log(mu.front()), std::log(nu.back()), -std::log(nu.front())})};
}

// d(X, X + D) given the eigenvalues of X^{-1/2} D X^{-1/2}.
inline ThompsonDistance d_inf_step(const std::vector<double>& relative_increment) {
    double d = 0.0;
    for (double m : relative_increment) d = std::max(d, std::abs(std::log1p(m)));
    return {d};
}

// A <= B up to tol: smallest eigenvalue of B - A >= -tol max(1, ||B||_2).
inline bool order_leq(const HermMatrix& a, const HermMatrix& b, double tol) {
    a.mat().check_same(b.mat());
    const auto eb = eigh(b).values;
    const double scale = std::max({1.0, std::abs(eb.front()), std::abs(eb.back())});
    return eigh(b - a).values.front() >= -tol * scale;
}

// Smallest eigenvalue of B - A divided by max(1, ||B||_2); order_leq is margin >= -tol.
inline double order_margin(const HermMatrix& a, const HermMatrix& b) {
    const auto eb = eigh(b).values;
    const double scale = std::max({1.0, std::abs(eb.front()), std::abs(eb.back())});
    return eigh(b - a).values.front() / scale;
}

// Contraction coefficient of X -> aA + bX on the d_inf ball of radius r about A.
inline ContractionEstimate rho_affine(double r, double a, double b) {
    if (!(r > 0.0 && a > 0.0 && b > 0.0)) throw domain_error("rho_affine: r, a and b must be positive");
    const double big_r = r + std::abs(std::log(a) - std::log(b));
    const double rho = std::log((std::exp(-big_r) + std::exp(2.0 * r)) / (std::exp(-big_r) + 1.0)) / (2.0 * r);
    return {rho, r, a, b};
}

// Upper bound for d_inf(sum A_i, sum B_i) from pairwise distances; m is the
// first index attaining max dist_ab.
inline double weighted_upper_bound(const std::vector<double>& dist_ab, const std::vector<double>& cross_a,
                                   const std::vector<double>& cross_b) {
    if (dist_ab.empty()) throw domain_error("weighted_upper_bound: empty input");
    if (cross_a.size() != dist_ab.size() || cross_b.size() != dist_ab.size())
        throw dimension_error("weighted_upper_bound: lists differ in length");
    auto side = [&](const std::vector<double>& cross) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < dist_ab.size(); ++i) {
            const double w = std::exp(-cross[i]);
            num += std::exp(dist_ab[i]) * w;
            den += w;
        }
        return num / den;
    };
    return std::log(std::max(side(cross_a), side(cross_b)));
}

// Index m used by weighted_upper_bound.
inline std::size_t weighted_bound_index(const std::vector<double>& dist_ab) {
    return static_cast<std::size_t>(std::max_element(dist_ab.begin(), dist_ab.end()) - dist_ab.begin());
}

}  // namespace opmean

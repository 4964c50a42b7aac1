#pragma once

// Seeded random instances: unitaries, positive-definite matrices, simplex weights.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "hpdcore.hpp"

namespace opmean {

using Rng = std::mt19937_64;

// Haar-like unitary from Gram-Schmidt on a complex Gaussian matrix.
inline Matrix random_unitary(std::size_t n, Rng& rng) {
    std::normal_distribution<double> gauss;
    Matrix z(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) z(i, j) = cplx(gauss(rng), gauss(rng));
    for (std::size_t c = 0; c < n; ++c) {
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t p = 0; p < c; ++p) {
                cplx d = 0;
                for (std::size_t r = 0; r < n; ++r) d += std::conj(z(r, p)) * z(r, c);
                for (std::size_t r = 0; r < n; ++r) z(r, c) -= d * z(r, p);
            }
        double norm = 0;
        for (std::size_t r = 0; r < n; ++r) norm += std::norm(z(r, c));
        norm = std::sqrt(norm);
        for (std::size_t r = 0; r < n; ++r) z(r, c) /= norm;
    }
    return z;
}

// U diag(exp(g_i)) U* with g_i uniform in [-spread, spread].
inline PdMatrix random_pd(std::size_t n, Rng& rng, double spread = 1.5) {
    std::uniform_real_distribution<double> g(-spread, spread);
    std::vector<double> d(n);
    for (auto& x : d) x = std::exp(g(rng));
    const Matrix u = random_unitary(n, rng);
    return PdMatrix(u * Matrix::diagonal(d) * u.adjoint());
}

// Diagonal entries in exp([-spread, spread]).
inline PdMatrix random_diagonal_pd(std::size_t n, Rng& rng, double spread = 1.5) {
    std::uniform_real_distribution<double> g(-spread, spread);
    std::vector<double> d(n);
    for (auto& x : d) x = std::exp(g(rng));
    return PdMatrix::diagonal(d);
}

// U diag(exp(g)) V with independent unitaries; condition number <= e^{2 spread}.
inline Matrix random_invertible(std::size_t n, Rng& rng, double spread = 1.0) {
    std::uniform_real_distribution<double> g(-spread, spread);
    std::vector<double> d(n);
    for (auto& x : d) x = std::exp(g(rng));
    const Matrix u = random_unitary(n, rng);
    const Matrix v = random_unitary(n, rng);
    return u * Matrix::diagonal(d) * v;
}

// Positive weights from uniform(0.2, 1), normalized.
inline std::vector<double> random_weights(std::size_t k, Rng& rng) {
    std::uniform_real_distribution<double> g(0.2, 1.0);
    std::vector<double> w(k);
    double s = 0;
    for (auto& x : w) s += (x = g(rng));
    for (auto& x : w) x /= s;
    return w;
}

// A^{1/2} exp(H) A^{1/2} with H Hermitian, ||H||_2 <= r: a point of the
// closed d_inf ball of radius r about A.
inline PdMatrix sample_ball(const PdMatrix& a, double r, Rng& rng) {
    std::uniform_real_distribution<double> g(-r, r);
    std::vector<double> h(a.size());
    for (auto& x : h) x = std::exp(g(rng));
    const Matrix u = random_unitary(a.size(), rng);
    const HermMatrix half = apply_fn(a.eig(), [](double x) { return std::sqrt(x); });
    return PdMatrix(half.mat() * u * Matrix::diagonal(h) * u.adjoint() * half.mat());
}

}  // namespace opmean

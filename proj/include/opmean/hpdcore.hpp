#pragma once

// Dense complex Hermitian matrices, a cyclic Jacobi eigensolver and the
// functional calculus built on it.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "scalar.hpp"

namespace opmean {

using cplx = std::complex<double>;

// General square complex matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n) : n_(n), a_(n * n) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static Matrix diagonal(const std::vector<double>& d) {
        Matrix m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t size() const noexcept { return n_; }
    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    Matrix adjoint() const {
        Matrix r(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    double frobenius() const {
        double s = 0;
        for (const auto& z : a_) s += std::norm(z);
        return std::sqrt(s);
    }

    Matrix& operator+=(const Matrix& o) {
        check_same(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    Matrix& operator*=(double s) {
        for (auto& z : a_) z *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }
    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        a.check_same(b);
        const std::size_t n = a.n_;
        Matrix r(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx{}) continue;
                for (std::size_t j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }

    void check_same(const Matrix& o) const {
        if (o.n_ != n_)
            throw dimension_error("matrix dimension mismatch: " + std::to_string(n_) +
                                  " vs " + std::to_string(o.n_));
    }

private:
    std::size_t n_ = 0;
    std::vector<cplx> a_;
};

// Hermitian matrix; symmetrized as (H + H*)/2 on construction.
class HermMatrix {
public:
    HermMatrix() = default;
    explicit HermMatrix(Matrix m) : m_(std::move(m)) {
        if (m_.size() == 0) throw dimension_error("Hermitian matrix must have n >= 1");
        const std::size_t n = m_.size();
        for (std::size_t i = 0; i < n; ++i) {
            m_(i, i) = m_(i, i).real();
            for (std::size_t j = i + 1; j < n; ++j) {
                const cplx v = 0.5 * (m_(i, j) + std::conj(m_(j, i)));
                m_(i, j) = v;
                m_(j, i) = std::conj(v);
            }
        }
    }

    static HermMatrix identity(std::size_t n) { return HermMatrix(Matrix::identity(n)); }
    static HermMatrix diagonal(const std::vector<double>& d) { return HermMatrix(Matrix::diagonal(d)); }

    std::size_t size() const noexcept { return m_.size(); }
    const cplx& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    const Matrix& mat() const noexcept { return m_; }
    operator const Matrix&() const noexcept { return m_; }
    double frobenius() const { return m_.frobenius(); }
    double trace() const {
        double s = 0;
        for (std::size_t i = 0; i < size(); ++i) s += m_(i, i).real();
        return s;
    }

    friend HermMatrix operator+(const HermMatrix& a, const HermMatrix& b) { return HermMatrix(a.m_ + b.m_); }
    friend HermMatrix operator-(const HermMatrix& a, const HermMatrix& b) { return HermMatrix(a.m_ - b.m_); }
    friend HermMatrix operator*(double s, const HermMatrix& a) { return HermMatrix(s * a.m_); }
    friend HermMatrix operator*(const HermMatrix& a, double s) { return HermMatrix(s * a.m_); }

private:
    Matrix m_;
};

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    Matrix vectors;              // columns are eigenvectors
};

namespace detail {

inline constexpr int jacobi_max_sweeps = 64;
inline constexpr double jacobi_rel_threshold = 1e-14;

inline double off_diagonal_norm(const Matrix& a) {
    double s = 0;
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

// Rotation in the (p,q) plane: a phase that makes a_pq real, then a real
// Jacobi rotation that annihilates it.
inline void jacobi_rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
    const std::size_t n = a.size();
    const cplx apq = a(p, q);
    const double r = std::abs(apq);
    if (r == 0.0) return;
    const cplx phase = apq / r;  // e^{i phi}
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();
    const double tau = (aqq - app) / (2.0 * r);
    const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    // G = diag(1, conj(phase)) * [[c, s], [-s, c]] restricted to (p, q).
    const cplx gpp = c, gpq = s;
    const cplx gqp = -s * std::conj(phase), gqq = c * std::conj(phase);

    for (std::size_t k = 0; k < n; ++k) {
        const cplx akp = a(k, p), akq = a(k, q);
        a(k, p) = akp * gpp + akq * gqp;
        a(k, q) = akp * gpq + akq * gqq;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const cplx apk = a(p, k), aqk = a(q, k);
        a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
        a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const cplx vkp = v(k, p), vkq = v(k, q);
        v(k, p) = vkp * gpp + vkq * gqp;
        v(k, q) = vkp * gpq + vkq * gqq;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = app - t * r;
    a(q, q) = aqq + t * r;
}

// U diag(d) U*, Hermitian by construction.
inline HermMatrix reassemble(const Matrix& u, const std::vector<double>& d) {
    const std::size_t n = u.size();
    Matrix r(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            cplx s = 0;
            for (std::size_t k = 0; k < n; ++k) s += u(i, k) * d[k] * std::conj(u(j, k));
            r(i, j) = s;
            r(j, i) = std::conj(s);
        }
    return HermMatrix(std::move(r));
}

}  // namespace detail

inline EigenDecomposition eigh(const HermMatrix& h) {
    const std::size_t n = h.size();
    Matrix a = h.mat();
    Matrix v = Matrix::identity(n);
    const double scale = a.frobenius();
    const double threshold = detail::jacobi_rel_threshold * scale;

    int sweep = 0;
    double off = detail::off_diagonal_norm(a);
    while (off > threshold) {
        if (sweep++ == detail::jacobi_max_sweeps) {
            std::ostringstream msg;
            msg << "Jacobi eigensolver did not converge after " << detail::jacobi_max_sweeps
                << " sweeps; off-diagonal norm " << off;
            throw convergence_error(msg.str());
        }
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) detail::jacobi_rotate(a, v, p, q);
        off = detail::off_diagonal_norm(a);
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    EigenDecomposition e{std::vector<double>(n), Matrix(n)};
    for (std::size_t c = 0; c < n; ++c) {
        e.values[c] = a(order[c], order[c]).real();
        for (std::size_t r = 0; r < n; ++r) e.vectors(r, c) = v(r, order[c]);
    }
    return e;
}

// Applies phi to the spectrum of the decomposed matrix.
template <class Fn>
HermMatrix apply_fn(const EigenDecomposition& e, Fn&& phi) {
    std::vector<double> d(e.values.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double lam = e.values[i];
        double y;
        try {
            y = phi(lam);
        } catch (const std::exception& ex) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "function evaluation failed at eigenvalue " << lam << ": " << ex.what();
            throw range_error(msg.str());
        }
        if (!std::isfinite(y)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "function evaluation is not finite at eigenvalue " << lam;
            throw range_error(msg.str());
        }
        d[i] = y;
    }
    return detail::reassemble(e.vectors, d);
}

template <class Fn>
HermMatrix apply_fn(const HermMatrix& a, Fn&& phi) {
    return apply_fn(eigh(a), std::forward<Fn>(phi));
}

// Positive-definite Hermitian matrix. The eigendecomposition computed by the
// positivity gate is kept and reused by the square root and the inverse.
class PdMatrix {
public:
    explicit PdMatrix(HermMatrix h) : h_(std::move(h)) {
        auto e = eigh(h_);
        if (!(e.values.front() > 0.0)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "matrix is not positive definite: smallest eigenvalue " << e.values.front();
            throw not_positive_definite(msg.str(), e.values.front());
        }
        eig_ = std::make_shared<const EigenDecomposition>(std::move(e));
    }
    explicit PdMatrix(Matrix m) : PdMatrix(HermMatrix(std::move(m))) {}

    static PdMatrix identity(std::size_t n) { return PdMatrix(HermMatrix::identity(n)); }
    static PdMatrix diagonal(const std::vector<double>& d) { return PdMatrix(HermMatrix::diagonal(d)); }

    std::size_t size() const noexcept { return h_.size(); }
    const cplx& operator()(std::size_t i, std::size_t j) const { return h_(i, j); }
    const HermMatrix& herm() const noexcept { return h_; }
    const Matrix& mat() const noexcept { return h_.mat(); }
    operator const HermMatrix&() const noexcept { return h_; }
    const EigenDecomposition& eig() const noexcept { return *eig_; }
    double min_eig() const noexcept { return eig_->values.front(); }
    double max_eig() const noexcept { return eig_->values.back(); }
    double frobenius() const { return h_.frobenius(); }

private:
    HermMatrix h_;
    std::shared_ptr<const EigenDecomposition> eig_;
};

inline PdMatrix operator+(const PdMatrix& a, const PdMatrix& b) { return PdMatrix(a.herm() + b.herm()); }
inline PdMatrix operator*(double s, const PdMatrix& a) { return PdMatrix(s * a.herm()); }

inline PdMatrix sqrt_pd(const PdMatrix& a) {
    return PdMatrix(apply_fn(a.eig(), [](double x) { return std::sqrt(x); }));
}
inline PdMatrix inv_pd(const PdMatrix& a) {
    return PdMatrix(apply_fn(a.eig(), [](double x) { return 1.0 / x; }));
}
inline PdMatrix inv_sqrt_pd(const PdMatrix& a) {
    return PdMatrix(apply_fn(a.eig(), [](double x) { return 1.0 / std::sqrt(x); }));
}

namespace detail {

// C A C* without a condition check.
inline HermMatrix congruence(const Matrix& c, const Matrix& a) { return HermMatrix(c * a * c.adjoint()); }

inline double condition_estimate(const Matrix& c) {
    const auto e = eigh(HermMatrix(c.adjoint() * c));
    if (!(e.values.front() > 0.0)) return std::numeric_limits<double>::infinity();
    return std::sqrt(e.values.back() / e.values.front());
}

}  // namespace detail

inline PdMatrix congruence(const Matrix& c, const PdMatrix& a) {
    c.check_same(a.mat());
    const double cond = detail::condition_estimate(c);
    if (!(cond <= 1e14)) {
        std::ostringstream msg;
        msg << "congruence matrix is numerically singular (condition estimate " << cond << ")";
        throw domain_error(msg.str());
    }
    return PdMatrix(detail::congruence(c, a.mat()));
}

// A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2} for any scalar callable f.
template <class F>
PdMatrix mean_eval(const F& f, const PdMatrix& a, const PdMatrix& b) {
    a.mat().check_same(b.mat());
    const auto& e = a.eig();
    const HermMatrix half = apply_fn(e, [](double x) { return std::sqrt(x); });
    const HermMatrix inv_half = apply_fn(e, [](double x) { return 1.0 / std::sqrt(x); });
    const HermMatrix c = detail::congruence(inv_half, b.mat());
    const HermMatrix fc = apply_fn(c, [&](double x) { return f(x); });
    return PdMatrix(detail::congruence(half, fc));
}

// Matrix text format: n, then n rows of tokens `re` or `re,im`.
inline HermMatrix read_matrix(std::istream& in, const std::string& source = "<stream>") {
    auto fail = [&](const std::string& why) { throw parse_error(source + ": " + why); };
    std::string line;
    long long n = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        if (!(ls >> n) || n < 1) fail("first line must be a positive integer dimension");
        std::string extra;
        if (ls >> extra) fail("unexpected token after dimension: " + extra);
        break;
    }
    if (n < 1) fail("missing dimension line");
    const auto dim = static_cast<std::size_t>(n);
    Matrix m(dim);
    std::size_t row = 0;
    while (row < dim && std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string tok;
        std::size_t col = 0;
        while (ls >> tok) {
            if (col == dim) fail("row " + std::to_string(row + 1) + " has more than " + std::to_string(dim) + " entries");
            const auto comma = tok.find(',');
            try {
                std::size_t used = 0;
                const std::string re = tok.substr(0, comma);
                double x = std::stod(re, &used);
                if (used != re.size()) fail("bad number '" + tok + "'");
                double y = 0;
                if (comma != std::string::npos) {
                    const std::string im = tok.substr(comma + 1);
                    y = std::stod(im, &used);
                    if (used != im.size()) fail("bad number '" + tok + "'");
                }
                if (!std::isfinite(x) || !std::isfinite(y)) fail("non-finite entry '" + tok + "'");
                m(row, col) = cplx(x, y);
            } catch (const std::logic_error&) {
                fail("bad number '" + tok + "'");
            }
            ++col;
        }
        if (col != dim) fail("row " + std::to_string(row + 1) + " has " + std::to_string(col) + " entries, expected " + std::to_string(dim));
        ++row;
    }
    if (row != dim) fail("expected " + std::to_string(dim) + " rows, found " + std::to_string(row));

    double asym = 0;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) asym = std::max(asym, std::abs(m(i, j) - std::conj(m(j, i))));
    if (asym > 1e-12 * (1.0 + m.frobenius())) fail("matrix is not Hermitian");
    return HermMatrix(std::move(m));
}

inline HermMatrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open matrix file " + path);
    return read_matrix(in, path);
}

// Entries are written with 17 significant digits.
inline void write_matrix(std::ostream& out, const HermMatrix& a) {
    auto digits17 = [](double x) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    const std::size_t n = a.size();
    out << n << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j) out << ' ';
            const cplx z = a(i, j);
            out << digits17(z.real());
            if (z.imag() != 0.0) out << ',' << digits17(z.imag());
        }
        out << '\n';
    }
}

inline void write_matrix_file(const std::string& path, const HermMatrix& a) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write matrix file " + path);
    write_matrix(out, a);
}

}  // namespace opmean

#pragma once

// Logarithm maps of means: the Koenigs limit (f^n(x) - 1) / f'(1)^n,
// closed-form power pairs, the affine pair (f - 1)/f'(1), semigroups
// exp_I(t log_I) and a Loewner-matrix probe for operator monotonicity.

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hpdcore.hpp"
#include "kubo.hpp"
#include "scalar.hpp"

namespace opmean {

namespace detail {

[[noreturn]] inline void koenigs_failure(const char* what, int n, double a, double b) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "Koenigs iteration " << what << " after " << n << " steps (last iterates " << a << ", " << b << ")";
    throw convergence_error(msg.str());
}

// Koenigs limit started either from x (x_space) or from u = x - 1.
inline double koenigs_core(const RepresentingFunction& f, double start, bool x_space, double tol, int max_iter) {
    const double t = f.tprime();
    if (!f.nontrivial()) throw domain_error("Koenigs iteration needs 0 < f'(1) < 1, got " + format_double(t));
    const double log_t = std::log(t);
    int n = 0;
    double u;
    if (x_space) {
        double x = start;
        if (!(x > 0.0) || !std::isfinite(x)) throw domain_error("Koenigs iteration needs x > 0");
        if (x == 1.0) return 0.0;
        // Far from 1, iterate f itself; x - 1 becomes exact once x is in [0.5, 2].
        while (x < 0.5 || x > 2.0) {
            const double next = f(x);
            ++n;
            if (!(next > 0.0) || !std::isfinite(next)) koenigs_failure("left (0, inf)", n, x, next);
            if (n >= max_iter) koenigs_failure("did not reach a neighbourhood of 1", n, x, next);
            x = next;
        }
        u = x - 1.0;
    } else {
        u = start;
        if (!(u > -1.0) || !std::isfinite(u)) throw domain_error("Koenigs iteration needs 1 + u > 0");
        if (u == 0.0) return 0.0;
    }
    double r_prev = u * std::exp(-n * log_t);
    while (true) {
        u = f.shifted(u);
        ++n;
        if (!(u > -1.0) || !std::isfinite(u)) koenigs_failure("left (0, inf)", n, r_prev, u);
        const double scale = std::exp(-n * log_t);
        if (std::abs(u) < std::numeric_limits<double>::min() || !std::isfinite(scale)) return r_prev;
        const double r = u * scale;
        if (std::abs(r - r_prev) < tol * std::max(1.0, std::abs(r_prev))) return r;
        if (n >= max_iter) koenigs_failure("did not stabilize", n, r_prev, r);
        r_prev = r;
    }
}

}  // namespace detail

inline constexpr double koenigs_default_tol = 1e-14;
inline constexpr int koenigs_max_iter = 300;

inline double koenigs_log(const RepresentingFunction& f, double x, double tol = koenigs_default_tol,
                          int max_iter = koenigs_max_iter) {
    return detail::koenigs_core(f, x, true, tol, max_iter);
}

// log_I(1 + u).
inline double koenigs_log_shifted(const RepresentingFunction& f, double u, double tol = koenigs_default_tol,
                                  int max_iter = koenigs_max_iter) {
    if (u >= -0.5 && u <= 1.0) return detail::koenigs_core(f, u, false, tol, max_iter);
    return detail::koenigs_core(f, 1.0 + u, true, tol, max_iter);
}

// A logarithm map log_I with its inverse exp_I. Cheap to copy.
class LogPair {
public:
    enum class Provenance { closed_form_power, koenigs_numeric, affine_from_f };

    double log(double x) const { return log_x_(x); }
    double log_shifted(double u) const { return log_u_(u); }  // log_I(1 + u)

    double exp(double y) const {
        if (exp_x_) return exp_x_(y);
        if (std::abs(y) <= shifted_window) return 1.0 + exp_u_inverse(y);
        return exp_x_inverse(y);
    }
    double exp_shifted(double y) const {  // exp_I(y) - 1
        if (exp_u_) return exp_u_(y);
        if (std::abs(y) <= shifted_window) return exp_u_inverse(y);
        return exp_x_inverse(y) - 1.0;
    }

    double t0() const noexcept { return t0_; }
    Provenance provenance() const noexcept { return provenance_; }
    std::optional<double> q() const noexcept { return q_; }
    const std::optional<RepresentingFunction>& base() const noexcept { return base_; }
    const std::string& descriptor() const noexcept { return descriptor_; }

    friend LogPair logpair_power(double q);
    friend LogPair logpair_from_f(const RepresentingFunction& f, double grid_tol);
    friend LogPair logpair_affine_from_f(const RepresentingFunction& f);

private:
    static constexpr double shifted_window = 0.4;

    LogPair() = default;

    [[noreturn]] static void out_of_range(double y) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "exp_I: value " << y << " is outside the range of log_I";
        throw range_error(msg.str());
    }

    // Brackets from 1 - 1/x <= log_I(x) <= x - 1.
    double exp_x_inverse(double y) const {
        const double lo = std::max(1e-12, 1.0 + y);
        const double hi = y < 1.0 ? 1.0 / (1.0 - y) : 2.0 * (1.0 + y);
        auto x = detail::try_invert([this](double v) { return log_x_(v); }, y, std::pair{lo, std::max(lo, hi)});
        if (!x) out_of_range(y);
        return *x;
    }
    double exp_u_inverse(double y) const {
        if (y == 0.0) return 0.0;
        const double lo = y, hi = y / (1.0 - y);
        const double flo = log_u_(lo) - y, fhi = log_u_(hi) - y;
        if (flo >= 0.0) return lo;
        if (fhi <= 0.0) return hi;
        return detail::solve_increasing([this](double u) { return log_u_(u); }, y, lo, hi, flo, fhi);
    }

    ScalarFn log_x_, log_u_, exp_x_, exp_u_;
    double t0_ = 1.0;
    Provenance provenance_ = Provenance::closed_form_power;
    std::optional<double> q_;
    std::optional<RepresentingFunction> base_;
    std::string descriptor_;
};

// (x^q - 1)/q, natural log at q = 0.
inline LogPair logpair_power(double q) {
    if (!(q >= -1.0 && q <= 1.0)) throw domain_error("logpair_power: q = " + format_double(q) + " is outside [-1,1]");
    LogPair lp;
    if (std::abs(q) < detail::q_zero_threshold) {
        lp.log_x_ = [](double x) { return std::log(x); };
        lp.log_u_ = [](double u) { return std::log1p(u); };
        lp.exp_x_ = [](double y) { return std::exp(y); };
        lp.exp_u_ = [](double y) { return std::expm1(y); };
    } else {
        lp.log_x_ = [q](double x) { return std::expm1(q * std::log(x)) / q; };
        lp.log_u_ = [q](double u) { return std::expm1(q * std::log1p(u)) / q; };
        lp.exp_x_ = [q](double y) {
            if (!(q * y > -1.0)) LogPair::out_of_range(y);
            return std::exp(std::log1p(q * y) / q);
        };
        lp.exp_u_ = [q](double y) {
            if (!(q * y > -1.0)) LogPair::out_of_range(y);
            return std::expm1(std::log1p(q * y) / q);
        };
    }
    lp.t0_ = 1.0;
    lp.provenance_ = LogPair::Provenance::closed_form_power;
    lp.q_ = q;
    lp.descriptor_ = "logpair:power:q=" + format_double(q);
    return lp;
}

// Numeric log_I of f by the Koenigs iteration. Values at the 64 grid points
// are memoized.
inline LogPair logpair_from_f(const RepresentingFunction& f, double grid_tol = koenigs_default_tol) {
    if (!f.nontrivial()) throw domain_error("logpair_from_f: f must be non-trivial");
    struct Memo {
        std::mutex m;
        std::array<std::optional<double>, 64> v;
    };
    auto memo = std::make_shared<Memo>();
    LogPair lp;
    lp.log_x_ = [f, grid_tol, memo](double x) {
        const auto& g = test_grid();
        const auto it = std::lower_bound(g.begin(), g.end(), x);
        if (it == g.end() || *it != x) return koenigs_log(f, x, grid_tol);
        const auto i = static_cast<std::size_t>(it - g.begin());
        {
            std::lock_guard lock(memo->m);
            if (memo->v[i]) return *memo->v[i];
        }
        const double r = koenigs_log(f, x, grid_tol);
        std::lock_guard lock(memo->m);
        memo->v[i] = r;
        return r;
    };
    lp.log_u_ = [f, grid_tol](double u) { return koenigs_log_shifted(f, u, grid_tol); };
    lp.t0_ = f.tprime();
    lp.provenance_ = LogPair::Provenance::koenigs_numeric;
    lp.base_ = f;
    lp.descriptor_ = "logpair:koenigs:base=" + f.descriptor();
    return lp;
}

// (f(x) - 1)/f'(1); no semigroup is claimed, so t0 = 0.
inline LogPair logpair_affine_from_f(const RepresentingFunction& f) {
    if (!f.nontrivial()) throw domain_error("logpair_affine_from_f: f must be non-trivial");
    const double t = f.tprime();
    LogPair lp;
    lp.log_x_ = [f, t](double x) { return f.minus_one(x) / t; };
    lp.log_u_ = [f, t](double u) { return f.shifted(u) / t; };
    lp.t0_ = 0.0;
    lp.provenance_ = LogPair::Provenance::affine_from_f;
    lp.base_ = f;
    lp.descriptor_ = "logpair:affine:base=" + f.descriptor();
    return lp;
}

// f_t = exp_I(t log_I). Members with t above lp.t0() are returned but
// flagged as not validated.
inline RepresentingFunction semigroup_member(const LogPair& lp, double t) {
    if (!(t > 0.0 && t <= 1.0)) throw domain_error("semigroup_member: t = " + format_double(t) + " is outside (0,1]");
    const bool validated = t <= lp.t0() * (1.0 + 1e-15);
    auto shared = std::make_shared<const LogPair>(lp);
    if (lp.q()) {
        auto f = power_family(t, *lp.q());
        f.with_logpair(shared, t, validated);
        return f;
    }
    std::string base = lp.descriptor();
    if (lp.provenance() == LogPair::Provenance::koenigs_numeric) base = lp.base()->descriptor();
    RepresentingFunction f(
        RepresentingFunction::Kind::semigroup_member,
        [shared, t](double x) { return shared->exp(t * shared->log(x)); },
        [shared, t](double u) { return shared->exp_shifted(t * shared->log_shifted(u)); }, t,
        "semigroup:base=" + base + ",t=" + format_double(t));
    f.with_logpair(shared, t, validated);
    return f;
}

// max |log_I(f(x)) - f'(1) log_I(x)| over the points.
template <class Points>
double funceq_residual(const RepresentingFunction& f, const LogPair& lp, const Points& grid) {
    double r = 0.0;
    for (double x : grid) r = std::max(r, std::abs(lp.log(f(x)) - f.tprime() * lp.log(x)));
    return r;
}

struct LoewnerResult {
    bool is_psd;
    double min_eig;
};

inline constexpr double loewner_psd_tol = 1e-10;

// Divided-difference matrix of phi; fourth-order central differences on the diagonal.
inline LoewnerResult loewner_psd_check(const ScalarFn& phi, const std::vector<double>& points) {
    const std::size_t k = points.size();
    if (k == 0) throw domain_error("loewner_psd_check: no points");
    for (std::size_t i = 0; i < k; ++i) {
        if (!(points[i] > 0.0)) throw domain_error("loewner_psd_check: points must be positive");
        for (std::size_t j = 0; j < i; ++j)
            if (points[i] == points[j]) throw domain_error("loewner_psd_check: duplicate point " + format_double(points[i]));
    }
    std::vector<double> v(k);
    for (std::size_t i = 0; i < k; ++i) v[i] = phi(points[i]);
    Matrix l(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double x = points[i];
        const double h = 1e-3 * x;
        l(i, i) = (-phi(x + 2 * h) + 8 * phi(x + h) - 8 * phi(x - h) + phi(x - 2 * h)) / (12 * h);
        for (std::size_t j = 0; j < i; ++j) {
            const double d = (v[i] - v[j]) / (points[i] - points[j]);
            l(i, j) = d;
            l(j, i) = d;
        }
    }
    const double m = eigh(HermMatrix(std::move(l))).values.front();
    return {m >= -loewner_psd_tol, m};
}

struct MembershipReport {
    bool upper_branch;  // g'(1) > 1/2
    double w1, w2;
    double h_slope;     // finite-difference h'(1)
    double expected_slope;
    std::vector<std::vector<double>> min_eigs;  // [n-1][set]
    std::optional<int> passed_at;
};

// Builds the decreasing map h from g and runs the Loewner check on h^{2n}.
// Passing is a necessary condition for g to come from a lambda extension.
inline MembershipReport lambda_membership_probe(const RepresentingFunction& g, int n_max,
                                                const std::vector<std::vector<double>>& sample_sets) {
    const double w2 = g.tprime(), w1 = 1.0 - w2;
    for (double excluded : {0.0, 0.5, 1.0})
        if (std::abs(w2 - excluded) <= 1e-12)
            throw domain_error("lambda_membership_probe: g'(1) = " + format_double(w2) + " is an excluded case (0, 1/2, 1)");

    MembershipReport rep{w2 > 0.5, w1, w2, 0.0, w2 > 0.5 ? -w1 / w2 : -w2 / w1, {}, std::nullopt};
    ScalarFn h;
    if (rep.upper_branch) {
        h = [g](double x) {
            return x * scalar_invert([&g](double v) { return g(v); }, 1.0 / x);
        };
    } else {
        const auto gs = conjugate(g);
        h = [gs](double x) { return x / scalar_invert([&gs](double v) { return gs(v); }, x); };
    }
    const double d = 1e-4;
    rep.h_slope = (-h(1 + 2 * d) + 8 * h(1 + d) - 8 * h(1 - d) + h(1 - 2 * d)) / (12 * d);

    for (int n = 1; n <= n_max; ++n) {
        const int depth = 2 * n;
        ScalarFn hn = [h, depth](double x) {
            for (int i = 0; i < depth; ++i) x = h(x);
            return x;
        };
        std::vector<double> eigs;
        bool all = true;
        for (const auto& pts : sample_sets) {
            const auto res = loewner_psd_check(hn, pts);
            eigs.push_back(res.min_eig);
            all = all && res.is_psd;
        }
        rep.min_eigs.push_back(std::move(eigs));
        if (all) {
            rep.passed_at = n;
            break;
        }
    }
    return rep;
}

}  // namespace opmean

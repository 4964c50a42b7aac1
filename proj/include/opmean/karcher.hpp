#pragma once

// Multivariable means: induced means as fixed points of
// X = sum w_i M(X, A_i), power means, and lambda extensions as the t -> 0
// limit of the induced means of the semigroup f_t.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hpdcore.hpp"
#include "koenigs.hpp"
#include "kubo.hpp"
#include "thompson.hpp"

namespace opmean {

class MeanProblem {
public:
    MeanProblem(std::vector<double> weights, std::vector<PdMatrix> matrices)
        : w_(std::move(weights)), a_(std::move(matrices)) {
        if (a_.empty()) throw domain_error("mean problem needs at least one matrix");
        if (w_.size() != a_.size())
            throw dimension_error("mean problem: " + std::to_string(w_.size()) + " weights for " +
                                  std::to_string(a_.size()) + " matrices");
        double s = 0.0;
        for (double w : w_) {
            if (!(w > 0.0) || !std::isfinite(w)) throw domain_error("mean problem: weights must be positive");
            s += w;
        }
        if (!(std::abs(s - 1.0) <= 1e-14)) throw domain_error("mean problem: weights sum to " + format_double(s) + ", expected 1");
        for (const auto& a : a_) a_.front().mat().check_same(a.mat());
    }

    // Rescales positive weights onto the simplex.
    static MeanProblem normalized(std::vector<double> weights, std::vector<PdMatrix> matrices) {
        double s = 0.0;
        for (double w : weights) s += w;
        if (!(s > 0.0)) throw domain_error("mean problem: weights must have a positive sum");
        for (double& w : weights) w /= s;
        return MeanProblem(std::move(weights), std::move(matrices));
    }
    static MeanProblem uniform(std::vector<PdMatrix> matrices) {
        std::vector<double> w(matrices.size(), 1.0);
        return normalized(std::move(w), std::move(matrices));
    }

    std::size_t k() const noexcept { return a_.size(); }
    std::size_t n() const noexcept { return a_.front().size(); }
    const std::vector<double>& weights() const noexcept { return w_; }
    const std::vector<PdMatrix>& matrices() const noexcept { return a_; }

private:
    std::vector<double> w_;
    std::vector<PdMatrix> a_;
};

inline PdMatrix arithmetic_mean(const MeanProblem& p) {
    Matrix s(p.n());
    for (std::size_t i = 0; i < p.k(); ++i) s += p.weights()[i] * p.matrices()[i].mat();
    return PdMatrix(std::move(s));
}

inline PdMatrix harmonic_mean(const MeanProblem& p) {
    Matrix s(p.n());
    for (std::size_t i = 0; i < p.k(); ++i) s += p.weights()[i] * inv_pd(p.matrices()[i]).mat();
    return inv_pd(PdMatrix(std::move(s)));
}

struct SolveReport {
    std::string method;
    bool converged = false;
    int iterations = 0;
    std::vector<double> step_distances;
    double fixed_point_residual = 0.0;
    std::optional<double> karcher_residual;
    std::optional<double> rho_estimate;
    std::optional<std::vector<double>> t_schedule;
    std::vector<int> level_iterations;
    std::vector<double> level_distances;         // d(X_{t_l}, X_{t_{l-1}})
    std::vector<double> extrapolated_distances;  // same for the extrapolated limits
};

struct Solution {
    PdMatrix x;
    SolveReport report;
};

class non_convergence : public convergence_error {
public:
    non_convergence(const std::string& what, SolveReport report)
        : convergence_error(what), report_(std::move(report)) {}
    const SolveReport& report() const noexcept { return report_; }

private:
    SolveReport report_;
};

class monotonicity_error : public error {
public:
    using error::error;
};

struct InducedOptions {
    double tol = 1e-10;
    int max_iter = 10000;
    std::optional<PdMatrix> x0;
    // Replaces the step I + S by (I + S)^{a / f'(1)} with a adapted in (f'(1), 1].
    // The fixed points are unchanged and termination still uses the plain map.
    bool accelerate = false;
};

namespace detail {

inline std::optional<double> rate_estimate(const std::vector<double>& steps) {
    const std::size_t m = steps.size();
    if (m < 3) return std::nullopt;
    const std::size_t span = std::min<std::size_t>(5, m - 1);
    const double a = steps[m - 1 - span], b = steps[m - 1];
    if (!(a > 0.0) || !(b > 0.0)) return std::nullopt;
    return std::pow(b / a, 1.0 / static_cast<double>(span));
}

}  // namespace detail

inline Solution induced_solve(const RepresentingFunction& f, const MeanProblem& p, const InducedOptions& opt) {
    SolveReport rep;
    rep.method = "induced";
    if (f.right_trivial()) {
        rep.converged = true;
        return {arithmetic_mean(p), rep};
    }
    if (f.left_trivial()) throw domain_error("induced_solve: the left trivial mean has no unique induced mean");
    const double tp = f.tprime();
    const std::size_t n = p.n();

    PdMatrix x = opt.x0 ? *opt.x0 : arithmetic_mean(p);
    x.mat().check_same(p.matrices().front().mat());
    double alpha = 1.0;
    double prev_step = std::numeric_limits<double>::infinity();
    for (int it = 0;; ++it) {
        const auto& e = x.eig();
        const HermMatrix half = apply_fn(e, [](double v) { return std::sqrt(v); });
        const HermMatrix inv_half = apply_fn(e, [](double v) { return 1.0 / std::sqrt(v); });
        // S = X^{-1/2} (map(X) - X) X^{-1/2} = sum w_i (f(C_i) - I)
        Matrix s(n);
        for (std::size_t i = 0; i < p.k(); ++i) {
            const HermMatrix c = detail::congruence(inv_half, p.matrices()[i].mat());
            s += p.weights()[i] * apply_fn(c, [&f](double v) { return f.minus_one(v); }).mat();
        }
        const auto es = eigh(HermMatrix(std::move(s)));
        const double step = d_inf_step(es.values);
        rep.step_distances.push_back(step);
        rep.fixed_point_residual = step;
        if (step <= opt.tol) {
            rep.iterations = it;
            rep.converged = true;
            rep.rho_estimate = detail::rate_estimate(rep.step_distances);
            return {x, std::move(rep)};
        }
        if (it >= opt.max_iter) {
            rep.iterations = it;
            rep.rho_estimate = detail::rate_estimate(rep.step_distances);
            std::ostringstream msg;
            msg << "induced mean iteration did not converge in " << opt.max_iter << " steps (last step distance "
                << step << ", tolerance " << opt.tol << ")";
            throw non_convergence(msg.str(), std::move(rep));
        }
        HermMatrix next_inner;
        if (opt.accelerate && tp < 1.0) {
            if (step > prev_step) alpha = std::max(tp, 0.5 * alpha);
            const double power = alpha / tp;
            next_inner = apply_fn(es, [power](double m) { return std::exp(power * std::log1p(m)); });
        } else {
            next_inner = apply_fn(es, [](double m) { return 1.0 + m; });
        }
        prev_step = step;
        x = PdMatrix(detail::congruence(half, next_inner.mat()));
    }
}

inline Solution induced_solve(const RepresentingFunction& f, const MeanProblem& p, double tol = 1e-10,
                              int max_iter = 10000) {
    InducedOptions opt;
    opt.tol = tol;
    opt.max_iter = max_iter;
    return induced_solve(f, p, opt);
}

// Fixed point of X = sum w_i G_s(X, A_i) with G_s(X, A) the mean of x^s.
inline Solution power_mean(double s, const MeanProblem& p, double tol = 1e-10, int max_iter = 10000) {
    if (!(s > 0.0 && s <= 1.0)) throw domain_error("power_mean: s = " + format_double(s) + " is outside (0,1]");
    auto sol = induced_solve(power_family(s, 0.0), p, tol, max_iter);
    sol.report.method = "power";
    return sol;
}

// ||sum w_i X^{1/2} log_I(X^{-1/2} A_i X^{-1/2}) X^{1/2}||_F / ||X||_F
inline double karcher_residual(const LogPair& lp, const PdMatrix& x, const MeanProblem& p) {
    x.mat().check_same(p.matrices().front().mat());
    const auto& e = x.eig();
    const HermMatrix half = apply_fn(e, [](double v) { return std::sqrt(v); });
    const HermMatrix inv_half = apply_fn(e, [](double v) { return 1.0 / std::sqrt(v); });
    Matrix s(p.n());
    for (std::size_t i = 0; i < p.k(); ++i) {
        const HermMatrix c = detail::congruence(inv_half, p.matrices()[i].mat());
        s += p.weights()[i] * apply_fn(c, [&lp](double v) { return lp.log(v); }).mat();
    }
    return detail::congruence(half.mat(), s).frobenius() / x.frobenius();
}

struct LambdaOptions {
    std::optional<double> t_start;  // default min(0.5, t0)
    double shrink = 0.5;
    double tol_lambda = 1e-8;
    std::optional<double> inner_tol;  // default 1e-3 tol_lambda t_l
    int max_outer = 40;
    int inner_max_iter = 100000;
    bool extrapolate = true;
    std::optional<PdMatrix> x0;
    double monotone_tol = 1e-9;
};

namespace detail {

// Value at t = 0 of the entrywise interpolating polynomial through (ts, xs).
inline Matrix neville_at_zero(const std::vector<double>& ts, const std::vector<Matrix>& xs) {
    std::vector<Matrix> p = xs;
    const std::size_t m = ts.size();
    for (std::size_t d = 1; d < m; ++d)
        for (std::size_t i = m - 1; i >= d; --i) {
            const double ti = ts[i], tj = ts[i - d];
            Matrix v = (-tj / (ti - tj)) * p[i];
            v += (ti / (ti - tj)) * p[i - 1];
            p[i] = std::move(v);
            if (i == d) break;
        }
    return p.back();
}

}  // namespace detail

// Limit of the induced means of f_t = exp_I(t log_I) as t -> 0 along
// t_l = t_start shrink^l. The raw iterates must decrease in the Loewner
// order; the returned limit is a polynomial extrapolation of them to t = 0.
inline Solution lambda_extension(const LogPair& lp, const MeanProblem& p, const LambdaOptions& opt = {}) {
    if (!(lp.t0() > 0.0)) throw domain_error("lambda_extension: log pair " + lp.descriptor() + " carries no semigroup (t0 = 0)");
    const double t_start = opt.t_start ? *opt.t_start : std::min(0.5, lp.t0());
    if (!(t_start > 0.0 && t_start <= lp.t0() * (1.0 + 1e-15)))
        throw domain_error("lambda_extension: t_start = " + format_double(t_start) + " must lie in (0, t0]");
    if (!(opt.shrink > 0.0 && opt.shrink < 1.0)) throw domain_error("lambda_extension: shrink must lie in (0,1)");
    if (!(opt.tol_lambda > 0.0)) throw domain_error("lambda_extension: tol_lambda must be positive");

    SolveReport rep;
    rep.method = "lambda";
    rep.t_schedule.emplace();
    constexpr std::size_t max_table = 10;
    std::vector<double> ts;
    std::vector<Matrix> xs;
    std::optional<PdMatrix> prev, prev_limit;
    std::optional<PdMatrix> warm = opt.x0;

    for (int l = 0; l < opt.max_outer; ++l) {
        const double t = t_start * std::pow(opt.shrink, l);
        InducedOptions in;
        in.tol = opt.inner_tol ? *opt.inner_tol : 1e-3 * opt.tol_lambda * t;
        in.max_iter = opt.inner_max_iter;
        in.x0 = warm;
        in.accelerate = true;
        Solution s = [&] {
            try {
                return induced_solve(semigroup_member(lp, t), p, in);
            } catch (const non_convergence& ex) {
                rep.t_schedule->push_back(t);
                rep.level_iterations.push_back(ex.report().iterations);
                rep.iterations += ex.report().iterations;
                throw non_convergence(std::string("lambda extension inner solve at t = ") + format_double(t) + ": " + ex.what(), rep);
            }
        }();
        rep.t_schedule->push_back(t);
        rep.level_iterations.push_back(s.report.iterations);
        rep.iterations += s.report.iterations;
        rep.step_distances.insert(rep.step_distances.end(), s.report.step_distances.begin(), s.report.step_distances.end());
        rep.fixed_point_residual = s.report.fixed_point_residual;

        double raw = std::numeric_limits<double>::infinity();
        if (prev) {
            if (!order_leq(s.x, *prev, opt.monotone_tol)) {
                std::ostringstream msg;
                msg << "lambda extension: iterate at t = " << t << " is not below the previous one (margin "
                    << order_margin(s.x, *prev) << ")";
                throw monotonicity_error(msg.str());
            }
            raw = d_inf(s.x, *prev);
            rep.level_distances.push_back(raw);
        }

        ts.push_back(t);
        xs.push_back(s.x.mat());
        if (ts.size() > max_table) {
            ts.erase(ts.begin());
            xs.erase(xs.begin());
        }
        std::optional<PdMatrix> limit;
        if (opt.extrapolate && ts.size() > 1) {
            try {
                limit = PdMatrix(detail::neville_at_zero(ts, xs));
            } catch (const not_positive_definite&) {
            }
        }
        if (!limit) limit = s.x;
        double extra = std::numeric_limits<double>::infinity();
        if (prev_limit) {
            extra = d_inf(*limit, *prev_limit);
            rep.extrapolated_distances.push_back(extra);
        }

        const bool done = raw < opt.tol_lambda || (opt.extrapolate && l >= 2 && extra < opt.tol_lambda);
        if (done) {
            rep.converged = true;
            PdMatrix out = opt.extrapolate ? *limit : s.x;
            rep.karcher_residual = karcher_residual(lp, out, p);
            return {std::move(out), std::move(rep)};
        }
        prev = s.x;
        prev_limit = limit;
        warm = s.x;
    }
    std::ostringstream msg;
    msg << "lambda extension did not converge within " << opt.max_outer << " levels";
    throw non_convergence(msg.str(), std::move(rep));
}

inline Solution classical_karcher(const MeanProblem& p, const LambdaOptions& opt = {}) {
    auto s = lambda_extension(logpair_power(0.0), p, opt);
    s.report.method = "karcher";
    return s;
}

}  // namespace opmean

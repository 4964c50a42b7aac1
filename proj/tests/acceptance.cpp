// Runs every acceptance criterion and prints one PASS/FAIL line for each.
// Exit status is 0 once all criteria have produced a verdict; a crash or an
// unexpected exception inside a criterion is reported as FAIL and exits 1.

#include <opmean/opmean.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>

using namespace opmean;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

MeanProblem random_problem(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<PdMatrix> a;
    for (std::size_t i = 0; i < k; ++i) a.push_back(random_pd(n, rng));
    return MeanProblem(random_weights(k, rng), a);
}

// Koenigs logs of f_q against (x^q - 1)/q.
Verdict koenigs_closed_form() {
    double worst = 0;
    for (double q : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        const auto f = power_family(0.5, q);
        for (double x : test_grid()) {
            const double expect = q == 0.0 ? std::log(x) : (std::pow(x, q) - 1) / q;
            worst = std::max(worst, std::abs(koenigs_log(f, x) - expect));
        }
    }
    return {worst <= 1e-8, "max |koenigs_log - (x^q-1)/q| = " + sci(worst) + " (t=0.5, 5 q values, 64 points)"};
}

Verdict funceq() {
    double worst = 0;
    for (double q : {-1.0, -0.5, 0.0, 0.5, 1.0})
        for (double t : {0.25, 0.5, 0.75}) worst = std::max(worst, funceq_residual(power_family(t, q), logpair_power(q), test_grid()));
    return {worst <= 1e-9, "max funceq_residual = " + sci(worst) + " over 15 power pairs"};
}

// Scalar root of w1 f(a/x) + w2 f(b/x) = 1 by bisection in log x.
double scalar_root(const RepresentingFunction& f, double w1, double w2, double a, double b) {
    double lo = std::log(std::min(a, b)) - 1e-9, hi = std::log(std::max(a, b)) + 1e-9;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (w1 * f(a / std::exp(mid)) + w2 * f(b / std::exp(mid)) > 1.0 ? lo : hi) = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

Verdict two_variable() {
    Rng rng(3);
    std::uniform_real_distribution<double> ut(0.05, 0.95), uq(-1, 1), uw(0.05, 0.95), la(-3, 3), us(0, 1);
    double worst = 0, worst_oracle = 0;
    for (int i = 0; i < 50; ++i) {
        RepresentingFunction f = i % 3 == 2 ? [&] {
            const double nu = uw(rng);
            return harmonic_mixture({{us(rng), nu}, {us(rng), 1 - nu}});
        }()
                                            : power_family(ut(rng), uq(rng));
        if (!f.nontrivial()) f = power_family(0.5, 0.0);
        const double w2 = uw(rng), w1 = 1 - w2;
        const double a = std::exp(la(rng)), b = std::exp(la(rng));
        const double x = induced_solve(f, MeanProblem({w1, w2}, {PdMatrix::diagonal({a}), PdMatrix::diagonal({b})}), 1e-14)
                             .x(0, 0)
                             .real();
        const double g = a * induced2_repfn(f, w1, w2)(b / a);
        worst = std::max(worst, std::abs(x - g) / std::max(1.0, g));
        worst_oracle = std::max(worst_oracle, std::abs(g - scalar_root(f, w1, w2, a, b)) / std::max(1.0, g));
    }
    return {worst <= 1e-10 && worst_oracle <= 1e-10,
            "max rel |X - a g(b/a)| = " + sci(worst) + ", vs bisection oracle " + sci(worst_oracle) + " (50 draws)"};
}

Verdict self_inducing() {
    Rng rng(4);
    double ari = 0, har = 0;
    for (int i = 0; i < 20; ++i) {
        const auto p = random_problem(3, 3, rng);
        ari = std::max(ari, d_inf(induced_solve(arithmetic_mean_fn(0.5), p, 1e-13).x, arithmetic_mean(p)).value);
        har = std::max(har, d_inf(induced_solve(power_family(0.5, -1.0), p, 1e-13).x, harmonic_mean(p)).value);
    }
    return {ari <= 1e-10 && har <= 1e-10,
            "arithmetic max d_inf = " + sci(ari) + ", harmonic max d_inf = " + sci(har) + " (20 problems)"};
}

Verdict karcher() {
    Rng rng(5);
    double commuting = 0, pair = 0, residual = 0;
    for (int i = 0; i < 10; ++i) {
        std::vector<PdMatrix> a;
        std::vector<double> logs(3 * 3);
        const auto w = random_weights(3, rng);
        const Matrix u = random_unitary(3, rng);
        std::vector<double> target(3, 0.0);
        for (int m = 0; m < 3; ++m) {
            const PdMatrix d = random_diagonal_pd(3, rng);
            for (std::size_t j = 0; j < 3; ++j) target[j] += w[m] * std::log(d(j, j).real());
            a.push_back(PdMatrix(u * d.mat() * u.adjoint()));
        }
        for (auto& v : target) v = std::exp(v);
        const PdMatrix oracle(u * Matrix::diagonal(target) * u.adjoint());
        commuting = std::max(commuting, d_inf(classical_karcher(MeanProblem(w, a)).x, oracle).value);

        const PdMatrix x = random_pd(3, rng), y = random_pd(3, rng);
        pair = std::max(pair, d_inf(classical_karcher(MeanProblem({0.5, 0.5}, {x, y})).x,
                                    mean_eval(power_family(0.5, 0.0), x, y)).value);
    }
    for (int i = 0; i < 20; ++i) {
        const auto p = random_problem(3, 3, rng);
        residual = std::max(residual, karcher_residual(logpair_power(0.0), classical_karcher(p).x, p));
    }
    return {commuting <= 1e-8 && pair <= 1e-8 && residual <= 1e-7,
            "commuting d_inf = " + sci(commuting) + ", k=2 vs geometric d_inf = " + sci(pair) +
                ", max karcher_residual = " + sci(residual)};
}

Verdict monotone_schedule() {
    Rng rng(6);
    const std::vector<LogPair> pairs{logpair_power(0.0), logpair_power(0.5), logpair_from_f(power_family(0.5, 0.0))};
    double worst_margin = std::numeric_limits<double>::infinity(), worst_unique = 0;
    int violations = 0, runs = 0;
    LambdaOptions base;
    for (int i = 0; i < 20; ++i) {
        const auto p = random_problem(3, 3, rng);
        for (const auto& lp : pairs) {
            const auto sol = lambda_extension(lp, p, base);
            ++runs;
            // Re-solve every level of the reported schedule independently and compare neighbours.
            std::optional<PdMatrix> prev;
            for (double t : *sol.report.t_schedule) {
                InducedOptions in;
                in.tol = 1e-3 * base.tol_lambda * t;
                in.max_iter = 100000;
                in.accelerate = true;
                const PdMatrix x = induced_solve(semigroup_member(lp, t), p, in).x;
                if (prev) {
                    const double margin = order_margin(x, *prev);
                    worst_margin = std::min(worst_margin, margin);
                    if (!order_leq(x, *prev, 1e-9)) ++violations;
                }
                prev = x;
            }
            LambdaOptions other = base;
            other.t_start = 0.25;
            other.x0 = PdMatrix(2.0 * arithmetic_mean(p).herm());
            worst_unique = std::max(worst_unique, d_inf(sol.x, lambda_extension(lp, p, other).x).value);
        }
    }
    return {violations == 0 && worst_unique <= 2 * base.tol_lambda,
            std::to_string(runs) + " runs, order violations = " + std::to_string(violations) + " (worst margin " +
                sci(worst_margin) + "), max two-schedule d_inf = " + sci(worst_unique) + " (limit " +
                sci(2 * base.tol_lambda) + ")"};
}

Verdict property_suites() {
    SamplerConfig cfg;
    cfg.instances = 20;
    cfg.tol = 1e-8;
    const auto power = power_family(0.5, 0.0);
    const auto mixture = harmonic_mixture({{0.2, 0.5}, {0.8, 0.5}});
    const std::vector<PropertyTable> tables{property_suite(power, cfg), property_suite(mixture, cfg),
                                            property_suite(logpair_from_f(power), cfg),
                                            property_suite(logpair_from_f(mixture), cfg)};
    bool ok = true;
    std::string failing;
    int rows = 0;
    for (const auto& t : tables)
        for (const auto& r : t.rows) {
            ++rows;
            if (!r.pass()) {
                ok = false;
                failing += " [" + t.subject + ": " + r.name + " worst " + sci(r.worst) + "]";
            }
        }
    return {ok, std::to_string(rows) + " rows over 4 suites x 20 instances" + (ok ? "" : ", failing:" + failing)};
}

Verdict thompson() {
    Rng rng(8);
    double worst = 0;
    std::uniform_real_distribution<double> scale(0.1, 10);
    for (int i = 0; i < 100; ++i) {
        const PdMatrix a = random_pd(3, rng), b = random_pd(3, rng), c = random_pd(3, rng);
        const double d = d_inf(a, b);
        worst = std::max(worst, std::abs(d - d_inf(b, a)));
        worst = std::max(worst, d_inf(a, a).value);
        worst = std::max(worst, d - d_inf(a, c) - d_inf(c, b));
        const double r = scale(rng);
        worst = std::max(worst, std::abs(d_inf(r * a, r * b) - d));
        worst = std::max(worst, std::abs(d_inf(inv_pd(a), inv_pd(b)) - d));
        const Matrix m = random_invertible(3, rng);
        worst = std::max(worst, std::abs(d_inf(congruence(m, a), congruence(m, b)) - d));
        const double u = std::uniform_real_distribution<double>(0, 1)(rng);
        worst = std::max(worst, d_inf(PdMatrix(u * a.herm() + (1 - u) * c.herm()), PdMatrix(u * b.herm() + (1 - u) * c.herm())) - d);
        if (!order_leq(std::exp(-d) * b.herm(), a.herm(), 1e-10) || !order_leq(a.herm(), std::exp(d) * b.herm(), 1e-10))
            worst = std::max(worst, 1.0);
    }
    double excess = -1;
    for (double r : {0.5, 1.0, 2.0})
        for (auto [ca, cb] : {std::pair{1.0, 1.0}, std::pair{2.0, 1.0}}) {
            const double rho = rho_affine(r, ca, cb).rho;
            const PdMatrix center = random_pd(3, rng);
            for (int i = 0; i < 100; ++i) {
                const PdMatrix x = sample_ball(center, r, rng), y = sample_ball(center, r, rng);
                const double dxy = d_inf(x, y);
                const double dh = d_inf(PdMatrix(ca * center.herm() + cb * x.herm()), PdMatrix(ca * center.herm() + cb * y.herm()));
                excess = std::max(excess, dh - rho * dxy);
            }
        }
    return {worst <= 1e-10 && excess <= 1e-10,
            "max axiom/property violation = " + sci(std::max(0.0, worst)) + ", max d(h x, h y) - rho d(x, y) = " + sci(excess) +
                " (600 sampled pairs)"};
}

Verdict loewner() {
    const auto sq = loewner_psd_check([](double x) { return x * x; }, {1.0, 2.0, 3.0});
    // Leading 2x2 minor of [[2,3],[3,4]] from the divided differences.
    const double minor = (2 * 1.0) * (2 * 2.0) - (1.0 + 2.0) * (1.0 + 2.0);
    Rng rng(9);
    std::uniform_real_distribution<double> g(std::log(0.1), std::log(10.0));
    bool monotone_ok = true;
    double worst = 1e300;
    for (int s = 0; s < 5; ++s) {
        std::vector<double> pts;
        for (int i = 0; i < 6; ++i) pts.push_back(std::exp(g(rng)));
        for (const ScalarFn& phi : {ScalarFn([](double x) { return std::log(x); }), ScalarFn([](double x) { return std::sqrt(x); })}) {
            const auto r = loewner_psd_check(phi, pts);
            monotone_ok = monotone_ok && r.is_psd;
            worst = std::min(worst, r.min_eig);
        }
    }
    return {!sq.is_psd && minor == -1.0 && monotone_ok,
            "x^2 on {1,2,3}: psd=" + std::string(sq.is_psd ? "yes" : "no") + " min_eig=" + sci(sq.min_eig) +
                " minor=" + format_double(minor) + "; log and sqrt on 5 sets of 6: " + (monotone_ok ? "psd" : "NOT psd") +
                " (smallest eig " + sci(worst) + ")"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"koenigs closed form", koenigs_closed_form},
        {"functional equation residual", funceq},
        {"two-variable consistency", two_variable},
        {"self-inducing fixed points", self_inducing},
        {"karcher correctness", karcher},
        {"monotone lambda schedule", monotone_schedule},
        {"property suites", property_suites},
        {"thompson metric and contraction", thompson},
        {"loewner probe sanity", loewner},
    };
    int passed = 0, crashed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
            ++crashed;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        passed += v.pass;
        std::printf("%s criterion %zu (%s): %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    v.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("summary: %d of %zu criteria pass\n", passed, criteria.size());
    return crashed ? 1 : 0;
}

#pragma once

// Randomized property checks for multivariable means. Every row reduces to a
// scalar violation measure that must stay <= tol on every instance.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "karcher.hpp"
#include "sampling.hpp"
#include "thompson.hpp"

namespace opmean {

struct SamplerConfig {
    int instances = 20;
    std::size_t n = 3;
    std::size_t k = 3;
    std::uint64_t seed = 1;
    double tol = 1e-8;
    double spread = 1.5;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct PropertyRow {
    std::string name;
    int checked = 0;
    int failures = 0;
    double worst = 0.0;  // largest violation measure seen
    std::string detail;  // first failure
    bool pass() const noexcept { return failures == 0; }
};

struct PropertyTable {
    std::string subject;
    std::vector<PropertyRow> rows;

    bool all_pass() const {
        return std::all_of(rows.begin(), rows.end(), [](const PropertyRow& r) { return r.pass(); });
    }
    const PropertyRow* find(const std::string& name) const {
        for (const auto& r : rows)
            if (r.name == name) return &r;
        return nullptr;
    }
    std::string to_text() const {
        std::ostringstream out;
        out << "subject=" << subject << '\n';
        for (const auto& r : rows) {
            char worst[32];
            std::snprintf(worst, sizeof worst, "%.3e", r.worst);
            out << std::left << std::setw(28) << r.name << ' ' << (r.pass() ? "pass" : "FAIL") << "  worst=" << worst
                << "  failures=" << r.failures << '/' << r.checked;
            if (!r.detail.empty()) out << "  first_failure=\"" << r.detail << '"';
            out << '\n';
        }
        return out.str();
    }
};

using MeanSolver = std::function<PdMatrix(const MeanProblem&)>;

struct MeanUnderTest {
    std::string subject;
    MeanSolver solve;
    MeanSolver comparator;  // a mean known to dominate `solve`
    bool self_reduction = false;
};

inline const std::vector<std::string>& property_names(bool self_reduction) {
    static const std::vector<std::string> with{"idempotency",        "permutation_invariance", "monotonicity",
                                               "mean_ordering",      "congruence_invariance",  "joint_concavity",
                                               "thompson_nonexpansive", "repetition_invariance", "self_reduction",
                                               "positive_map",       "harmonic_arithmetic_bounds"};
    static const std::vector<std::string> without = [] {
        auto v = with;
        v.erase(std::find(v.begin(), v.end(), "self_reduction"));
        return v;
    }();
    return self_reduction ? with : without;
}

namespace detail {

struct Outcome {
    double measure;
    std::string note;
};

// V* A V restricted to the leading m x m block, V unitary.
inline PdMatrix compress(const Matrix& v, const HermMatrix& a, std::size_t m) {
    const Matrix full = v.adjoint() * a.mat() * v;
    Matrix r(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) r(i, j) = full(i, j);
    return PdMatrix(std::move(r));
}

inline std::vector<Outcome> run_instance(const MeanUnderTest& mut, const SamplerConfig& cfg, int index) {
    Rng rng(cfg.seed * 1000003ULL + static_cast<std::uint64_t>(index));
    const std::size_t n = cfg.n, k = cfg.k;
    const auto& names = property_names(mut.self_reduction);
    std::vector<Outcome> out(names.size(), {0.0, ""});

    std::vector<PdMatrix> a, b, c;
    for (std::size_t i = 0; i < k; ++i) a.push_back(random_pd(n, rng, cfg.spread));
    const auto w = random_weights(k, rng);
    // B_i = A_i + c v v*: rank-one increments are where non-operator-monotone maps break.
    for (std::size_t i = 0; i < k; ++i) {
        const Matrix v = random_unitary(n, rng);
        const double c = std::exp(std::uniform_real_distribution<double>(-cfg.spread, cfg.spread)(rng));
        Matrix bump(n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t q = 0; q < n; ++q) bump(r, q) = c * v(r, 0) * std::conj(v(q, 0));
        b.push_back(PdMatrix(a[i].herm() + HermMatrix(bump)));
    }
    for (std::size_t i = 0; i < k; ++i) c.push_back(random_pd(n, rng, cfg.spread));
    std::vector<std::size_t> perm(k);
    for (std::size_t i = 0; i < k; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    const Matrix cong = random_invertible(n, rng);
    const double u = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
    const Matrix iso = random_unitary(n, rng);
    const std::size_t m = n > 1 ? n - 1 : 1;

    const MeanProblem p(w, a);
    std::size_t row = 0;
    std::optional<PdMatrix> x;
    auto attempt = [&](auto&& check) {
        try {
            out[row] = check();
        } catch (const std::exception& ex) {
            out[row] = {std::numeric_limits<double>::infinity(), ex.what()};
        }
        ++row;
    };
    auto base = [&]() -> const PdMatrix& {
        if (!x) x = mut.solve(p);
        return *x;
    };
    auto leq = [](const HermMatrix& lo, const HermMatrix& hi) { return -order_margin(lo, hi); };

    attempt([&] {
        const MeanProblem same(w, std::vector<PdMatrix>(k, a[0]));
        return Outcome{d_inf(mut.solve(same), a[0]), ""};
    });
    attempt([&] {
        std::vector<double> wp;
        std::vector<PdMatrix> ap;
        for (auto i : perm) {
            wp.push_back(w[i]);
            ap.push_back(a[i]);
        }
        return Outcome{d_inf(mut.solve(MeanProblem(wp, ap)), base()), ""};
    });
    attempt([&] { return Outcome{leq(base(), mut.solve(MeanProblem(w, b))), ""}; });
    attempt([&] { return Outcome{leq(base(), mut.comparator(p)), ""}; });
    attempt([&] {
        std::vector<PdMatrix> ac;
        for (const auto& ai : a) ac.push_back(PdMatrix(detail::congruence(cong, ai.mat())));
        const PdMatrix lhs = mut.solve(MeanProblem(w, ac));
        return Outcome{d_inf(lhs, PdMatrix(detail::congruence(cong, base().mat()))), ""};
    });
    std::optional<PdMatrix> y;
    attempt([&] {
        y = mut.solve(MeanProblem(w, c));
        std::vector<PdMatrix> mix;
        for (std::size_t i = 0; i < k; ++i) mix.push_back(PdMatrix((1 - u) * a[i].herm() + u * c[i].herm()));
        const HermMatrix lhs = (1 - u) * base().herm() + u * y->herm();
        return Outcome{leq(lhs, mut.solve(MeanProblem(w, mix))), ""};
    });
    attempt([&] {
        if (!y) y = mut.solve(MeanProblem(w, c));
        double dmax = 0;
        for (std::size_t i = 0; i < k; ++i) dmax = std::max(dmax, d_inf(a[i], c[i]).value);
        return Outcome{d_inf(base(), *y) - dmax, ""};
    });
    attempt([&] {
        std::vector<double> w2;
        std::vector<PdMatrix> a2;
        for (int rep = 0; rep < 2; ++rep)
            for (std::size_t i = 0; i < k; ++i) {
                w2.push_back(0.5 * w[i]);
                a2.push_back(a[i]);
            }
        return Outcome{d_inf(mut.solve(MeanProblem::normalized(w2, a2)), base()), ""};
    });
    if (mut.self_reduction) {
        attempt([&] {
            if (k < 2) return Outcome{0.0, ""};
            std::vector<double> wh(w.begin(), w.end() - 1);
            std::vector<PdMatrix> ah(a.begin(), a.end() - 1);
            const PdMatrix z = mut.solve(MeanProblem::normalized(wh, ah));
            std::vector<PdMatrix> az = ah;
            az.push_back(z);
            return Outcome{d_inf(mut.solve(MeanProblem(w, az)), z), ""};
        });
    }
    attempt([&] {
        std::vector<PdMatrix> ap;
        for (const auto& ai : a) ap.push_back(compress(iso, ai.herm(), m));
        return Outcome{leq(compress(iso, base().herm(), m), mut.solve(MeanProblem(w, ap))), ""};
    });
    attempt([&] {
        const double lower = leq(harmonic_mean(p), base());
        const double upper = leq(base(), arithmetic_mean(p));
        return Outcome{std::max(lower, upper), ""};
    });
    return out;
}

}  // namespace detail

inline PropertyTable run_property_suite(const MeanUnderTest& mut, const SamplerConfig& cfg) {
    const auto& names = property_names(mut.self_reduction);
    std::vector<std::vector<detail::Outcome>> results(static_cast<std::size_t>(std::max(0, cfg.instances)));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i; (i = next++) < cfg.instances;) results[static_cast<std::size_t>(i)] = detail::run_instance(mut, cfg, i);
    };
    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(1, cfg.instances)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    PropertyTable table{mut.subject, {}};
    for (std::size_t r = 0; r < names.size(); ++r) {
        PropertyRow row{names[r]};
        for (std::size_t i = 0; i < results.size(); ++i) {
            const auto& o = results[i][r];
            ++row.checked;
            row.worst = std::max(row.worst, o.measure);
            if (!(o.measure <= cfg.tol)) {
                if (row.failures++ == 0) {
                    std::ostringstream d;
                    d << "instance " << i << ": " << (o.note.empty() ? "violation " + format_double(o.measure) : o.note);
                    row.detail = d.str();
                }
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

// Induced means of f; the comparator is the mean of (f + arithmetic)/2.
inline PropertyTable property_suite(const RepresentingFunction& f, const SamplerConfig& cfg = {},
                                    double solve_tol = 1e-12) {
    const double t = f.tprime();
    const RepresentingFunction upper = custom_function(
        [f, t](double x) { return 0.5 * (f(x) + (1 - t) + t * x); }, t, "blend(" + f.descriptor() + ")",
        [f, t](double v) { return 0.5 * (f.shifted(v) + t * v); }, false);
    MeanUnderTest mut;
    mut.subject = "induced " + f.descriptor();
    mut.solve = [f, solve_tol](const MeanProblem& p) { return induced_solve(f, p, solve_tol).x; };
    mut.comparator = [upper, solve_tol](const MeanProblem& p) { return induced_solve(upper, p, solve_tol).x; };
    mut.self_reduction = true;
    return run_property_suite(mut, cfg);
}

// Lambda extensions of lp; the comparator raises a power parameter by 1/2
// (capped at 1) or uses the arithmetic pair otherwise.
// Without explicit options the limits are resolved to tol_lambda = 1e-10.
inline PropertyTable property_suite(const LogPair& lp, const SamplerConfig& cfg = {},
                                    std::optional<LambdaOptions> options = std::nullopt) {
    LambdaOptions opt;
    if (options) opt = *options;
    else opt.tol_lambda = 1e-10;
    const LogPair upper = lp.q() ? logpair_power(std::min(1.0, *lp.q() + 0.5)) : logpair_power(1.0);
    MeanUnderTest mut;
    mut.subject = "lambda " + lp.descriptor();
    mut.solve = [lp, opt](const MeanProblem& p) { return lambda_extension(lp, p, opt).x; };
    mut.comparator = [upper, opt](const MeanProblem& p) { return lambda_extension(upper, p, opt).x; };
    mut.self_reduction = false;
    return run_property_suite(mut, cfg);
}

}  // namespace opmean

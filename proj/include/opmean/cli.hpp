#pragma once

// Command-line front end. parse_command() turns argv into a Command and
// run() executes it; both are usable from tests without a process.
//
// Exit codes: 0 success, 1 a property or bound check failed, 2 invalid
// input, 3 solver non-convergence (the report is still written).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "descriptors.hpp"
#include "hpdcore.hpp"
#include "karcher.hpp"
#include "koenigs.hpp"
#include "properties.hpp"
#include "report.hpp"
#include "sampling.hpp"
#include "thompson.hpp"

namespace opmean::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_invalid = 2;
inline constexpr int exit_no_convergence = 3;

inline const std::vector<std::string>& verbs() {
    static const std::vector<std::string> v{"mean2",   "induced",  "power", "lambda",     "karcher",
                                            "koenigs", "residual", "props", "contraction"};
    return v;
}

struct Command {
    std::string verb;
    std::vector<std::string> inputs;
    std::vector<double> weights;
    std::string mean;
    std::string logpair;
    double tol = 1e-10;
    double tol_lambda = 1e-8;
    int max_iter = 10000;
    std::string out;
    std::string csv;
    std::string report;
    std::uint64_t seed = 1;
    std::optional<double> x;
    std::optional<double> s;
    std::optional<double> r;
    double a = 1.0;
    double b = 1.0;
    std::optional<double> t_start;
    double shrink = 0.5;
    std::string point;
    int instances = 20;
    int samples = 0;
    std::size_t n = 3;
    std::size_t k = 3;
};

// Parses argv; on failure or --help returns nullopt and sets exit_code.
inline std::optional<Command> parse_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
                                            int& exit_code) {
    Command c;
    CLI::App app{"Operator means of positive-definite matrices"};
    app.add_option("verb", c.verb, "mean2 | induced | power | lambda | karcher | koenigs | residual | props | contraction")
        ->required()
        ->check(CLI::IsMember(verbs()));
    app.add_option("inputs", c.inputs, "matrix files");
    app.add_option("--weights", c.weights, "comma-separated positive weights")->delimiter(',')->allow_extra_args(false);
    app.add_option("--mean", c.mean, "mean descriptor");
    app.add_option("--logpair", c.logpair, "log pair descriptor");
    app.add_option("--tol", c.tol, "fixed-point tolerance in d_inf")->capture_default_str();
    app.add_option("--tol-lambda", c.tol_lambda, "lambda-extension tolerance")->capture_default_str();
    app.add_option("--max-iter", c.max_iter, "iteration cap")->capture_default_str();
    app.add_option("--out", c.out, "output file (default: stdout)");
    app.add_option("--csv", c.csv, "CSV of per-iteration step distances");
    app.add_option("--report", c.report, "report file (default: stderr)");
    app.add_option("--seed", c.seed, "random seed")->capture_default_str();
    app.add_option("--x", c.x, "scalar argument for koenigs");
    app.add_option("--s", c.s, "power-mean exponent in (0,1]");
    app.add_option("--r", c.r, "ball radius for contraction");
    app.add_option("--a", c.a, "coefficient a for contraction")->capture_default_str();
    app.add_option("--b", c.b, "coefficient b for contraction")->capture_default_str();
    app.add_option("--t-start", c.t_start, "first t of the lambda schedule");
    app.add_option("--shrink", c.shrink, "ratio of the lambda schedule")->capture_default_str();
    app.add_option("--point", c.point, "matrix file at which residual evaluates");
    app.add_option("--instances", c.instances, "random instances for props")->capture_default_str();
    app.add_option("--samples", c.samples, "random pairs for contraction")->capture_default_str();
    app.add_option("--n", c.n, "matrix size for random instances")->capture_default_str();
    app.add_option("--k", c.k, "number of matrices for random instances")->capture_default_str();
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        exit_code = exit_ok;
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        exit_code = exit_invalid;
        return std::nullopt;
    }
    return c;
}

namespace detail {

inline PdMatrix load_pd(const std::string& path) {
    try {
        return PdMatrix(read_matrix_file(path));
    } catch (const not_positive_definite& e) {
        throw not_positive_definite(path + ": " + e.what(), e.min_eigenvalue());
    }
}

inline MeanProblem load_problem(const Command& c, std::ostream& err) {
    if (c.inputs.empty()) throw domain_error("no input matrices given");
    std::vector<PdMatrix> mats;
    for (const auto& p : c.inputs) mats.push_back(load_pd(p));
    std::vector<double> w = c.weights;
    if (w.empty()) w.assign(mats.size(), 1.0 / static_cast<double>(mats.size()));
    if (w.size() != mats.size())
        throw dimension_error(std::to_string(w.size()) + " weights given for " + std::to_string(mats.size()) + " matrices");
    double sum = 0;
    for (double x : w) {
        if (!(x > 0.0)) throw domain_error("weights must be positive");
        sum += x;
    }
    if (!c.weights.empty() && std::abs(sum - 1.0) > 1e-14)
        err << "warning: weights sum to " << format_double(sum) << "; normalized\n";
    return MeanProblem::normalized(std::move(w), std::move(mats));
}

inline void emit_text(const Command& c, std::ostream& out, const std::string& text) {
    if (c.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(c.out);
    if (!f) throw parse_error("cannot write " + c.out);
    f << text;
}

inline void emit_matrix(const Command& c, std::ostream& out, const HermMatrix& m) {
    std::ostringstream s;
    write_matrix(s, m);
    emit_text(c, out, s.str());
}

inline void emit_report(const Command& c, std::ostream& err, const SolveReport& r) {
    if (c.report.empty()) {
        write_report(err, r);
    } else {
        std::ofstream f(c.report);
        if (!f) throw parse_error("cannot write " + c.report);
        write_report(f, r);
    }
    if (!c.csv.empty()) {
        std::ofstream f(c.csv);
        if (!f) throw parse_error("cannot write " + c.csv);
        write_step_csv(f, r);
    }
}

inline LambdaOptions lambda_options(const Command& c) {
    LambdaOptions o;
    o.t_start = c.t_start;
    o.shrink = c.shrink;
    o.tol_lambda = c.tol_lambda;
    o.inner_max_iter = std::max(c.max_iter, 1);
    return o;
}

inline void warn_unvalidated(const RepresentingFunction& f, std::ostream& err) {
    if (!f.validated())
        err << "warning: " << f.descriptor() << " lies beyond the validated range t0 of its log pair\n";
}

inline int solve_and_emit(const Command& c, std::ostream& out, std::ostream& err, const Solution& s) {
    emit_matrix(c, out, s.x);
    emit_report(c, err, s.report);
    return exit_ok;
}

inline int dispatch(const Command& c, std::ostream& out, std::ostream& err) {
    const std::string& v = c.verb;
    if (v == "mean2") {
        if (c.mean.empty()) throw domain_error("mean2 needs --mean");
        if (c.inputs.size() != 2) throw domain_error("mean2 needs exactly two matrix files");
        const auto f = parse_mean(c.mean);
        warn_unvalidated(f, err);
        emit_matrix(c, out, mean_eval(f, load_pd(c.inputs[0]), load_pd(c.inputs[1])));
        return exit_ok;
    }
    if (v == "induced") {
        if (c.mean.empty()) throw domain_error("induced needs --mean");
        const auto f = parse_mean(c.mean);
        warn_unvalidated(f, err);
        return solve_and_emit(c, out, err, induced_solve(f, load_problem(c, err), c.tol, c.max_iter));
    }
    if (v == "power") {
        if (!c.s) throw domain_error("power needs --s");
        return solve_and_emit(c, out, err, power_mean(*c.s, load_problem(c, err), c.tol, c.max_iter));
    }
    if (v == "lambda") {
        if (c.logpair.empty()) throw domain_error("lambda needs --logpair");
        return solve_and_emit(c, out, err, lambda_extension(parse_logpair(c.logpair), load_problem(c, err), lambda_options(c)));
    }
    if (v == "karcher") return solve_and_emit(c, out, err, classical_karcher(load_problem(c, err), lambda_options(c)));
    if (v == "koenigs") {
        if (!c.x) throw domain_error("koenigs needs --x");
        double value;
        if (!c.mean.empty()) value = koenigs_log(parse_mean(c.mean), *c.x);
        else if (!c.logpair.empty()) value = parse_logpair(c.logpair).log(*c.x);
        else throw domain_error("koenigs needs --mean or --logpair");
        emit_text(c, out, format_double(value) + "\n");
        return exit_ok;
    }
    if (v == "residual") {
        if (c.logpair.empty() || c.point.empty()) throw domain_error("residual needs --logpair and --point");
        const double r = karcher_residual(parse_logpair(c.logpair), load_pd(c.point), load_problem(c, err));
        emit_text(c, out, "karcher_residual=" + format_double(r) + "\n");
        return exit_ok;
    }
    if (v == "props") {
        SamplerConfig cfg;
        cfg.instances = c.instances;
        cfg.n = c.n;
        cfg.k = c.k;
        cfg.seed = c.seed;
        PropertyTable t;
        if (!c.mean.empty()) t = property_suite(parse_mean(c.mean), cfg);
        else if (!c.logpair.empty()) t = property_suite(parse_logpair(c.logpair), cfg);
        else throw domain_error("props needs --mean or --logpair");
        emit_text(c, out, t.to_text());
        return t.all_pass() ? exit_ok : exit_check_failed;
    }
    if (v == "contraction") {
        if (!c.r) throw domain_error("contraction needs --r");
        const auto est = rho_affine(*c.r, c.a, c.b);
        std::ostringstream s;
        s << "rho=" << format_double(est.rho) << '\n';
        bool ok = true;
        if (c.samples > 0) {
            Rng rng(c.seed);
            const PdMatrix center = random_pd(c.n, rng);
            double worst = 0.0;
            for (int i = 0; i < c.samples; ++i) {
                const PdMatrix x = sample_ball(center, *c.r, rng), y = sample_ball(center, *c.r, rng);
                const double d = d_inf(x, y);
                if (d <= 0.0) continue;
                const PdMatrix hx(c.a * center.herm() + c.b * x.herm()), hy(c.a * center.herm() + c.b * y.herm());
                worst = std::max(worst, d_inf(hx, hy) / d);
            }
            s << "samples=" << c.samples << '\n' << "max_ratio=" << format_double(worst) << '\n';
            ok = worst <= est.rho + 1e-10;
        }
        emit_text(c, out, s.str());
        return ok ? exit_ok : exit_check_failed;
    }
    throw domain_error("unknown verb " + v);
}

}  // namespace detail

inline int run(const Command& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    try {
        return detail::dispatch(c, out, err);
    } catch (const non_convergence& e) {
        try {
            detail::emit_report(c, err, e.report());
        } catch (const std::exception&) {
        }
        err << "error: " << e.what() << '\n';
        return exit_no_convergence;
    } catch (const convergence_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_no_convergence;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid;
    }
}

inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    int code = exit_ok;
    auto c = parse_command(argc, argv, out, err, code);
    if (!c) return code;
    return run(*c, out, err);
}

}  // namespace opmean::cli

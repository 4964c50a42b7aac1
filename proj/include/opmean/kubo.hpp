#pragma once

// Representing functions of two-variable operator means.

#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "scalar.hpp"

namespace opmean {

struct PowerParams {
    double t;
    double q;
};

struct MixtureAtom {
    double s;
    double nu;
};

class LogPair;

// Normalized operator monotone function f with f(1) = 1.
//
// Besides f itself every instance carries the shifted form u -> f(1+u) - 1,
// which the solvers and the Koenigs iteration use to avoid cancellation
// near the fixed point 1.
class RepresentingFunction {
public:
    enum class Kind { power_family, harmonic_mixture, semigroup_member, custom };

    RepresentingFunction(Kind kind, ScalarFn value, ScalarFn shifted, double tprime, std::string descriptor)
        : kind_(kind), value_(std::move(value)), shifted_(std::move(shifted)), tprime_(tprime),
          descriptor_(std::move(descriptor)) {
        if (!shifted_) {
            auto v = value_;
            shifted_ = [v](double u) { return v(1.0 + u) - 1.0; };
        }
    }

    double operator()(double x) const { return value_(x); }
    double shifted(double u) const { return shifted_(u); }
    // f(x) - 1, through the shifted form where x - 1 is exact.
    double minus_one(double x) const {
        return (x >= 0.5 && x <= 2.0) ? shifted_(x - 1.0) : value_(x) - 1.0;
    }

    Kind kind() const noexcept { return kind_; }
    double tprime() const noexcept { return tprime_; }
    const std::string& descriptor() const noexcept { return descriptor_; }
    const std::optional<PowerParams>& power() const noexcept { return power_; }
    const std::vector<MixtureAtom>& atoms() const noexcept { return atoms_; }
    const std::shared_ptr<const LogPair>& logpair() const noexcept { return logpair_; }
    double semigroup_t() const noexcept { return semigroup_t_; }
    bool validated() const noexcept { return validated_; }

    bool left_trivial() const noexcept { return tprime_ <= 1e-14; }
    bool right_trivial() const noexcept { return tprime_ >= 1.0 - 1e-14; }
    bool nontrivial() const noexcept { return !left_trivial() && !right_trivial(); }

    // Attribute setters used by the factories.
    RepresentingFunction& with_power(PowerParams p) { power_ = p; return *this; }
    RepresentingFunction& with_atoms(std::vector<MixtureAtom> a) { atoms_ = std::move(a); return *this; }
    RepresentingFunction& with_logpair(std::shared_ptr<const LogPair> lp, double t, bool validated) {
        logpair_ = std::move(lp);
        semigroup_t_ = t;
        validated_ = validated;
        return *this;
    }

private:
    Kind kind_;
    ScalarFn value_;
    ScalarFn shifted_;
    double tprime_;
    std::string descriptor_;
    std::optional<PowerParams> power_;
    std::vector<MixtureAtom> atoms_;
    std::shared_ptr<const LogPair> logpair_;
    double semigroup_t_ = 0.0;
    bool validated_ = true;
};

inline double harmonic_envelope(double t, double x) { return 1.0 / ((1.0 - t) + t / x); }
inline double arithmetic_envelope(double t, double x) { return (1.0 - t) + t * x; }

// Grid checks: f(1) = 1, monotone, f'(1) in [0,1], harmonic/arithmetic envelope.
// Returns an empty string when all pass, otherwise the first failure.
inline std::string check_representing(const RepresentingFunction& f, bool envelope = true) {
    std::ostringstream why;
    why.precision(17);
    const double t = f.tprime();
    if (!(std::abs(f(1.0) - 1.0) <= 1e-14)) {
        why << "f(1) = " << f(1.0) << ", expected 1";
        return why.str();
    }
    if (!(t >= 0.0 && t <= 1.0)) {
        why << "f'(1) = " << t << " is outside [0,1]";
        return why.str();
    }
    double prev = -1.0;
    for (double x : test_grid()) {
        const double y = f(x);
        if (!std::isfinite(y) || !(y > 0.0)) {
            why << "f(" << x << ") = " << y << " is not a positive number";
            return why.str();
        }
        if (y < prev) {
            why << "f decreases at x = " << x;
            return why.str();
        }
        prev = y;
        if (envelope && f.nontrivial()) {
            const double lo = harmonic_envelope(t, x), hi = arithmetic_envelope(t, x);
            if (y < lo - 1e-12 * std::max(1.0, lo) || y > hi + 1e-12 * std::max(1.0, hi)) {
                why << "f(" << x << ") = " << y << " leaves the envelope [" << lo << ", " << hi << "]";
                return why.str();
            }
        }
    }
    return {};
}

inline void validate(const RepresentingFunction& f) {
    if (auto why = check_representing(f); !why.empty())
        throw domain_error("invalid representing function " + f.descriptor() + ": " + why);
}

namespace detail {
inline constexpr double q_zero_threshold = 1e-8;
}

// [(1-t) + t x^q]^{1/q}; x^t at q = 0.
inline RepresentingFunction power_family(double t, double q) {
    if (!(t >= 0.0 && t <= 1.0)) throw domain_error("power family: t = " + format_double(t) + " is outside [0,1]");
    if (!(q >= -1.0 && q <= 1.0))
        throw domain_error("power family: q = " + format_double(q) + " is outside [-1,1], not operator monotone");
    ScalarFn value, shifted;
    if (std::abs(q) < detail::q_zero_threshold) {
        value = [t](double x) { return std::pow(x, t); };
        shifted = [t](double u) { return std::expm1(t * std::log1p(u)); };
    } else {
        value = [t, q](double x) { return std::pow((1.0 - t) + t * std::pow(x, q), 1.0 / q); };
        shifted = [t, q](double u) {
            return std::expm1(std::log1p(t * std::expm1(q * std::log1p(u))) / q);
        };
    }
    RepresentingFunction f(RepresentingFunction::Kind::power_family, std::move(value), std::move(shifted), t,
                           "power:t=" + format_double(t) + ",q=" + format_double(q));
    f.with_power({t, q});
    return f;
}

// sum nu_i [(1-s_i) + s_i/x]^{-1}
inline RepresentingFunction harmonic_mixture(std::vector<MixtureAtom> atoms) {
    if (atoms.empty()) throw domain_error("harmonic mixture needs at least one atom");
    double total = 0.0, tprime = 0.0;
    std::string desc = "mixture:";
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const auto& a = atoms[i];
        if (!(a.s >= 0.0 && a.s <= 1.0)) throw domain_error("harmonic mixture: atom s = " + format_double(a.s) + " is outside [0,1]");
        if (!(a.nu > 0.0)) throw domain_error("harmonic mixture: atom weight " + format_double(a.nu) + " is not positive");
        total += a.nu;
        tprime += a.s * a.nu;
        if (i) desc += ';';
        desc += '(' + format_double(a.s) + ',' + format_double(a.nu) + ')';
    }
    if (!(std::abs(total - 1.0) <= 1e-12))
        throw domain_error("harmonic mixture: atom weights sum to " + format_double(total) + ", expected 1");
    auto value = [atoms](double x) {
        double y = 0.0;
        for (const auto& a : atoms) y += a.nu / ((1.0 - a.s) + a.s / x);
        return y;
    };
    auto shifted = [atoms](double u) {
        double y = 0.0;
        for (const auto& a : atoms) y += a.nu * a.s * u / (1.0 + (1.0 - a.s) * u);
        return y;
    };
    RepresentingFunction f(RepresentingFunction::Kind::harmonic_mixture, value, shifted, tprime, desc);
    f.with_atoms(std::move(atoms));
    return f;
}

inline RepresentingFunction arithmetic_mean_fn(double t) { return harmonic_mixture({{0.0, 1.0 - t}, {1.0, t}}); }

// Custom function with a declared f'(1); grid-checked unless check is false.
inline RepresentingFunction custom_function(ScalarFn value, double tprime, std::string name, ScalarFn shifted = {},
                                            bool check = true) {
    RepresentingFunction f(RepresentingFunction::Kind::custom, std::move(value), std::move(shifted), tprime,
                           std::move(name));
    if (check) validate(f);
    return f;
}

// x f(1/x), the mean with its arguments swapped.
inline RepresentingFunction transpose(const RepresentingFunction& f) {
    if (const auto& p = f.power()) return power_family(1.0 - p->t, p->q);
    if (!f.atoms().empty()) {
        std::vector<MixtureAtom> flipped;
        for (const auto& a : f.atoms()) flipped.push_back({1.0 - a.s, a.nu});
        return harmonic_mixture(std::move(flipped));
    }
    return custom_function([f](double x) { return x * f(1.0 / x); }, 1.0 - f.tprime(),
                           "transpose(" + f.descriptor() + ")",
                           [f](double u) { return u + (1.0 + u) * f.shifted(-u / (1.0 + u)); }, false);
}

// x / g(x)
inline RepresentingFunction conjugate(const RepresentingFunction& g) {
    return custom_function([g](double x) { return x / g(x); }, 1.0 - g.tprime(), "conjugate(" + g.descriptor() + ")",
                           [g](double u) {
                               const double gs = g.shifted(u);
                               return (u - gs) / (1.0 + gs);
                           },
                           false);
}

// Representing function g of the two-variable induced mean
// X = w1 M(X, I) + w2 M(X, x), evaluated by inverting
// g^{-1}(x) = x f^{-1}((1 - w1 f(1/x)) / w2).
inline RepresentingFunction induced2_repfn(const RepresentingFunction& f, double w1, double w2) {
    if (!(w1 > 0.0 && w2 > 0.0) || !(std::abs(w1 + w2 - 1.0) <= 1e-12))
        throw domain_error("induced2_repfn: weights must be positive and sum to 1");
    if (!f.nontrivial()) throw domain_error("induced2_repfn: f must be non-trivial");

    auto g_inverse = [f, w1, w2](double x) {
        const double z = (1.0 - w1 * f(1.0 / x)) / w2;
        const auto finv = detail::try_invert([&f](double v) { return f(v); }, z);
        if (!finv) return z < 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
        return x * *finv;
    };
    auto g = [g_inverse](double y) {
        if (y == 1.0) return 1.0;
        const auto x = detail::try_invert(g_inverse, y, std::pair{std::min(1.0, y), std::max(1.0, y)});
        if (!x) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "induced two-variable function: g^{-1} cannot be inverted at x = " << y;
            throw range_error(msg.str());
        }
        return *x;
    };
    std::ostringstream desc;
    desc << "induced2(" << f.descriptor() << ";w=" << format_double(w1) << ',' << format_double(w2) << ')';
    return custom_function(g, w2, desc.str(), {}, false);
}

}  // namespace opmean

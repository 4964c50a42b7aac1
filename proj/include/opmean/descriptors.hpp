#pragma once

// Text descriptors for means and log pairs:
//   power:t=<v>,q=<v> | mixture:(s1,v1);(s2,v2);... | semigroup:base=<descriptor>,t=<v>
//   logpair:power:q=<v> | logpair:koenigs:base=<mean> | logpair:affine:base=<mean>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "koenigs.hpp"
#include "kubo.hpp"

namespace opmean {

namespace detail {

inline double parse_number(std::string_view text, std::string_view context) {
    const std::string s(text);
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::logic_error&) {
    }
    throw parse_error("malformed number '" + s + "' in " + std::string(context));
}

inline bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

// "a=1,b=2" -> {a:1, b:2}; keys must be exactly `keys`.
inline std::map<std::string, double> parse_params(std::string_view body, const std::vector<std::string>& keys,
                                                  std::string_view context) {
    std::map<std::string, double> out;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        const auto comma = body.find(',', pos);
        const auto item = body.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw parse_error("expected key=value in " + std::string(context));
        const std::string key(item.substr(0, eq));
        if (std::find(keys.begin(), keys.end(), key) == keys.end() || out.count(key))
            throw parse_error("unexpected or repeated key '" + key + "' in " + std::string(context));
        out[key] = parse_number(item.substr(eq + 1), context);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    for (const auto& k : keys)
        if (!out.count(k)) throw parse_error("missing key '" + k + "' in " + std::string(context));
    return out;
}

}  // namespace detail

inline LogPair parse_logpair(std::string_view text);

inline RepresentingFunction parse_mean(std::string_view text) {
    using detail::starts_with;
    const std::string ctx = "mean descriptor '" + std::string(text) + "'";
    if (starts_with(text, "power:")) {
        const auto p = detail::parse_params(text.substr(6), {"t", "q"}, ctx);
        return power_family(p.at("t"), p.at("q"));
    }
    if (starts_with(text, "mixture:")) {
        std::vector<MixtureAtom> atoms;
        std::string_view body = text.substr(8);
        while (!body.empty()) {
            if (body.front() != '(') throw parse_error("expected '(' in " + ctx);
            const auto close = body.find(')');
            if (close == std::string_view::npos) throw parse_error("unclosed '(' in " + ctx);
            const auto inner = body.substr(1, close - 1);
            const auto comma = inner.find(',');
            if (comma == std::string_view::npos) throw parse_error("atom must be (s,nu) in " + ctx);
            atoms.push_back({detail::parse_number(inner.substr(0, comma), ctx), detail::parse_number(inner.substr(comma + 1), ctx)});
            body = body.substr(close + 1);
            if (!body.empty()) {
                if (body.front() != ';') throw parse_error("atoms must be separated by ';' in " + ctx);
                body = body.substr(1);
                if (body.empty()) throw parse_error("trailing ';' in " + ctx);
            }
        }
        if (atoms.empty()) throw parse_error("no atoms in " + ctx);
        return harmonic_mixture(std::move(atoms));
    }
    if (starts_with(text, "semigroup:base=")) {
        const auto body = text.substr(15);
        const auto split = body.rfind(",t=");
        if (split == std::string_view::npos) throw parse_error("missing ',t=' in " + ctx);
        const auto base = body.substr(0, split);
        const double t = detail::parse_number(body.substr(split + 3), ctx);
        const LogPair lp = starts_with(base, "logpair:") ? parse_logpair(base) : logpair_from_f(parse_mean(base));
        return semigroup_member(lp, t);
    }
    throw parse_error("unknown " + ctx);
}

inline LogPair parse_logpair(std::string_view text) {
    using detail::starts_with;
    const std::string ctx = "log pair descriptor '" + std::string(text) + "'";
    if (starts_with(text, "logpair:power:")) {
        const auto p = detail::parse_params(text.substr(14), {"q"}, ctx);
        return logpair_power(p.at("q"));
    }
    if (starts_with(text, "logpair:koenigs:base=")) return logpair_from_f(parse_mean(text.substr(21)));
    if (starts_with(text, "logpair:affine:base=")) return logpair_affine_from_f(parse_mean(text.substr(20)));
    throw parse_error("unknown " + ctx);
}

}  // namespace opmean

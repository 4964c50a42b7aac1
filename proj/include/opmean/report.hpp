#pragma once

// Flat key=value serialization of solve reports and a CSV of step distances.

#include <ostream>

#include "karcher.hpp"

namespace opmean {

inline void write_report(std::ostream& out, const SolveReport& r) {
    out << "method=" << r.method << '\n';
    out << "converged=" << (r.converged ? "true" : "false") << '\n';
    out << "iterations=" << r.iterations << '\n';
    out << "residual=" << format_double(r.fixed_point_residual) << '\n';
    if (r.rho_estimate) out << "rho_estimate=" << format_double(*r.rho_estimate) << '\n';
    if (r.karcher_residual) out << "karcher_residual=" << format_double(*r.karcher_residual) << '\n';
    if (r.t_schedule) {
        out << "levels=" << r.t_schedule->size() << '\n';
        for (std::size_t l = 0; l < r.t_schedule->size(); ++l) {
            out << "t_l[" << l << "]=" << format_double((*r.t_schedule)[l]) << '\n';
            if (l < r.level_iterations.size()) out << "inner_iterations[" << l << "]=" << r.level_iterations[l] << '\n';
            if (l >= 1 && l - 1 < r.level_distances.size())
                out << "level_distance[" << l << "]=" << format_double(r.level_distances[l - 1]) << '\n';
            if (l >= 1 && l - 1 < r.extrapolated_distances.size())
                out << "extrapolated_distance[" << l << "]=" << format_double(r.extrapolated_distances[l - 1]) << '\n';
        }
    }
}

inline void write_step_csv(std::ostream& out, const SolveReport& r) {
    out << "iteration,step_distance\n";
    for (std::size_t i = 0; i < r.step_distances.size(); ++i) out << i << ',' << format_double(r.step_distances[i]) << '\n';
}

}  // namespace opmean

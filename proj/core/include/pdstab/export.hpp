#pragma once

// Text output: CSV with 17 significant digits, '.' radix and a header row,
// independent of the global locale. NaN is written as "NaN".

#include "pdstab/lyapunov.hpp"
#include "pdstab/simulator.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace pdstab::io {

/// printf("%.17g") equivalent, locale independent.
std::string format_double(double v);

/// t,x,V_1..V_n,U_1..U_n; one block per snapshot.
void write_trajectory_csv(std::ostream& os, const TransformedSystem& system, const Trajectory& trajectory);

/// t,xi_1(0)..xi_n(0),xi_1(1)..xi_n(1) in (xi_-; xi_+) order, plus the residual.
void write_boundary_csv(std::ostream& os, const Trajectory& trajectory);

/// t,L0,L1,L2,Ltotal,E_H2,E_v1,E_v2
void write_lyapunov_csv(std::ostream& os, const LyapunovTrace& trace);

/// Whitespace-separated t, E_H2, Ltotal and the fitted line (if any).
void write_decay_dat(std::ostream& os, const LyapunovTrace& trace);

/// gnuplot script reading `dat_name` and writing `png_name`.
std::string decay_plot_script(const std::string& dat_name, const std::string& png_name,
                              const LyapunovTrace& trace);

/// Generic rows; every row must have header.size() entries.
void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace pdstab::io

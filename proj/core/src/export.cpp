#include "pdstab/export.hpp"

#include "pdstab/error.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace pdstab::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

void write_row(std::ostream& os, const std::vector<double>& row) {
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (k) os << ',';
    os << format_double(row[k]);
  }
  os << '\n';
}

void write_header(std::ostream& os, const std::vector<std::string>& header) {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) os << ',';
    os << header[k];
  }
  os << '\n';
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  write_header(os, header);
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw Error(ErrorCode::DimensionMismatch, "csv row width differs from header");
    write_row(os, row);
  }
}

void write_trajectory_csv(std::ostream& os, const TransformedSystem& system, const Trajectory& trajectory) {
  const Index n = system.n();
  std::vector<std::string> header{"t", "x"};
  for (Index k = 1; k <= n; ++k) header.push_back("V_" + std::to_string(k));
  for (Index k = 1; k <= n; ++k) header.push_back("U_" + std::to_string(k));
  write_header(os, header);
  std::vector<double> row(static_cast<std::size_t>(2 + 2 * n));
  for (const Snapshot& snap : trajectory.samples) {
    const GridState& s = snap.state;
    const Matrix u = system.to_U(s.V);
    for (Index i = 0; i < s.N; ++i) {
      row[0] = s.t;
      row[1] = s.x(i);
      for (Index k = 0; k < n; ++k) {
        row[static_cast<std::size_t>(2 + k)] = s.V(i, k);
        row[static_cast<std::size_t>(2 + n + k)] = u(i, k);
      }
      write_row(os, row);
    }
  }
}

void write_boundary_csv(std::ostream& os, const Trajectory& trajectory) {
  if (trajectory.samples.empty()) {
    write_header(os, {"t", "residual"});
    return;
  }
  const Index n = trajectory.samples.front().traces.xi_left().size();
  std::vector<std::string> header{"t"};
  for (Index k = 1; k <= n; ++k) header.push_back("xi_" + std::to_string(k) + "_0");
  for (Index k = 1; k <= n; ++k) header.push_back("xi_" + std::to_string(k) + "_1");
  header.emplace_back("residual");
  write_header(os, header);
  for (const Snapshot& snap : trajectory.samples) {
    const Vector l = snap.traces.xi_left();
    const Vector r = snap.traces.xi_right();
    std::vector<double> row{snap.state.t};
    row.insert(row.end(), l.data(), l.data() + l.size());
    row.insert(row.end(), r.data(), r.data() + r.size());
    row.push_back(snap.traces.residual);
    write_row(os, row);
  }
}

void write_lyapunov_csv(std::ostream& os, const LyapunovTrace& trace) {
  write_header(os, {"t", "L0", "L1", "L2", "Ltotal", "E_H2", "E_v1", "E_v2"});
  for (const LyapunovSample& s : trace.samples) {
    write_row(os, {s.t, s.L0, s.L1, s.L2, s.Ltotal, s.E_H2, s.E_v1, s.E_v2});
  }
}

void write_decay_dat(std::ostream& os, const LyapunovTrace& trace) {
  os << "# t E_H2 Ltotal fit\n";
  for (const LyapunovSample& s : trace.samples) {
    const double fit = trace.fit ? std::exp(trace.fit->intercept + trace.fit->slope * s.t)
                                 : std::numeric_limits<double>::quiet_NaN();
    os << format_double(s.t) << ' ' << format_double(s.E_H2) << ' ' << format_double(s.Ltotal) << ' '
       << format_double(fit) << '\n';
  }
}

std::string decay_plot_script(const std::string& dat_name, const std::string& png_name,
                              const LyapunovTrace& trace) {
  std::ostringstream os;
  os << "set terminal pngcairo size 900,600\n"
     << "set output '" << png_name << "'\n"
     << "set logscale y\n"
     << "set xlabel 't'\n"
     << "set ylabel 'energy'\n"
     << "set key top right\n";
  os << "plot '" << dat_name << "' using 1:2 with lines title 'E_{H2}', \\\n"
     << "     '" << dat_name << "' using 1:3 with lines title 'L_{total}'";
  if (trace.fit) {
    os << ", \\\n     '" << dat_name << "' using 1:4 with lines dashtype 2 title 'fit, nu = "
       << format_double(trace.fit->nu_hat) << "'";
  }
  os << '\n';
  return os.str();
}

}  // namespace pdstab::io

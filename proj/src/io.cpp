#include "bih/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bih {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_fields_csv(const std::string& path, const Grid& grid,
                      const std::vector<std::pair<std::string, const std::vector<double>*>>& columns) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "# grid=" << (grid.is_radial() ? "radial" : "cartesian")
      << " n=" << (grid.is_radial() ? grid.r.size() : grid.n_side)
      << " extent=" << format_double(grid.extent()) << "\n";
  if (grid.is_radial())
    out << "r";
  else
    out << "x1,x2";
  for (const auto& [name, _] : columns) out << "," << name;
  out << "\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto xy = grid.node_xy(i);
    if (grid.is_radial())
      out << format_double(xy[0]);
    else
      out << format_double(xy[0]) << "," << format_double(xy[1]);
    for (const auto& [_, col] : columns) out << "," << format_double((*col)[i]);
    out << "\n";
  }
}

std::vector<std::vector<double>> read_csv_columns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::vector<std::vector<double>> cols;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_done) {  // column names
      header_done = true;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (cols.size() <= c) cols.emplace_back();
      cols[c].push_back(std::strtod(cell.c_str(), nullptr));
      ++c;
    }
  }
  return cols;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

nlohmann::json decay_to_json(const DecayReport& d) {
  return {
      {"kind", d.kind == DecayReport::Kind::exponential ? "exponential" : "power"},
      {"fitted_rate", d.fitted_rate},
      {"expected_rate", d.expected_rate},
      {"annulus", {d.annulus_lo, d.annulus_hi}},
      {"fit_residual", d.fit_residual},
      {"degenerate", d.degenerate},
      {"underflow_radius", d.underflow_radius},
      {"points_used", d.points_used},
  };
}

nlohmann::json observables_to_json(const Observables& o) {
  nlohmann::json j{
      {"flux", o.flux},
      {"flux_identity_gap", o.flux_identity_gap},
      {"energy_direct", o.energy_direct},
      {"energy_topological", o.energy_topological},
      {"current_integral", o.current_integral},
      {"current_area", o.current_area},
      {"decay", decay_to_json(o.decay)},
      {"bps_residual", o.bps_residual},
      {"energy_identity_gap", o.energy_identity_gap},
      {"stress_residual", {{"t11", o.stress.t11}, {"t22", o.stress.t22}, {"t12", o.stress.t12}}},
      {"f_anti_clamped", o.f_anti_clamped},
  };
  if (o.curvature_total != 0.0 || o.eta_slope_expected != 0.0) {
    j["curvature_total"] = o.curvature_total;
    j["eta_slope"] = o.eta_slope;
    j["eta_slope_expected"] = o.eta_slope_expected;
  }
  return j;
}

nlohmann::json report_to_json(const SolveReport& r, bool with_history) {
  nlohmann::json j{
      {"iterations", r.iterations},
      {"converged", r.converged},
      {"ascending", r.ascending},
      {"final_update", r.final_update},
      {"final_residual", r.final_residual},
      {"monotone_violations", r.monotone_violations},
      {"bracket_violations", r.bracket_violations},
  };
  if (with_history) {
    j["update_history"] = r.update_history;
    j["residual_history"] = r.residual_history;
  }
  return j;
}

}  // namespace bih

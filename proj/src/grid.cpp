#include "bih/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "bih/errors.hpp"

namespace bih {

std::shared_ptr<const Grid> make_radial_grid(double r_max, std::size_t n_nodes, double stretch) {
  if (r_max <= 0.0 || n_nodes < 8) throw std::invalid_argument("radial grid: need r_max > 0 and n >= 8");
  auto g = std::make_shared<Grid>();
  g->kind = GridKind::radial;
  g->stretch = stretch;
  g->r.resize(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(n_nodes - 1);
    g->r[i] = stretch == 0.0 ? r_max * t : r_max * std::expm1(stretch * t) / std::expm1(stretch);
  }
  g->r.front() = 0.0;
  g->r.back() = r_max;

  g->face.resize(n_nodes - 1);
  g->volume.resize(n_nodes);
  std::vector<double> rmid(n_nodes - 1);
  for (std::size_t i = 0; i + 1 < n_nodes; ++i) {
    rmid[i] = 0.5 * (g->r[i] + g->r[i + 1]);
    g->face[i] = rmid[i] / (g->r[i + 1] - g->r[i]);
  }
  g->volume[0] = 0.5 * rmid[0] * rmid[0];
  for (std::size_t i = 1; i + 1 < n_nodes; ++i)
    g->volume[i] = 0.5 * (rmid[i] * rmid[i] - rmid[i - 1] * rmid[i - 1]);
  g->volume[n_nodes - 1] = 0.5 * (r_max * r_max - rmid[n_nodes - 2] * rmid[n_nodes - 2]);
  return g;
}

std::shared_ptr<const Grid> make_cartesian_grid(double half_width, std::size_t n_side) {
  if (half_width <= 0.0 || n_side < 8) throw std::invalid_argument("cartesian grid: need L > 0 and n >= 8");
  auto g = std::make_shared<Grid>();
  g->kind = GridKind::cartesian;
  g->n_side = n_side;
  g->half_width = half_width;
  g->h = 2.0 * half_width / static_cast<double>(n_side - 1);
  return g;
}

Field make_field(std::shared_ptr<const Grid> grid, std::string name, double fill) {
  Field f;
  f.values.assign(grid->size(), fill);
  f.grid = std::move(grid);
  f.name = std::move(name);
  return f;
}

void require_finite(const Field& f) {
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (!std::isfinite(f.values[i]))
      throw NonFinite("field '" + f.name + "' has a non-finite value at node " + std::to_string(i));
  }
}

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace bih

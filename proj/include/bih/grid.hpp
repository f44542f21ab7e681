#ifndef BIH_GRID_HPP
#define BIH_GRID_HPP

#include <array>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace bih {

enum class GridKind { radial, cartesian };

/// Structured solver grid: either a radial line [0, r_max] with an axis
/// regularity condition, or a square [-L, L]^2 (row-major index ix*n + iy).
/// The outer boundary always carries a homogeneous Dirichlet condition.
struct Grid {
  GridKind kind = GridKind::radial;

  // radial
  std::vector<double> r;       // nodes, r.front() == 0, r.back() == r_max
  double stretch = 0.0;        // 0 = uniform
  std::vector<double> face;    // r_{i+1/2} / (r_{i+1} - r_i), size n-1
  std::vector<double> volume;  // FV cell areas / (2*pi), size n

  // cartesian
  std::size_t n_side = 0;
  double half_width = 0.0;
  double h = 0.0;

  std::size_t size() const {
    return kind == GridKind::radial ? r.size() : n_side * n_side;
  }
  double extent() const {
    return kind == GridKind::radial ? r.back() : half_width;
  }
  bool is_radial() const { return kind == GridKind::radial; }

  std::array<double, 2> node_xy(std::size_t i) const {
    if (kind == GridKind::radial) return {r[i], 0.0};
    std::size_t ix = i / n_side, iy = i % n_side;
    return {-half_width + static_cast<double>(ix) * h,
            -half_width + static_cast<double>(iy) * h};
  }
  double node_radius(std::size_t i) const {
    if (kind == GridKind::radial) return r[i];
    auto p = node_xy(i);
    return std::sqrt(p[0] * p[0] + p[1] * p[1]);
  }
  bool is_boundary(std::size_t i) const {
    if (kind == GridKind::radial) return i + 1 == r.size();
    std::size_t ix = i / n_side, iy = i % n_side;
    return ix == 0 || iy == 0 || ix + 1 == n_side || iy + 1 == n_side;
  }
  /// Largest spacing adjacent to node i, used for discretization slack.
  double local_h(std::size_t i) const {
    if (kind == GridKind::cartesian) return h;
    double hl = i > 0 ? r[i] - r[i - 1] : r[1] - r[0];
    double hr = i + 1 < r.size() ? r[i + 1] - r[i] : hl;
    return hl > hr ? hl : hr;
  }
};

/// Radial nodes r_i = r_max * (e^{s*t_i} - 1)/(e^s - 1), t uniform in [0,1];
/// stretch = 0 gives a uniform grid.
std::shared_ptr<const Grid> make_radial_grid(double r_max, std::size_t n_nodes,
                                             double stretch = 2.0);

std::shared_ptr<const Grid> make_cartesian_grid(double half_width, std::size_t n_side);

/// A scalar quantity sampled at every grid node.
struct Field {
  std::shared_ptr<const Grid> grid;
  std::vector<double> values;
  std::string name;

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

Field make_field(std::shared_ptr<const Grid> grid, std::string name, double fill = 0.0);

/// Throws NonFinite if any entry is NaN or Inf.
void require_finite(const Field& f);

double sup_norm(const std::vector<double>& v);
double sup_diff(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace bih

#endif

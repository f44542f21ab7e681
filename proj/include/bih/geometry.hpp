#ifndef BIH_GEOMETRY_HPP
#define BIH_GEOMETRY_HPP

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "bih/grid.hpp"

namespace bih {

/// Prescribed vortex/string locations with multiplicities. Coincident points
/// are merged on construction. N is the total multiplicity.
struct VortexConfiguration {
  std::vector<std::array<double, 2>> points;
  std::vector<int> multiplicities;
  double newton_g = 0.0;             // G_N; 0 for pure vortex runs
  std::optional<double> c;           // nullopt = "auto" (search)

  int total_multiplicity() const;
  double max_point_radius() const;
  bool at_origin_only() const;

  /// Merges coincident points and validates N >= 1, multiplicities > 0.
  static VortexConfiguration make(std::vector<std::array<double, 2>> pts,
                                  std::vector<int> mults, double newton_g = 0.0,
                                  std::optional<double> c = std::nullopt);
};

/// u_{0,delta}(x) = sum_s m_s ln((delta + |x-p_s|^2)/(1 + |x-p_s|^2)).
/// delta = 0 gives the singular background ( -inf at vortex nodes ).
Field background_u0(std::shared_ptr<const Grid> grid, const VortexConfiguration& conf,
                    double delta);

/// g(x) = sum_s m_s * 4/(1 + |x-p_s|^2)^2; each summand integrates to 4*pi.
Field background_g(std::shared_ptr<const Grid> grid, const VortexConfiguration& conf);

enum class QuadratureRule { trapezoid, simpson };

/// Trapezoid (default) or Simpson quadrature; radial weights include 2*pi*r.
/// Simpson requires a uniform grid. Throws NonFinite on NaN/Inf values.
double integrate(const Field& f, QuadratureRule rule = QuadratureRule::trapezoid);

/// Quadrature weight of node i under the trapezoid rule.
double quad_weight(const Grid& grid, std::size_t i);

/// Discrete Laplacian with Dirichlet-zero outer boundary. Radial grids use
/// the conservative form of u'' + u'/r with the axis regularity condition;
/// cartesian grids use the 5-point stencil.
class LinearOperator {
 public:
  explicit LinearOperator(std::shared_ptr<const Grid> grid) : grid_(std::move(grid)) {}

  /// y = (Lap u); boundary rows are set to 0.
  void apply(std::span<const double> u, std::span<double> out) const;
  Field apply(const Field& u) const;

  /// Solves (Lap - diag) u = rhs with u = 0 on the outer boundary.
  /// diag must be >= 0. Radial: direct tridiagonal solve. Cartesian:
  /// Jacobi-preconditioned CG on (-Lap + diag), relative tolerance cg_tol.
  std::vector<double> solve_shifted(std::span<const double> diag,
                                    std::span<const double> rhs,
                                    double cg_tol = 1e-10) const;

  const Grid& grid() const { return *grid_; }
  std::shared_ptr<const Grid> grid_ptr() const { return grid_; }

 private:
  std::shared_ptr<const Grid> grid_;
};

inline LinearOperator laplacian(std::shared_ptr<const Grid> grid) {
  return LinearOperator(std::move(grid));
}

/// Nodewise gradient magnitude squared |grad f|^2 by central differences
/// (3-point one-sided at the axis/boundary). Radial fields are treated as
/// functions of r only.
Field gradient_squared(const Field& f);

/// d/dr by 3-point nonuniform differences (radial grids only).
std::vector<double> radial_derivative(const Field& f);

}  // namespace bih

#endif

#include "bih/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bih/errors.hpp"
#include "bih/parallel.hpp"

namespace bih {

int VortexConfiguration::total_multiplicity() const {
  int n = 0;
  for (int m : multiplicities) n += m;
  return n;
}

double VortexConfiguration::max_point_radius() const {
  double m = 0.0;
  for (const auto& p : points) m = std::max(m, std::hypot(p[0], p[1]));
  return m;
}

bool VortexConfiguration::at_origin_only() const {
  return points.size() == 1 && points[0][0] == 0.0 && points[0][1] == 0.0;
}

VortexConfiguration VortexConfiguration::make(std::vector<std::array<double, 2>> pts,
                                              std::vector<int> mults, double newton_g,
                                              std::optional<double> c) {
  if (pts.size() != mults.size())
    throw std::invalid_argument("points and multiplicities differ in length");
  if (newton_g < 0.0) throw std::invalid_argument("newton_g must be >= 0");
  VortexConfiguration conf;
  conf.newton_g = newton_g;
  conf.c = c;
  const double eps2 = 1e-24;
  for (std::size_t s = 0; s < pts.size(); ++s) {
    if (mults[s] <= 0) throw std::invalid_argument("multiplicities must be positive");
    bool merged = false;
    for (std::size_t t = 0; t < conf.points.size(); ++t) {
      double dx = conf.points[t][0] - pts[s][0];
      double dy = conf.points[t][1] - pts[s][1];
      if (dx * dx + dy * dy < eps2) {
        conf.multiplicities[t] += mults[s];
        merged = true;
        break;
      }
    }
    if (!merged) {
      conf.points.push_back(pts[s]);
      conf.multiplicities.push_back(mults[s]);
    }
  }
  if (conf.total_multiplicity() < 1) throw std::invalid_argument("need at least one vortex");
  return conf;
}

Field background_u0(std::shared_ptr<const Grid> grid, const VortexConfiguration& conf,
                    double delta) {
  if (delta < 0.0 || delta >= 1.0) throw std::invalid_argument("delta must be in [0, 1)");
  Field f = make_field(grid, delta == 0.0 ? "u0" : "u0_delta");
  const Grid& g = *grid;
  parallel_for(g.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      auto xy = g.node_xy(i);
      double acc = 0.0;
      for (std::size_t s = 0; s < conf.points.size(); ++s) {
        double dx = xy[0] - conf.points[s][0], dy = xy[1] - conf.points[s][1];
        double d2 = dx * dx + dy * dy;
        acc += conf.multiplicities[s] * (std::log(delta + d2) - std::log1p(d2));
      }
      f.values[i] = acc;  // -inf at vortex nodes when delta == 0
    }
  });
  return f;
}

Field background_g(std::shared_ptr<const Grid> grid, const VortexConfiguration& conf) {
  Field f = make_field(grid, "g_bg");
  const Grid& g = *grid;
  parallel_for(g.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      auto xy = g.node_xy(i);
      double acc = 0.0;
      for (std::size_t s = 0; s < conf.points.size(); ++s) {
        double dx = xy[0] - conf.points[s][0], dy = xy[1] - conf.points[s][1];
        double q = 1.0 + dx * dx + dy * dy;
        acc += conf.multiplicities[s] * 4.0 / (q * q);
      }
      f.values[i] = acc;
    }
  });
  return f;
}

double quad_weight(const Grid& g, std::size_t i) {
  if (g.kind == GridKind::radial) {
    const auto& r = g.r;
    double w;
    if (i == 0)
      w = 0.5 * (r[1] - r[0]);
    else if (i + 1 == r.size())
      w = 0.5 * (r[i] - r[i - 1]);
    else
      w = 0.5 * (r[i + 1] - r[i - 1]);
    return 2.0 * M_PI * r[i] * w;
  }
  std::size_t n = g.n_side;
  std::size_t ix = i / n, iy = i % n;
  double wx = (ix == 0 || ix + 1 == n) ? 0.5 : 1.0;
  double wy = (iy == 0 || iy + 1 == n) ? 0.5 : 1.0;
  return wx * wy * g.h * g.h;
}

namespace {

double integrate_simpson(const Field& f) {
  const Grid& g = *f.grid;
  if (g.kind == GridKind::radial) {
    if (g.stretch != 0.0)
      throw std::invalid_argument("simpson quadrature needs a uniform radial grid");
    std::size_t n = g.r.size();
    double h = g.r[1] - g.r[0];
    double s = 0.0;
    std::size_t m = (n - 1) / 2 * 2;  // even number of panels
    for (std::size_t i = 0; i + 2 <= m; i += 2) {
      auto term = [&](std::size_t j) { return 2.0 * M_PI * g.r[j] * f.values[j]; };
      s += h / 3.0 * (term(i) + 4.0 * term(i + 1) + term(i + 2));
    }
    for (std::size_t i = m; i + 1 < n; ++i)  // trapezoid remainder
      s += 0.5 * (g.r[i + 1] - g.r[i]) *
           (2.0 * M_PI * g.r[i] * f.values[i] + 2.0 * M_PI * g.r[i + 1] * f.values[i + 1]);
    return s;
  }
  throw std::invalid_argument("simpson quadrature is implemented for radial grids");
}

}  // namespace

double integrate(const Field& f, QuadratureRule rule) {
  require_finite(f);
  if (rule == QuadratureRule::simpson) return integrate_simpson(f);
  const Grid& g = *f.grid;
  return parallel_sum(g.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += quad_weight(g, i) * f.values[i];
    return s;
  });
}

void LinearOperator::apply(std::span<const double> u, std::span<double> out) const {
  const Grid& g = *grid_;
  if (g.kind == GridKind::radial) {
    std::size_t n = g.r.size();
    out[0] = g.face[0] * (u[1] - u[0]) / g.volume[0];
    for (std::size_t i = 1; i + 1 < n; ++i)
      out[i] = (g.face[i] * (u[i + 1] - u[i]) - g.face[i - 1] * (u[i] - u[i - 1])) / g.volume[i];
    out[n - 1] = 0.0;
    return;
  }
  std::size_t n = g.n_side;
  double inv_h2 = 1.0 / (g.h * g.h);
  parallel_for(n, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t ix = lo; ix < hi; ++ix) {
      std::size_t row = ix * n;
      if (ix == 0 || ix + 1 == n) {
        for (std::size_t iy = 0; iy < n; ++iy) out[row + iy] = 0.0;
        continue;
      }
      out[row] = 0.0;
      out[row + n - 1] = 0.0;
      for (std::size_t iy = 1; iy + 1 < n; ++iy) {
        std::size_t i = row + iy;
        out[i] = (u[i - n] + u[i + n] + u[i - 1] + u[i + 1] - 4.0 * u[i]) * inv_h2;
      }
    }
  });
}

Field LinearOperator::apply(const Field& u) const {
  Field out = make_field(grid_, "lap_" + u.name);
  apply(u.values, out.values);
  return out;
}

namespace {

// Thomas solve of the radial (Lap - diag) system with the last node pinned.
std::vector<double> radial_shifted_solve(const Grid& g, std::span<const double> diag,
                                         std::span<const double> rhs) {
  std::size_t n = g.r.size();
  std::vector<double> c(n, 0.0), d(n, 0.0), x(n, 0.0);
  // row 0 (axis): b0 u0 + c0 u1 = rhs0
  double b0 = -g.face[0] / g.volume[0] - diag[0];
  double c0 = g.face[0] / g.volume[0];
  c[0] = c0 / b0;
  d[0] = rhs[0] / b0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double ai = g.face[i - 1] / g.volume[i];
    double bi = -(g.face[i - 1] + g.face[i]) / g.volume[i] - diag[i];
    double ci = g.face[i] / g.volume[i];
    double denom = bi - ai * c[i - 1];
    c[i] = ci / denom;
    d[i] = (rhs[i] - ai * d[i - 1]) / denom;
  }
  x[n - 1] = 0.0;  // Dirichlet
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

// Jacobi-preconditioned CG on (-Lap + diag) u = -rhs over interior nodes.
std::vector<double> cartesian_shifted_solve(const LinearOperator& op, const Grid& g,
                                            std::span<const double> diag,
                                            std::span<const double> rhs, double tol) {
  std::size_t ntot = g.size();
  std::vector<double> x(ntot, 0.0), r(ntot, 0.0), z(ntot, 0.0), p(ntot, 0.0), q(ntot, 0.0);
  double inv_h2 = 1.0 / (g.h * g.h);

  auto matvec = [&](const std::vector<double>& in, std::vector<double>& out) {
    op.apply(in, out);
    parallel_for(ntot, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) out[i] = -out[i] + diag[i] * in[i];
    });
    // boundary rows stay zero
    std::size_t n = g.n_side;
    for (std::size_t iy = 0; iy < n; ++iy) {
      out[iy] = 0.0;
      out[(n - 1) * n + iy] = 0.0;
    }
    for (std::size_t ix = 0; ix < n; ++ix) {
      out[ix * n] = 0.0;
      out[ix * n + n - 1] = 0.0;
    }
  };
  auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
    return parallel_sum(ntot, [&](std::size_t lo, std::size_t hi) {
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
      return s;
    });
  };

  parallel_for(ntot, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) r[i] = g.is_boundary(i) ? 0.0 : -rhs[i];
  });
  double rhs_norm = std::sqrt(dot(r, r));
  if (rhs_norm == 0.0) return x;

  parallel_for(ntot, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) z[i] = r[i] / (4.0 * inv_h2 + diag[i]);
  });
  p = z;
  double rz = dot(r, z);
  std::size_t max_iter = 40 * g.n_side + 200;
  for (std::size_t k = 0; k < max_iter; ++k) {
    matvec(p, q);
    double alpha = rz / dot(p, q);
    parallel_for(ntot, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * q[i];
      }
    });
    if (std::sqrt(dot(r, r)) < tol * rhs_norm) break;
    parallel_for(ntot, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) z[i] = r[i] / (4.0 * inv_h2 + diag[i]);
    });
    double rz_new = dot(r, z);
    double beta = rz_new / rz;
    rz = rz_new;
    parallel_for(ntot, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) p[i] = z[i] + beta * p[i];
    });
  }
  return x;
}

}  // namespace

std::vector<double> LinearOperator::solve_shifted(std::span<const double> diag,
                                                  std::span<const double> rhs,
                                                  double cg_tol) const {
  const Grid& g = *grid_;
  if (g.kind == GridKind::radial) return radial_shifted_solve(g, diag, rhs);
  return cartesian_shifted_solve(*this, g, diag, rhs, cg_tol);
}

std::vector<double> radial_derivative(const Field& f) {
  const Grid& g = *f.grid;
  if (g.kind != GridKind::radial) throw std::invalid_argument("radial_derivative needs a radial grid");
  const auto& r = g.r;
  std::size_t n = r.size();
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      // 3-point one-sided, exact for quadratics
      double h1 = r[1] - r[0], h2 = r[2] - r[0];
      d[0] = (f.values[1] * h2 * h2 - f.values[2] * h1 * h1 -
              f.values[0] * (h2 * h2 - h1 * h1)) /
             (h1 * h2 * (h2 - h1));
    } else if (i + 1 == n) {
      double h1 = r[n - 1] - r[n - 2], h2 = r[n - 1] - r[n - 3];
      d[i] = (f.values[n - 2] * h2 * h2 - f.values[n - 3] * h1 * h1 -
              f.values[n - 1] * (h2 * h2 - h1 * h1)) /
             (h1 * h2 * (h1 - h2));
    } else {
      double hl = r[i] - r[i - 1], hr = r[i + 1] - r[i];
      d[i] = (f.values[i + 1] * hl * hl - f.values[i - 1] * hr * hr +
              f.values[i] * (hr * hr - hl * hl)) /
             (hl * hr * (hl + hr));
    }
  }
  return d;
}

Field gradient_squared(const Field& f) {
  const Grid& g = *f.grid;
  Field out = make_field(f.grid, "grad_sq_" + f.name);
  if (g.kind == GridKind::radial) {
    auto d = radial_derivative(f);
    for (std::size_t i = 0; i < d.size(); ++i) out.values[i] = d[i] * d[i];
    return out;
  }
  std::size_t n = g.n_side;
  double inv_2h = 0.5 / g.h;
  parallel_for(n, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t ix = lo; ix < hi; ++ix)
      for (std::size_t iy = 0; iy < n; ++iy) {
        std::size_t i = ix * n + iy;
        double fx, fy;
        if (ix == 0)
          fx = (f.values[i + n] - f.values[i]) * 2.0 * inv_2h;
        else if (ix + 1 == n)
          fx = (f.values[i] - f.values[i - n]) * 2.0 * inv_2h;
        else
          fx = (f.values[i + n] - f.values[i - n]) * inv_2h;
        if (iy == 0)
          fy = (f.values[i + 1] - f.values[i]) * 2.0 * inv_2h;
        else if (iy + 1 == n)
          fy = (f.values[i] - f.values[i - 1]) * 2.0 * inv_2h;
        else
          fy = (f.values[i + 1] - f.values[i - 1]) * inv_2h;
        out.values[i] = fx * fx + fy * fy;
      }
  });
  return out;
}

}  // namespace bih

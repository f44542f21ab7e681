#include "bih/vortex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bih/errors.hpp"
#include "bih/parallel.hpp"

namespace bih {

namespace {

void validate_geometry(const Grid& g, const VortexConfiguration& conf) {
  if (!(g.extent() > 4.0 * conf.max_point_radius()))
    throw std::invalid_argument("grid extent must exceed 4x the largest vortex radius");
  if (g.is_radial() && !conf.at_origin_only())
    throw std::invalid_argument("radial grids require all vortices coincident at the origin");
}

}  // namespace

VortexSolution solve_vortex(std::shared_ptr<const ModelSpec> model,
                            std::shared_ptr<const Grid> grid,
                            const VortexConfiguration& conf, const SolverOptions& opts) {
  if (conf.newton_g != 0.0)
    throw std::invalid_argument("solve_vortex requires newton_g = 0; use solve_string");
  validate_geometry(*grid, conf);
  const ModelSpec& m = *model;
  const Grid& g = *grid;
  std::size_t n = g.size();
  double tol = opts.resolved_tol(g);

  Field u0 = background_u0(grid, conf, 0.0);
  Field gb = background_g(grid, conf);

  NodewiseFn f = [&](const std::vector<double>& u, std::vector<double>& out) {
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        double t = std::exp(u[i] + u0.values[i]);
        if (t > 1.0) t = 1.0;  // bracket guarantees v <= 0; clip roundoff
        out[i] = m.rhs_vortex(t) + gb.values[i];
      }
    });
  };

  VortexSolution sol;
  sol.model = model;
  sol.grid = grid;
  sol.conf = conf;

  const ModelBounds& bd = m.bounds();
  AbelianHiggsResult ah1, ah2;
  try {
    ah1 = solve_abelian_higgs(grid, conf, bd.lambda1, tol, opts.cg_tol);
    ah2 = solve_abelian_higgs(grid, conf, bd.lambda2, tol, opts.cg_tol);
  } catch (const std::exception& e) {
    throw BracketAssemblyFailure(std::string("lambda-model bracket solve failed: ") + e.what());
  }
  sol.u_lambda1 = ah1.report.solution;
  sol.u_lambda1.name = "u_lambda1";
  sol.u_lambda2 = ah2.report.solution;
  sol.u_lambda2.name = "u_lambda2";
  sol.report_lambda1 = std::move(ah1.report);
  sol.report_lambda2 = std::move(ah2.report);

  // one-sided admissibility for the generalized equation
  sol.sub_admissibility = bracket_violation(grid, f, sol.u_lambda1.values, +1);
  sol.super_admissibility = bracket_violation(grid, f, sol.u_lambda2.values, -1);
  if (sol.sub_admissibility > 0.0 || sol.super_admissibility > 0.0)
    throw BracketAssemblyFailure("lambda brackets fail the one-sided inequalities: sub " +
                                 std::to_string(sol.sub_admissibility) + ", super " +
                                 std::to_string(sol.super_admissibility));

  MonotoneProblem prob;
  prob.grid = grid;
  prob.f = f;
  prob.u_sub = sol.u_lambda1.values;
  prob.u_super = sol.u_lambda2.values;
  prob.start = sol.u_lambda2.values;
  prob.tol = tol;
  prob.cg_tol = opts.cg_tol;
  prob.max_iterations = opts.max_iterations;
  prob.K = monotonicity_bound(g, f, prob.u_sub, prob.u_super, prob.u_super);

  sol.report = monotone_solve(prob);
  sol.u = sol.report.solution;
  sol.u.name = "u";
  require_finite(sol.u);

  sol.v = make_field(grid, "v");
  for (std::size_t i = 0; i < n; ++i) sol.v.values[i] = sol.u.values[i] + u0.values[i];

  if (opts.tail_refine && g.is_radial())
    sol.tail_start_radius = refine_exponential_tail(m, sol.v, nullptr);
  return sol;
}

double refine_exponential_tail(const ModelSpec& model, Field& v,
                               const std::function<double(std::size_t)>& envelope) {
  const Grid& g = *v.grid;
  if (!g.is_radial()) return 0.0;
  std::size_t n = g.r.size();
  auto env = [&](std::size_t i) { return envelope ? envelope(i) : 1.0; };

  const double switch_mag = 1e-6;
  std::size_t i0 = n;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (g.r[i] >= 5.0 && std::abs(v.values[i]) < switch_mag && v.values[i] != 0.0) {
      i0 = i;
      break;
    }
  }
  if (i0 + 8 >= n) return 0.0;

  // two passes: rate from the analytic limit, then from the current tail
  std::vector<double> tail(v.values.begin() + i0, v.values.end());
  std::size_t m = tail.size();
  std::vector<double> lower(m), diag(m), upper(m), rhs(m);
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t i = i0 + k;
      if (k == 0 || k + 1 == m) continue;
      double meff;
      if (std::abs(tail[k]) > 1e-8)
        meff = model.rhs_vortex(std::min(std::exp(tail[k]), 1.0)) / tail[k];
      else
        meff = model.rhs_linearized_rate();
      diag[k] = -(g.face[i - 1] + g.face[i]) / g.volume[i] - std::max(meff, 0.0) * env(i);
      lower[k] = g.face[i - 1] / g.volume[i];
      upper[k] = g.face[i] / g.volume[i];
      rhs[k] = 0.0;
    }
    diag[0] = 1.0; upper[0] = 0.0; rhs[0] = v.values[i0];
    diag[m - 1] = 1.0; lower[m - 1] = 0.0; rhs[m - 1] = 0.0;
    // Thomas
    std::vector<double> c(m), d(m);
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for (std::size_t k = 1; k < m; ++k) {
      double den = diag[k] - lower[k] * c[k - 1];
      c[k] = (k + 1 < m ? upper[k] : 0.0) / den;
      d[k] = (rhs[k] - lower[k] * d[k - 1]) / den;
    }
    tail[m - 1] = d[m - 1];
    for (std::size_t k = m - 1; k-- > 0;) tail[k] = d[k] - c[k] * tail[k + 1];
  }
  for (std::size_t k = 1; k < m; ++k) v.values[i0 + k] = tail[k];
  return g.r[i0];
}

}  // namespace bih

#include "bih/iterate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bih/errors.hpp"
#include "bih/parallel.hpp"

namespace bih {

namespace {

double node_slack(const Grid& g, double slack_factor, double scale, std::size_t i) {
  double h = g.local_h(i);
  return slack_factor * h * h * std::max(1.0, scale);
}

}  // namespace

std::vector<double> monotonicity_bound(const Grid& grid, const NodewiseFn& f,
                                       const std::vector<double>& lo,
                                       const std::vector<double>& hi,
                                       const std::vector<double>& cap,
                                       int samples, double fd_step, double margin) {
  std::size_t n = grid.size();
  std::vector<double> K(n, 0.0), us(n), f0(n), f1(n), top(n);
  for (std::size_t i = 0; i < n; ++i)
    top[i] = std::isfinite(hi[i]) ? hi[i] : cap[i];
  for (int s = 0; s < samples; ++s) {
    double w = samples == 1 ? 0.0 : static_cast<double>(s) / (samples - 1);
    for (std::size_t i = 0; i < n; ++i) us[i] = lo[i] + w * (top[i] - lo[i]);
    f(us, f0);
    for (std::size_t i = 0; i < n; ++i) us[i] += fd_step;
    f(us, f1);
    for (std::size_t i = 0; i < n; ++i)
      K[i] = std::max(K[i], (f1[i] - f0[i]) / fd_step);
  }
  for (std::size_t i = 0; i < n; ++i) K[i] = margin * std::max(K[i], 1e-12);
  return K;
}

double bracket_violation(std::shared_ptr<const Grid> grid_ptr, const NodewiseFn& f,
                         const std::vector<double>& u, int side, double slack_factor) {
  const Grid& grid = *grid_ptr;
  LinearOperator lap(grid_ptr);
  std::size_t n = grid.size();
  std::vector<double> lu(n), fu(n);
  lap.apply(u, lu);
  f(u, fu);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (grid.is_boundary(i)) continue;
    double res = lu[i] - fu[i];
    double slack = node_slack(grid, slack_factor, std::abs(fu[i]), i);
    double viol = side > 0 ? (-res - slack) : (res - slack);
    worst = std::max(worst, viol);
  }
  return worst;
}

SolveReport monotone_solve(MonotoneProblem& p) {
  const Grid& g = *p.grid;
  std::size_t n = g.size();
  LinearOperator lap(p.grid);

  if (p.check_admissibility) {
    double vs = bracket_violation(p.grid, p.f, p.u_sub, +1, p.slack_factor);
    if (vs > 0.0)
      throw BracketAssemblyFailure("subsolution inadmissible by " + std::to_string(vs));
    double vS = bracket_violation(p.grid, p.f, p.u_super, -1, p.slack_factor);
    if (vS > 0.0)
      throw BracketAssemblyFailure("supersolution inadmissible by " + std::to_string(vS));
    for (std::size_t i = 0; i < n; ++i)
      if (!(p.u_sub[i] <= p.u_super[i] + node_slack(g, p.slack_factor, 1.0, i)))
        throw BracketAssemblyFailure("bracket not ordered at node " + std::to_string(i));
  }

  SolveReport rep;
  rep.ascending = p.ascending;
  std::vector<double> u = p.start, fu(n), rhs(n), lu(n);
  std::vector<double> un;
  double scale = 1.0;
  for (double x : u) if (std::isfinite(x)) scale = std::max(scale, std::abs(x));

  int it = 0;
  for (; it < p.max_iterations; ++it) {
    p.f(u, fu);
    for (std::size_t i = 0; i < n; ++i)
      rhs[i] = g.is_boundary(i) ? 0.0 : fu[i] - p.K[i] * u[i];
    un = lap.solve_shifted(p.K, rhs, p.cg_tol);

    double upd = 0.0;
    int dir_viol = 0, br_viol = 0;
    double mono_slack = 1e-12 * scale;
    for (std::size_t i = 0; i < n; ++i) {
      double d = un[i] - u[i];
      upd = std::max(upd, std::abs(d));
      if (p.ascending ? (d < -mono_slack) : (d > mono_slack)) ++dir_viol;
      double bslack = node_slack(g, p.slack_factor, std::abs(fu[i]), i);
      if (un[i] < p.u_sub[i] - bslack || un[i] > p.u_super[i] + bslack) ++br_viol;
    }
    if (dir_viol > 0) ++rep.monotone_violations;
    if (br_viol > 0) {
      ++rep.bracket_violations;
      throw BracketViolation("iterate " + std::to_string(it + 1) + " left the bracket at " +
                             std::to_string(br_viol) + " node(s)");
    }
    u.swap(un);
    rep.update_history.push_back(upd);

    if (upd < p.tol) {
      // the update tolerance is necessary but not sufficient: confirm the
      // nonlinear residual, which the shift K amplifies
      p.f(u, fu);
      lap.apply(u, lu);
      double res = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (!g.is_boundary(i)) res = std::max(res, std::abs(lu[i] - fu[i]));
      rep.residual_history.push_back(res);
      rep.final_update = upd;
      if (res < p.residual_factor * p.tol) {
        rep.final_residual = res;
        rep.converged = true;
        ++it;
        break;
      }
    }
  }
  if (!rep.converged) {
    if (it >= p.max_iterations)
      throw MaxIterations("monotone iteration did not converge in " +
                          std::to_string(p.max_iterations) + " iterations");
  }
  rep.iterations = it;
  rep.solution = make_field(p.grid, "u");
  rep.solution.values = std::move(u);
  return rep;
}

Field newton_solve(std::shared_ptr<const Grid> grid, const NodewiseFn& f,
                   const NodewiseFn& f_prime, Field start, const NewtonOptions& opts) {
  const Grid& g = *grid;
  std::size_t n = g.size();
  LinearOperator lap(grid);
  std::vector<double>& u = start.values;
  std::vector<double> fu(n), lu(n), res(n), diag(n), du;

  auto residual = [&](const std::vector<double>& v, std::vector<double>& out) {
    f(v, fu);
    lap.apply(v, lu);
    double sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = g.is_boundary(i) ? 0.0 : lu[i] - fu[i];
      sup = std::max(sup, std::abs(out[i]));
    }
    return sup;
  };

  double rn = residual(u, res);
  for (int it = 0; it < opts.max_iterations && rn >= opts.tol; ++it) {
    f_prime(u, diag);
    for (std::size_t i = 0; i < n; ++i) diag[i] = std::max(diag[i], 0.0);
    // (Lap - f'(u)) du = -res
    for (std::size_t i = 0; i < n; ++i) res[i] = -res[i];
    du = lap.solve_shifted(diag, res, opts.cg_tol);
    double alpha = 1.0;
    std::vector<double> trial(n), tres(n);
    for (int back = 0; back < 40; ++back) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + alpha * du[i];
      double tn = residual(trial, tres);
      if (tn < rn || tn < opts.tol) {
        u.swap(trial);
        rn = tn;
        break;
      }
      alpha *= 0.5;
      if (back == 39)
        throw MaxIterations("newton presolve: line search failed at residual " + std::to_string(rn));
    }
  }
  if (rn >= opts.tol)
    throw MaxIterations("newton presolve did not reach tolerance; residual " + std::to_string(rn));
  return start;
}

AbelianHiggsResult solve_abelian_higgs(std::shared_ptr<const Grid> grid,
                                       const VortexConfiguration& conf, double lambda,
                                       double tol, double cg_tol) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  const Grid& g = *grid;
  std::size_t n = g.size();
  Field u0 = background_u0(grid, conf, 0.0);
  Field gb = background_g(grid, conf);

  NodewiseFn f = [&, lambda](const std::vector<double>& u, std::vector<double>& out) {
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i)
        out[i] = lambda * (std::exp(u[i] + u0.values[i]) - 1.0) + gb.values[i];
    });
  };
  NodewiseFn fp = [&, lambda](const std::vector<double>& u, std::vector<double>& out) {
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i)
        out[i] = lambda * std::exp(u[i] + u0.values[i]);
    });
  };

  NewtonOptions nopts;
  nopts.tol = std::min(1e-11, tol);
  nopts.cg_tol = cg_tol;
  Field presolve = newton_solve(grid, f, fp, make_field(grid, "u", 0.0), nopts);

  // lower bracket: the presolve shifted down is a discrete subsolution up to
  // the presolve residual, absorbed by the admissibility slack
  double eps = std::max(1e-6, 1e3 * nopts.tol);
  Field u_sub = presolve;
  for (auto& x : u_sub.values) x -= eps;

  // capped supersolution min(-u0, C); enlarge C until discretely admissible
  double cap = 0.0;
  for (double x : presolve.values) cap = std::max(cap, x);
  cap += 1.0;
  Field u_super = make_field(grid, "u_super");
  for (int attempt = 0;; ++attempt) {
    for (std::size_t i = 0; i < n; ++i)
      u_super.values[i] = std::min(-u0.values[i], cap);
    if (bracket_violation(grid, f, u_super.values, -1) <= 0.0) break;
    cap *= 2.0;
    if (attempt >= 6)
      throw BracketAssemblyFailure("no admissible capped supersolution for the lambda-model");
  }

  MonotoneProblem prob;
  prob.grid = grid;
  prob.f = f;
  prob.u_sub = u_sub.values;
  prob.u_super = u_super.values;
  prob.start = u_super.values;
  prob.tol = tol;
  prob.cg_tol = cg_tol;
  // df/du = lambda e^{u+u0} <= lambda on the bracket (v <= 0)
  prob.K.assign(n, 1.25 * lambda);

  AbelianHiggsResult out;
  out.report = monotone_solve(prob);
  out.report.solution.name = "u_lambda";
  out.u_sub = std::move(u_sub);
  out.u_super = std::move(u_super);
  out.lambda = lambda;
  return out;
}

}  // namespace bih

#include "bih/strings.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bih/errors.hpp"
#include "bih/parallel.hpp"

namespace bih {

namespace {

// log of prod_s (1+|x-p_s|^2)^{-8 pi G m_s}
std::vector<double> log_prefactor(const Grid& g, const VortexConfiguration& conf) {
  double epg = 8.0 * M_PI * conf.newton_g;
  std::vector<double> lp(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto xy = g.node_xy(i);
    double acc = 0.0;
    for (std::size_t s = 0; s < conf.points.size(); ++s) {
      double dx = xy[0] - conf.points[s][0], dy = xy[1] - conf.points[s][1];
      acc -= conf.multiplicities[s] * std::log1p(dx * dx + dy * dy);
    }
    lp[i] = epg * acc;
  }
  return lp;
}

void check_hypothesis(const VortexConfiguration& conf) {
  double q = 8.0 * M_PI * conf.newton_g * conf.total_multiplicity();
  if (q >= 1.0)
    throw HypothesisViolation("8 pi G_N N = " + std::to_string(q) + " >= 1");
}

struct StringRhs {
  const ModelSpec* model;
  double epg, c;
  const std::vector<double>* u0d;
  const std::vector<double>* log_pref;
  const std::vector<double>* gb;

  void operator()(const std::vector<double>& u, std::vector<double>& out) const {
    const ModelSpec& m = *model;
    std::size_t n = u.size();
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        double t = std::exp(u[i] + (*u0d)[i]);
        if (t > 1.0) t = 1.0;
        double expo = epg * (2.0 * c - m.F_anti(t) + u[i]) + (*log_pref)[i];
        out[i] = 2.0 * std::exp(expo) * m.U(t) / (std::sqrt(m.G(t)) * m.dilation(t)) +
                 (*gb)[i];
      }
    });
  }
};

}  // namespace

Field rhs_string(const ModelSpec& model, std::shared_ptr<const Grid> grid,
                 const VortexConfiguration& conf, double c, double delta, const Field& u) {
  const Grid& g = *grid;
  Field u0d = background_u0(grid, conf, delta);
  Field gb = background_g(grid, conf);
  auto lp = log_prefactor(g, conf);
  StringRhs f{&model, 8.0 * M_PI * conf.newton_g, c, &u0d.values, &lp, &gb.values};
  Field out = make_field(grid, "rhs_string");
  f(u.values, out.values);
  return out;
}

double find_c(const ModelSpec& model, std::shared_ptr<const Grid> grid,
              const VortexConfiguration& conf, double delta) {
  check_hypothesis(conf);
  if (!(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument("find_c requires 0 < delta < 1/2");
  const Grid& g = *grid;
  Field zero = make_field(grid, "zero");
  for (double c : {0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
    Field f0 = rhs_string(model, grid, conf, c, delta, zero);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!g.is_boundary(i)) worst = std::max(worst, f0.values[i]);
    if (worst < 0.0) return c;
  }
  throw SearchExhausted(
      "no c <= 64 makes u = 0 a subsolution; grid too coarse or hypothesis marginal");
}

Field conformal_exponent(const ModelSpec& model, std::shared_ptr<const Grid> grid,
                         const VortexConfiguration& conf, double c, const Field& u) {
  const Grid& g = *grid;
  double epg = 8.0 * M_PI * conf.newton_g;
  Field u0 = background_u0(grid, conf, 0.0);
  auto lp = log_prefactor(g, conf);
  Field eta = make_field(grid, "eta");
  parallel_for(g.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double t = std::exp(u.values[i] + u0.values[i]);
      if (t > 1.0) t = 1.0;
      eta.values[i] = 2.0 * epg * c - epg * model.F_anti(t) + epg * u.values[i] + lp[i];
    }
  });
  return eta;
}

Field conformal_factor(const ModelSpec& model, std::shared_ptr<const Grid> grid,
                       const VortexConfiguration& conf, double c, const Field& u) {
  Field eta = conformal_exponent(model, grid, conf, c, u);
  Field out = make_field(grid, "e_eta");
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = std::exp(eta.values[i]);
  out.name = "e_eta";
  return out;
}

StringSolution solve_string(std::shared_ptr<const ModelSpec> model,
                            std::shared_ptr<const Grid> grid,
                            const VortexConfiguration& conf, const StringOptions& opts) {
  check_hypothesis(conf);
  const Grid& g = *grid;
  std::size_t n = g.size();
  double tol = opts.resolved_tol(g);

  StringSolution sol;
  sol.model = model;
  sol.grid = grid;
  sol.conf = conf;

  if (conf.newton_g == 0.0) {
    // the coupled equation coincides with the flat vortex equation; c only
    // enters through a factor e^{16 pi G c} = 1
    VortexSolution vs = solve_vortex(model, grid, conf, opts);
    sol.u = std::move(vs.u);
    sol.v = std::move(vs.v);
    sol.c_used = conf.c.value_or(0.0);
    sol.eta = conformal_exponent(*model, grid, conf, sol.c_used, sol.u);
    LadderRung rung;
    rung.delta = 0.0;
    rung.report = std::move(vs.report);
    sol.ladder.push_back(std::move(rung));
    sol.tail_start_radius = vs.tail_start_radius;
    return sol;
  }

  if (!(g.extent() > 4.0 * conf.max_point_radius()))
    throw std::invalid_argument("grid extent must exceed 4x the largest vortex radius");
  if (g.is_radial() && !conf.at_origin_only())
    throw std::invalid_argument("radial grids require all vortices coincident at the origin");

  std::vector<double> ladder = opts.ladder;
  if (ladder.empty()) ladder = kDefaultLadder;
  if (!(ladder.front() > 0.0 && ladder.front() < 0.5))
    throw std::invalid_argument("the coarsest rung must satisfy 0 < delta < 1/2");

  if (conf.c.has_value()) {
    sol.c_used = *conf.c;
    Field f0 = rhs_string(*model, grid, conf, sol.c_used, ladder.front(),
                          make_field(grid, "zero"));
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
      if (!g.is_boundary(i)) worst = std::max(worst, f0.values[i]);
    if (worst >= 0.0)
      sol.warnings.push_back("fixed c = " + std::to_string(sol.c_used) +
                             " does not make u = 0 a subsolution (worst " +
                             std::to_string(worst) + ")");
  } else {
    sol.c_used = find_c(*model, grid, conf, ladder.front());
  }

  Field gb = background_g(grid, conf);
  auto lp = log_prefactor(g, conf);
  double epg = 8.0 * M_PI * conf.newton_g;

  std::vector<double> prev;  // previous rung solution
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    double delta = ladder[k];
    Field u0d = background_u0(grid, conf, delta);
    StringRhs fr{model.get(), epg, sol.c_used, &u0d.values, &lp, &gb.values};
    NodewiseFn f = [fr](const std::vector<double>& u, std::vector<double>& out) { fr(u, out); };

    MonotoneProblem prob;
    prob.grid = grid;
    prob.f = f;
    prob.tol = tol;
    prob.cg_tol = opts.cg_tol;
    prob.max_iterations = opts.max_iterations;

    LadderRung rung;
    rung.delta = delta;
    if (delta > 0.0) {
      prob.u_super = u0d.values;
      for (auto& x : prob.u_super) x = -x;
      prob.u_sub.assign(n, 0.0);
      if (!prev.empty()) {
        // the previous rung is a subsolution of this one; use it to tighten
        for (std::size_t i = 0; i < n; ++i)
          prob.u_sub[i] = std::min(std::max(prob.u_sub[i], prev[i]), prob.u_super[i]);
      }
      prob.start = prob.u_super;
      prob.K = monotonicity_bound(g, f, prob.u_sub, prob.u_super, prob.u_super);
      rung.report = monotone_solve(prob);
    } else {
      // -u0 is infinite at the vortex nodes: ascend from the warm start,
      // enlarging the K sampling cap if monotonicity is ever violated
      if (prev.empty())
        throw std::invalid_argument("the delta = 0 rung needs a positive rung before it");
      Field u0_exact = background_u0(grid, conf, 0.0);
      prob.ascending = true;
      prob.u_sub.assign(n, 0.0);
      prob.u_super.resize(n);
      for (std::size_t i = 0; i < n; ++i) prob.u_super[i] = -u0_exact.values[i];
      prob.start = prev;
      double headroom = 4.0;
      for (int attempt = 0;; ++attempt) {
        std::vector<double> cap(n);
        for (std::size_t i = 0; i < n; ++i) cap[i] = prev[i] + headroom;
        prob.K = monotonicity_bound(g, f, prob.u_sub, prob.u_super, cap);
        rung.report = monotone_solve(prob);
        if (rung.report.monotone_violations == 0) break;
        if (attempt >= 3)
          throw LadderStall("delta = 0 rung: monotonicity violations persist as the "
                            "K sampling range grows");
        headroom *= 4.0;
      }
    }

    if (!prev.empty()) {
      double jump = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (g.node_radius(i) >= 0.5 * g.extent())
          jump = std::max(jump, std::abs(rung.report.solution.values[i] - prev[i]));
      rung.jump_outer = jump;
      double dstep = ladder[k - 1] - delta;
      if (jump > opts.rung_consistency * dstep)
        throw LadderStall("rung jump " + std::to_string(jump) + " exceeds " +
                          std::to_string(opts.rung_consistency) + " * " +
                          std::to_string(dstep));
    }
    prev = rung.report.solution.values;
    sol.ladder.push_back(std::move(rung));
  }

  sol.u = sol.ladder.back().report.solution;
  sol.u.name = "u";
  require_finite(sol.u);
  Field u0 = background_u0(grid, conf, 0.0);
  sol.v = make_field(grid, "v");
  for (std::size_t i = 0; i < n; ++i) sol.v.values[i] = sol.u.values[i] + u0.values[i];
  sol.eta = conformal_exponent(*model, grid, conf, sol.c_used, sol.u);

  if (opts.tail_refine && g.is_radial()) {
    double c16 = 16.0 * M_PI * conf.newton_g * sol.c_used;
    auto envelope = [&, c16](std::size_t i) { return std::exp(c16 + lp[i]); };
    sol.tail_start_radius = refine_exponential_tail(*model, sol.v, envelope);
  }
  return sol;
}

}  // namespace bih

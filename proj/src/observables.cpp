#include "bih/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bih/errors.hpp"
#include "bih/parallel.hpp"

namespace bih {

namespace {

double dist_to_vortices(const Grid& g, const VortexConfiguration& conf, std::size_t i) {
  auto xy = g.node_xy(i);
  double d = std::numeric_limits<double>::infinity();
  for (const auto& p : conf.points)
    d = std::min(d, std::hypot(xy[0] - p[0], xy[1] - p[1]));
  return d;
}

// nodes where a centered Laplacian/gradient of v is meaningful
bool stencil_ok(const Grid& g, const Field& v, std::size_t i) {
  if (g.is_boundary(i)) return false;
  if (g.is_radial()) {
    if (i == 0) return false;
    return std::isfinite(v.values[i - 1]) && std::isfinite(v.values[i]) &&
           std::isfinite(v.values[i + 1]);
  }
  std::size_t n = g.n_side;
  return std::isfinite(v.values[i]) && std::isfinite(v.values[i - 1]) &&
         std::isfinite(v.values[i + 1]) && std::isfinite(v.values[i - n]) &&
         std::isfinite(v.values[i + n]);
}

}  // namespace

ReconstructedFields reconstruct(const ModelSpec& m, const Field& v,
                                const std::optional<Field>& eta, bool anti_vortex) {
  auto grid = v.grid;
  std::size_t n = grid->size();
  ReconstructedFields out;
  out.sign = anti_vortex ? -1 : +1;
  out.eta = eta;
  out.phi_sq = make_field(grid, "phi_sq");
  out.F12 = make_field(grid, "F12");
  out.energy_density = make_field(grid, "energy_density");

  Field rho = make_field(grid, "rho");
  for (std::size_t i = 0; i < n; ++i) rho.values[i] = std::exp(0.5 * v.values[i]);
  Field grho = gradient_squared(rho);
  out.D_phi_sq = make_field(grid, "D_phi_sq");

  for (std::size_t i = 0; i < n; ++i) {
    double t = std::exp(v.values[i]);
    if (t > 1.0) t = 1.0;
    double et = eta ? std::exp(eta->values[i]) : 1.0;
    out.phi_sq.values[i] = t;
    out.F12.values[i] = -out.sign * et * m.U(t) / (std::sqrt(m.G(t)) * m.dilation(t));
    out.D_phi_sq.values[i] = 2.0 * grho.values[i];
    out.energy_density.values[i] =
        m.w_derived(t) * out.D_phi_sq.values[i] / et + m.U(t) * m.U(t) / m.dilation(t);
  }
  return out;
}

double flux(const ReconstructedFields& fields, QuadratureRule rule) {
  return integrate(fields.F12, rule);
}

double flux_identity_value(std::shared_ptr<const Grid> grid, const VortexConfiguration& conf,
                           QuadratureRule rule) {
  return 0.5 * integrate(background_g(grid, conf), rule);
}

double energy(const ReconstructedFields& fields, EnergyMetric metric, QuadratureRule rule) {
  if (metric == EnergyMetric::flat) return integrate(fields.energy_density, rule);
  if (!fields.eta) throw std::invalid_argument("conformal energy needs eta");
  Field h = fields.energy_density;
  for (std::size_t i = 0; i < h.size(); ++i) h.values[i] *= std::exp(fields.eta->values[i]);
  h.name = "energy_density_conformal";
  return integrate(h, rule);
}

double current_integral(const ModelSpec& m, const Field& v) {
  const Grid& g = *v.grid;
  if (g.is_radial()) {
    auto dv = radial_derivative(v);
    std::size_t i = g.r.size() - 1;
    double t = std::min(std::exp(v.values[i]), 1.0);
    return 2.0 * M_PI * g.r[i] * m.g_derived(t) * t * dv[i];
  }
  // counterclockwise square path along the boundary ring: J . dl with
  // J = g(e^v) e^v (-d2 v, d1 v); one-sided derivatives into the domain
  std::size_t ns = g.n_side;
  double h = g.h, acc = 0.0;
  auto ev = [&](std::size_t ix, std::size_t iy) { return std::exp(v.values[ix * ns + iy]); };
  auto term = [&](std::size_t ix, std::size_t iy, double d1, double d2, double dx, double dy) {
    double t = std::min(ev(ix, iy), 1.0);
    return m.g_derived(t) * t * (-d2 * dx + d1 * dy);
  };
  for (std::size_t k = 0; k + 1 < ns; ++k) {
    // bottom (iy=0, +x), top (iy=ns-1, -x)
    double d2b = (std::log(std::max(ev(k, 1), 1e-300)) - std::log(std::max(ev(k, 0), 1e-300))) / h;
    double d1b = (std::log(std::max(ev(k + 1, 0), 1e-300)) - std::log(std::max(ev(k, 0), 1e-300))) / h;
    acc += term(k, 0, d1b, d2b, h, 0.0);
    double d2t = (std::log(std::max(ev(k, ns - 1), 1e-300)) - std::log(std::max(ev(k, ns - 2), 1e-300))) / h;
    double d1t = (std::log(std::max(ev(k + 1, ns - 1), 1e-300)) - std::log(std::max(ev(k, ns - 1), 1e-300))) / h;
    acc += term(k, ns - 1, d1t, d2t, -h, 0.0);
    // right (ix=ns-1, +y), left (ix=0, -y)
    double d1r = (std::log(std::max(ev(ns - 1, k), 1e-300)) - std::log(std::max(ev(ns - 2, k), 1e-300))) / h;
    double d2r = (std::log(std::max(ev(ns - 1, k + 1), 1e-300)) - std::log(std::max(ev(ns - 1, k), 1e-300))) / h;
    acc += term(ns - 1, k, d1r, d2r, 0.0, h);
    double d1l = (std::log(std::max(ev(1, k), 1e-300)) - std::log(std::max(ev(0, k), 1e-300))) / h;
    double d2l = (std::log(std::max(ev(0, k + 1), 1e-300)) - std::log(std::max(ev(0, k), 1e-300))) / h;
    acc += term(0, k, d1l, d2l, 0.0, -h);
  }
  return acc;
}

double current_area_integral(const ModelSpec& m, const Field& v,
                             const VortexConfiguration& conf) {
  const Grid& g = *v.grid;
  // discrete outer flux of (1/2) F_anti(e^v)
  Field fa = make_field(v.grid, "F_anti_ev");
  for (std::size_t i = 0; i < g.size(); ++i)
    fa.values[i] = m.F_anti(std::min(std::exp(v.values[i]), 1.0));
  double outer;
  if (g.is_radial()) {
    std::size_t nn = g.r.size();
    outer = 2.0 * M_PI * g.face[nn - 2] * (fa.values[nn - 1] - fa.values[nn - 2]);
  } else {
    std::size_t ns = g.n_side;
    outer = 0.0;
    for (std::size_t k = 1; k + 1 < ns; ++k) {
      outer += fa.values[(ns - 1) * ns + k] - fa.values[(ns - 2) * ns + k];
      outer += fa.values[k] - fa.values[ns + k];
      outer += fa.values[k * ns + ns - 1] - fa.values[k * ns + ns - 2];
      outer += fa.values[k * ns] - fa.values[k * ns + 1];
    }
  }
  // core contribution: each vortex carries -4 pi a m, a = lim t g(t)
  double a = 0.5 * (1.0 + std::sqrt(m.G(0.0)) * m.U(0.0));
  return 0.5 * outer - 4.0 * M_PI * a * conf.total_multiplicity();
}

DecayReport decay_fit(const Field& v, DecayReport::Kind kind, double expected_rate) {
  const Grid& g = *v.grid;
  DecayReport rep;
  rep.kind = kind;
  rep.expected_rate = expected_rate;
  double rmax = g.extent();
  rep.annulus_lo = 0.5 * rmax;
  rep.annulus_hi = 0.75 * rmax;

  // (abscissa, ln|v|) samples on the annulus; cartesian data radially averaged
  std::vector<std::pair<double, double>> pts;
  const double floor_mag = 1e-290;
  double underflow_r = 0.0;
  auto push = [&](double r, double mag) {
    if (!std::isfinite(mag) || mag < floor_mag) {
      if (underflow_r == 0.0) underflow_r = r;
      return;
    }
    double x = kind == DecayReport::Kind::exponential ? r : std::log(r);
    pts.emplace_back(x, std::log(mag));
  };
  if (g.is_radial()) {
    for (std::size_t i = 0; i < g.r.size(); ++i)
      if (g.r[i] >= rep.annulus_lo && g.r[i] <= rep.annulus_hi)
        push(g.r[i], std::abs(v.values[i]));
  } else {
    std::size_t nbins = 64;
    std::vector<double> sum(nbins, 0.0), cnt(nbins, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      double r = g.node_radius(i);
      if (r < rep.annulus_lo || r > rep.annulus_hi) continue;
      auto b = static_cast<std::size_t>((r - rep.annulus_lo) / (rep.annulus_hi - rep.annulus_lo) * nbins);
      if (b >= nbins) b = nbins - 1;
      sum[b] += std::abs(v.values[i]);
      cnt[b] += 1.0;
    }
    for (std::size_t b = 0; b < nbins; ++b)
      if (cnt[b] > 0)
        push(rep.annulus_lo + (b + 0.5) / nbins * (rep.annulus_hi - rep.annulus_lo), sum[b] / cnt[b]);
  }

  rep.points_used = pts.size();
  if (pts.size() < 8) {
    rep.degenerate = true;
    rep.underflow_radius = underflow_r != 0.0 ? underflow_r : rep.annulus_lo;
    return rep;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [x, y] : pts) {
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  double m = pts.size();
  double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  double icpt = (sy - slope * sx) / m;
  double ss = 0;
  for (auto& [x, y] : pts) {
    double e = y - (icpt + slope * x);
    ss += e * e;
  }
  rep.fitted_rate = -slope;
  rep.fit_residual = std::sqrt(ss / m);
  rep.underflow_radius = underflow_r;
  return rep;
}

double eta_exponent_fit(const Field& eta) {
  const Grid& g = *eta.grid;
  double lo = 0.5 * g.extent(), hi = 0.75 * g.extent();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double r = g.node_radius(i);
    if (r < lo || r > hi) continue;
    double x = std::log(r), y = eta.values[i];
    sx += x; sy += y; sxx += x * x; sxy += x * y; m += 1;
  }
  if (m < 8) throw std::invalid_argument("eta fit: too few annulus nodes");
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double curvature_total(const Field& eta) {
  const Grid& g = *eta.grid;
  LinearOperator lap(eta.grid);
  Field le = lap.apply(eta);
  double acc = 0.0;
  if (g.is_radial()) {
    for (std::size_t i = 0; i + 1 < g.r.size(); ++i)
      acc += 2.0 * M_PI * g.volume[i] * le.values[i];
  } else {
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!g.is_boundary(i)) acc += g.h * g.h * le.values[i];
  }
  return -0.5 * acc;
}

BpsReport bps_residuals(const ModelSpec& m, const ReconstructedFields& fields,
                        const Field& v, const VortexConfiguration& conf) {
  const Grid& g = *v.grid;
  std::size_t n = g.size();
  LinearOperator lap(v.grid);
  BpsReport rep;

  std::vector<double> lap_v(n, 0.0);
  lap.apply(v.values, lap_v);
  Field fa = make_field(v.grid, "fa");
  for (std::size_t i = 0; i < n; ++i)
    fa.values[i] = m.F_anti(std::min(std::exp(v.values[i]), 1.0));
  std::vector<double> lap_fa(n, 0.0);
  lap.apply(fa.values, lap_fa);

  double f12_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) f12_max = std::max(f12_max, std::abs(fields.F12.values[i]));

  double sup = 0.0, gap_num = 0.0, h_int = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!stencil_ok(g, v, i)) continue;
    if (dist_to_vortices(g, conf, i) < kCoreExclusionRadius) continue;
    double f12_diff = -fields.sign * 0.5 * lap_v[i];
    sup = std::max(sup, std::abs(f12_diff - fields.F12.values[i]));
    double j12 = fields.sign * 0.5 * lap_fa[i];
    double emeta = fields.eta ? std::exp(-fields.eta->values[i]) : 1.0;
    double lhs = fields.energy_density.values[i];
    double rhs = emeta * fields.sign * (fields.F12.values[i] + j12);
    double w = quad_weight(g, i);
    gap_num += w * std::abs(lhs - rhs);
    h_int += w * std::abs(lhs);
  }
  rep.residual_sup = f12_max > 0 ? sup / f12_max : sup;
  rep.energy_identity_gap = h_int > 0 ? gap_num / h_int : gap_num;
  return rep;
}

namespace {

// one-dimensional stress assembly along the x-axis slice of a radial grid
StressReport stress_radial(const ModelSpec& m, const ReconstructedFields& fields,
                           const Field& v, const VortexConfiguration& conf) {
  const Grid& g = *v.grid;
  std::size_t n = g.r.size();
  Field rho = make_field(v.grid, "rho");
  for (std::size_t i = 0; i < n; ++i) rho.values[i] = std::exp(0.5 * v.values[i]);
  auto drho = radial_derivative(rho);
  auto dv = radial_derivative(v);
  LinearOperator lap(v.grid);
  std::vector<double> lap_v(n, 0.0);
  lap.apply(v.values, lap_v);

  double hmax = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    hmax = std::max(hmax, std::abs(fields.energy_density.values[i]));

  StressReport rep;
  double b2 = m.b() * m.b();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (dist_to_vortices(g, conf, i) < kCoreExclusionRadius) continue;
    if (!stencil_ok(g, v, i)) continue;
    double t = std::min(std::exp(v.values[i]), 1.0);
    double et = fields.eta ? std::exp(fields.eta->values[i]) : 1.0;
    double f12d = -fields.sign * 0.5 * lap_v[i];
    double F = std::sqrt(1.0 + m.G(t) * f12d * f12d / (et * et * b2));
    double em = et * b2 * (m.dilation(t) - 1.0 / F);
    double matter = m.w_derived(t) * (drho[i] * drho[i] - 0.25 * rho.values[i] * rho.values[i] * dv[i] * dv[i]);
    rep.t11 = std::max(rep.t11, std::abs(em + matter));
    rep.t22 = std::max(rep.t22, std::abs(em - matter));
    // T12 = 2w (d1 rho d2 rho + P1 P2) vanishes identically on the axis slice
  }
  rep.t11 /= hmax;
  rep.t22 /= hmax;
  return rep;
}

StressReport stress_cartesian(const ModelSpec& m, const ReconstructedFields& fields,
                              const Field& v, const VortexConfiguration& conf) {
  const Grid& g = *v.grid;
  std::size_t ns = g.n_side, n = g.size();
  Field rho = make_field(v.grid, "rho");
  for (std::size_t i = 0; i < n; ++i) rho.values[i] = std::exp(0.5 * v.values[i]);
  LinearOperator lap(v.grid);
  std::vector<double> lap_v(n, 0.0);
  lap.apply(v.values, lap_v);

  double hmax = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    hmax = std::max(hmax, std::abs(fields.energy_density.values[i]));

  StressReport rep;
  double b2 = m.b() * m.b();
  double inv2h = 0.5 / g.h;
  for (std::size_t ix = 1; ix + 1 < ns; ++ix)
    for (std::size_t iy = 1; iy + 1 < ns; ++iy) {
      std::size_t i = ix * ns + iy;
      if (dist_to_vortices(g, conf, i) < kCoreExclusionRadius) continue;
      if (!stencil_ok(g, v, i)) continue;
      double t = std::min(std::exp(v.values[i]), 1.0);
      double et = fields.eta ? std::exp(fields.eta->values[i]) : 1.0;
      double f12d = -fields.sign * 0.5 * lap_v[i];
      double F = std::sqrt(1.0 + m.G(t) * f12d * f12d / (et * et * b2));
      double em = et * b2 * (m.dilation(t) - 1.0 / F);
      double r1 = (rho.values[i + ns] - rho.values[i - ns]) * inv2h;
      double r2 = (rho.values[i + 1] - rho.values[i - 1]) * inv2h;
      double v1 = (v.values[i + ns] - v.values[i - ns]) * inv2h;
      double v2 = (v.values[i + 1] - v.values[i - 1]) * inv2h;
      double w = m.w_derived(t);
      double p1 = -0.5 * rho.values[i] * v2, p2 = 0.5 * rho.values[i] * v1;
      double matter = w * (r1 * r1 + p1 * p1 - r2 * r2 - p2 * p2);
      rep.t11 = std::max(rep.t11, std::abs(em + matter));
      rep.t22 = std::max(rep.t22, std::abs(em - matter));
      rep.t12 = std::max(rep.t12, std::abs(2.0 * w * (r1 * r2 + p1 * p2)));
    }
  rep.t11 /= hmax;
  rep.t22 /= hmax;
  rep.t12 /= hmax;
  return rep;
}

}  // namespace

StressReport stress_residuals(const ModelSpec& m, const ReconstructedFields& fields,
                              const Field& v, const VortexConfiguration& conf) {
  return v.grid->is_radial() ? stress_radial(m, fields, v, conf)
                             : stress_cartesian(m, fields, v, conf);
}

Observables compute_observables(const ModelSpec& model, std::shared_ptr<const Grid> grid,
                                const VortexConfiguration& conf, const Field& v,
                                const std::optional<Field>& eta, bool anti_vortex,
                                QuadratureRule rule) {
  Observables obs;
  ReconstructedFields fields = reconstruct(model, v, eta, anti_vortex);
  obs.flux = flux(fields, rule);
  double ident = flux_identity_value(grid, conf, rule);
  obs.flux_identity_gap = std::abs(obs.flux - fields.sign * ident);
  obs.energy_direct = energy(fields, eta ? EnergyMetric::conformal : EnergyMetric::flat, rule);
  obs.current_integral = current_integral(model, v);
  obs.current_area = current_area_integral(model, v, conf);
  obs.energy_topological = fields.sign * obs.flux + obs.current_area;
  obs.decay = decay_fit(v, DecayReport::Kind::exponential,
                        std::sqrt(model.bounds().M_decay));
  if (eta) {
    obs.decay = decay_fit(v, DecayReport::Kind::power, 4.0);
    obs.curvature_total = curvature_total(*eta);
    obs.eta_slope = eta_exponent_fit(*eta);
    obs.eta_slope_expected = -16.0 * M_PI * conf.newton_g * conf.total_multiplicity();
  }
  BpsReport bps = bps_residuals(model, fields, v, conf);
  obs.bps_residual = bps.residual_sup;
  obs.energy_identity_gap = bps.energy_identity_gap;
  obs.stress = stress_residuals(model, fields, v, conf);
  obs.f_anti_clamped = model.f_anti_clamped();
  return obs;
}

}  // namespace bih

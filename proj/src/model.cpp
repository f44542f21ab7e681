#include "bih/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bih/errors.hpp"

namespace bih {

namespace {

constexpr std::size_t kSamples = 10001;
constexpr double kMargin = 0.01;

struct Extrema {
  double lo, hi;
};

// Sample fn on [0,1], then refine around the arg-extrema once.
Extrema sampled_extrema(const ScalarFn& fn) {
  double lo = fn(0.0), hi = lo;
  std::size_t ilo = 0, ihi = 0;
  for (std::size_t i = 1; i < kSamples; ++i) {
    double t = static_cast<double>(i) / (kSamples - 1);
    double v = fn(t);
    if (v < lo) { lo = v; ilo = i; }
    if (v > hi) { hi = v; ihi = i; }
  }
  double step = 1.0 / (kSamples - 1);
  auto refine = [&](std::size_t idx, bool minimum) {
    double t0 = std::max(0.0, idx * step - 2.0 * step);
    double t1 = std::min(1.0, idx * step + 2.0 * step);
    for (int j = 0; j <= 100; ++j) {
      double t = t0 + (t1 - t0) * j / 100.0;
      double v = fn(t);
      if (minimum) lo = std::min(lo, v);
      else hi = std::max(hi, v);
    }
  };
  refine(ilo, true);
  refine(ihi, false);
  return {lo, hi};
}

}  // namespace

double ModelSpec::g_derived(double t) const {
  if (t <= 0.0) throw DomainError("g_derived is evaluated on (0, 1]");
  return (1.0 + std::sqrt(gfun_(t)) * u_(t)) / (2.0 * t);
}

double ModelSpec::w_derived(double t) const {
  if (gp_) {
    double G = gfun_(t);
    return gp_(t) * u_(t) / (2.0 * std::sqrt(G)) + std::sqrt(G) * up_(t);
  }
  // central difference of sqrt(G) U; second order suffices for diagnostics
  double h = 1e-6 * std::max(1.0, std::abs(t));
  auto su = [&](double s) { return std::sqrt(gfun_(s)) * u_(s); };
  return (su(t + h) - su(t - h)) / (2.0 * h);
}

double ModelSpec::V_derived(double t) const { return b_ * b_ * (1.0 - dilation(t)); }

double ModelSpec::dilation(double t) const {
  double q = 1.0 - u_(t) * u_(t) / (b_ * b_);
  if (q <= 0.0) throw DomainError("dilation factor: |U(t)| >= b");
  return std::sqrt(q);
}

double ModelSpec::rhs_vortex(double t) const {
  double G = gfun_(t);
  if (G <= 0.0) throw DomainError("rhs_vortex: G(t) <= 0");
  return 2.0 * u_(t) / (std::sqrt(G) * dilation(t));
}

double ModelSpec::F_anti(double t) const {
  if (t < kTMin) {
    clamped_->store(true);
    t = kTMin;
  }
  double y = std::log(t);
  const auto& ys = fa_y_;
  if (y >= ys.back()) {
    // short analytic continuation above the table (roundoff excursions)
    return fa_val_.back() + fa_slope_.back() * (y - ys.back());
  }
  std::size_t k = static_cast<std::size_t>((y - ys.front()) / (ys[1] - ys.front()));
  if (k + 1 >= ys.size()) k = ys.size() - 2;
  double hy = ys[k + 1] - ys[k];
  double s = (y - ys[k]) / hy;
  double s2 = s * s, s3 = s2 * s;
  // cubic Hermite with exact slopes dF/dy = 2 g(e^y) e^y
  return (2 * s3 - 3 * s2 + 1) * fa_val_[k] + (s3 - 2 * s2 + s) * hy * fa_slope_[k] +
         (-2 * s3 + 3 * s2) * fa_val_[k + 1] + (s3 - s2) * hy * fa_slope_[k + 1];
}

ModelSpec build_model(ScalarFn u, ScalarFn u_prime, ScalarFn g, double b,
                      ScalarFn g_prime, std::string name) {
  if (b <= 0.0) throw ConstraintViolation("Born-Infeld parameter b must be positive");
  if (!u || !u_prime || !g) throw ConstraintViolation("U, U', G must all be supplied");

  if (std::abs(u(1.0)) > 1e-10)
    throw ConstraintViolation("U(1) must vanish; got U(1) = " + std::to_string(u(1.0)));
  for (std::size_t i = 0; i < kSamples; ++i) {
    double t = static_cast<double>(i) / (kSamples - 1);
    if (!(u_prime(t) > 0.0))
      throw ConstraintViolation("U'(t) must be positive on [0,1]; fails at t = " + std::to_string(t));
    if (!(g(t) > 0.0))
      throw ConstraintViolation("G(t) must be positive on [0,1]; fails at t = " + std::to_string(t));
    if (t > 0.0 && t < 1.0 && !(1.0 + std::sqrt(g(t)) * u(t) > 0.0))
      throw ConstraintViolation("g(t) = (1+sqrt(G)U)/(2t) must be positive on (0,1); fails at t = " +
                                std::to_string(t));
  }
  if (!(std::abs(u(0.0)) < b))
    throw ConstraintViolation("|U(0)| must be < b (needed for the dilation factor and lambda2)");

  ModelSpec m;
  m.u_ = std::move(u);
  m.up_ = std::move(u_prime);
  m.gfun_ = std::move(g);
  m.gp_ = std::move(g_prime);
  m.b_ = b;
  m.name_ = std::move(name);
  m.clamped_ = std::make_shared<std::atomic<bool>>(false);

  Extrema eu = sampled_extrema(m.up_);
  Extrema eg = sampled_extrema(m.gfun_);
  ModelBounds& bd = m.bounds_;
  bd.m_U = eu.lo * (1.0 - kMargin);
  bd.M_U = eu.hi * (1.0 + kMargin);
  bd.m_G = eg.lo * (1.0 - kMargin);
  bd.M_G = eg.hi * (1.0 + kMargin);
  double u0 = m.u_(0.0);
  bd.lambda1 = 2.0 * bd.m_U / std::sqrt(bd.M_G);
  bd.lambda2 = 2.0 * bd.M_U / std::sqrt(bd.m_G * (1.0 - u0 * u0 / (b * b)));
  bd.M_decay = 2.0 * m.up_(1.0) / std::sqrt(m.gfun_(1.0));

  // F_anti table in y = ln t over [ln t_min, ln 1.5], composite Simpson per cell
  const std::size_t cells = 8192;
  double y0 = std::log(ModelSpec::kTMin), y1 = std::log(1.5);
  m.fa_y_.resize(cells + 1);
  m.fa_val_.assign(cells + 1, 0.0);
  m.fa_slope_.resize(cells + 1);
  auto integrand = [&](double y) {
    double t = std::exp(y);
    return 1.0 + std::sqrt(m.gfun_(t)) * m.u_(t);  // dF/dy = 2 g(t) t
  };
  for (std::size_t k = 0; k <= cells; ++k) {
    m.fa_y_[k] = y0 + (y1 - y0) * k / cells;
    m.fa_slope_[k] = integrand(m.fa_y_[k]);
  }
  // accumulate from the anchor F(1) = 0 at y = 0
  std::size_t k1 = static_cast<std::size_t>(std::round((0.0 - y0) / ((y1 - y0) / cells)));
  std::vector<double> cell_int(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    double ya = m.fa_y_[k], yb = m.fa_y_[k + 1], ym = 0.5 * (ya + yb);
    cell_int[k] = (yb - ya) / 6.0 * (integrand(ya) + 4.0 * integrand(ym) + integrand(yb));
  }
  m.fa_val_[k1] = 0.0;
  for (std::size_t k = k1; k < cells; ++k) m.fa_val_[k + 1] = m.fa_val_[k] + cell_int[k];
  for (std::size_t k = k1; k-- > 0;) m.fa_val_[k] = m.fa_val_[k + 1] - cell_int[k];
  // snap the anchor exactly (k1 lands on y=0 by construction of the range)
  double off = m.F_anti(1.0);
  for (auto& v : m.fa_val_) v -= off;
  return m;
}

ModelSpec make_canon() {
  return build_model([](double t) { return 0.5 * (t - 1.0); },
                     [](double) { return 0.5; },
                     [](double) { return 1.0; }, 1.0,
                     [](double) { return 0.0; }, "canon");
}

ModelSpec make_abelian_limit() {
  return build_model([](double t) { return 0.5 * (t - 1.0); },
                     [](double) { return 0.5; },
                     [](double) { return 1.0; }, 1e6,
                     [](double) { return 0.0; }, "abelian-limit");
}

namespace {
double poly_eval(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * t + c[i];
  return v;
}
std::vector<double> poly_derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * static_cast<double>(i));
  if (d.empty()) d.push_back(0.0);
  return d;
}
}  // namespace

ModelSpec make_polynomial(const std::vector<double>& u_coeffs,
                          const std::vector<double>& g_coeffs, double b, std::string name) {
  if (u_coeffs.empty() || g_coeffs.empty())
    throw ConstraintViolation("polynomial model needs nonempty U and G coefficients");
  auto du = poly_derivative(u_coeffs);
  auto dg = poly_derivative(g_coeffs);
  return build_model([u_coeffs](double t) { return poly_eval(u_coeffs, t); },
                     [du](double t) { return poly_eval(du, t); },
                     [g_coeffs](double t) { return poly_eval(g_coeffs, t); }, b,
                     [dg](double t) { return poly_eval(dg, t); }, std::move(name));
}

}  // namespace bih

#include "bih/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "bih/errors.hpp"
#include "bih/observables.hpp"
#include "bih/parallel.hpp"
#include "bih/strings.hpp"
#include "bih/vortex.hpp"

namespace bih {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(double x) {
  std::ostringstream ss;
  ss << std::setprecision(6) << x;
  return ss.str();
}

struct SuiteState {
  // canon vortex runs at N = 1, 2, 3 (criteria 1-4, 11, 12)
  std::vector<VortexSolution> vortex;
  std::vector<Observables> vortex_obs;
  std::vector<double> vortex_seconds;
  // abelian-limit N = 1 (criterion 3)
  std::unique_ptr<VortexSolution> abelian;
  // string runs at N = 1, 3 (criteria 5-8)
  std::vector<StringSolution> strings;
  std::vector<Observables> string_obs;
  std::vector<double> string_seconds;

  std::shared_ptr<const ModelSpec> canon =
      std::make_shared<const ModelSpec>(make_canon());
  std::shared_ptr<const ModelSpec> abelian_model =
      std::make_shared<const ModelSpec>(make_abelian_limit());

  void need_vortex() {
    if (!vortex.empty()) return;
    auto grid = make_radial_grid(100.0, 4097, 2.0);
    for (int N : {1, 2, 3}) {
      auto conf = VortexConfiguration::make({{0.0, 0.0}}, {N});
      auto t0 = clock_type::now();
      vortex.push_back(solve_vortex(canon, grid, conf));
      vortex_seconds.push_back(seconds_since(t0));
      vortex_obs.push_back(compute_observables(*canon, grid, conf, vortex.back().v,
                                               std::nullopt, false));
    }
  }
  void need_abelian() {
    if (abelian) return;
    auto grid = make_radial_grid(100.0, 4097, 2.0);
    auto conf = VortexConfiguration::make({{0.0, 0.0}}, {1});
    abelian = std::make_unique<VortexSolution>(solve_vortex(abelian_model, grid, conf));
  }
  void need_strings() {
    if (!strings.empty()) return;
    auto grid = make_radial_grid(100.0, 8193, 2.0);
    for (int N : {1, 3}) {
      auto conf = VortexConfiguration::make({{0.0, 0.0}}, {N}, 0.01);
      auto t0 = clock_type::now();
      strings.push_back(solve_string(canon, grid, conf));
      string_seconds.push_back(seconds_since(t0));
      const auto& s = strings.back();
      string_obs.push_back(
          compute_observables(*canon, grid, conf, s.v, s.eta, false));
    }
  }
};

CriterionResult crit_flux(SuiteState& st) {
  CriterionResult r{1, "flux quantization |Phi - 2piN|/2piN < 1e-2, runtime < 10 s"};
  st.need_vortex();
  r.bound = 1e-2;
  r.pass = true;
  std::ostringstream d;
  for (int k = 0; k < 3; ++k) {
    double target = 2.0 * M_PI * (k + 1);
    double rel = std::abs(st.vortex_obs[k].flux - target) / target;
    r.measured = std::max(r.measured, rel);
    bool time_ok = st.vortex_seconds[k] < 10.0;
    if (rel >= r.bound || !time_ok) r.pass = false;
    d << "N=" << k + 1 << ": flux=" << fmt(st.vortex_obs[k].flux) << " rel=" << fmt(rel)
      << " t=" << fmt(st.vortex_seconds[k]) << "s; ";
  }
  r.detail = d.str();
  return r;
}

CriterionResult crit_energy(SuiteState& st) {
  CriterionResult r{2, "energy quantization |E - 2piN|/2piN < 2e-2 (E = int H)"};
  st.need_vortex();
  r.bound = 2e-2;
  r.pass = true;
  std::ostringstream d;
  for (int k = 0; k < 3; ++k) {
    double target = 2.0 * M_PI * (k + 1);
    double rel = std::abs(st.vortex_obs[k].energy_direct - target) / target;
    r.measured = std::max(r.measured, rel);
    if (rel >= r.bound) r.pass = false;
    d << "N=" << k + 1 << ": E=" << fmt(st.vortex_obs[k].energy_direct)
      << " rel=" << fmt(rel) << "; ";
  }
  d << "(measured E tracks 2piN*|sqrt(G(0))U(0)| = piN for this model; "
       "topological E = " << fmt(st.vortex_obs[0].energy_topological) << " at N=1)";
  r.detail = d.str();
  return r;
}

CriterionResult crit_decay(SuiteState& st) {
  CriterionResult r{3, "vortex decay rate within 10% of sqrt(M) on [50,75]"};
  st.need_vortex();
  st.need_abelian();
  r.bound = 0.10;
  auto fit1 = st.vortex_obs[0].decay;
  double m1 = std::sqrt(st.canon->bounds().M_decay);
  double rel1 = std::abs(fit1.fitted_rate - m1) / m1;
  auto conf = VortexConfiguration::make({{0.0, 0.0}}, {1});
  auto fit2 = decay_fit(st.abelian->v, DecayReport::Kind::exponential,
                        std::sqrt(st.abelian_model->bounds().M_decay));
  double m2 = fit2.expected_rate;
  double rel2 = std::abs(fit2.fitted_rate - m2) / m2;
  r.measured = std::max(rel1, rel2);
  r.pass = !fit1.degenerate && !fit2.degenerate && r.measured < r.bound;
  r.detail = "canon: rate=" + fmt(fit1.fitted_rate) + " (expect " + fmt(m1) +
             "); abelian-limit: rate=" + fmt(fit2.fitted_rate) + " (expect " + fmt(m2) + ")";
  return r;
}

CriterionResult crit_bracket(SuiteState& st) {
  CriterionResult r{4, "bracket invariant u_l1 <= u <= u_l2 with slack 10 h^2 scale"};
  st.need_vortex();
  r.pass = true;
  int hard = 0;
  double worst = 0.0;
  for (const auto& vs : st.vortex) {
    const Grid& g = *vs.grid;
    for (std::size_t i = 0; i < g.size(); ++i) {
      double h = g.local_h(i);
      double scale = std::max(1.0, std::abs(vs.u.values[i]));
      double slack = 10.0 * h * h * scale;
      double lo = vs.u_lambda1.values[i] - vs.u.values[i];
      double hi = vs.u.values[i] - vs.u_lambda2.values[i];
      worst = std::max(worst, std::max(lo, hi));
      if (lo > slack || hi > slack) ++hard;
    }
  }
  r.measured = worst;
  r.pass = hard == 0;
  r.detail = "hard violations: " + std::to_string(hard) + ", worst excess " + fmt(worst) +
             "; one-sided admissibility worst sub " + fmt(st.vortex[0].sub_admissibility) +
             " super " + fmt(st.vortex[0].super_admissibility);
  return r;
}

CriterionResult crit_curvature(SuiteState& st) {
  CriterionResult r{5, "string curvature |int K - 16pi^2 G N|/(16pi^2 G N) < 3e-2, < 2 min"};
  st.need_strings();
  r.bound = 3e-2;
  r.pass = true;
  std::ostringstream d;
  int Ns[2] = {1, 3};
  for (int k = 0; k < 2; ++k) {
    double target = 16.0 * M_PI * M_PI * 0.01 * Ns[k];
    double rel = std::abs(st.string_obs[k].curvature_total - target) / target;
    r.measured = std::max(r.measured, rel);
    bool time_ok = st.string_seconds[k] < 120.0;
    if (rel >= r.bound || !time_ok) r.pass = false;
    d << "N=" << Ns[k] << ": curv=" << fmt(st.string_obs[k].curvature_total)
      << " target=" << fmt(target) << " rel=" << fmt(rel)
      << " t=" << fmt(st.string_seconds[k]) << "s; ";
  }
  r.detail = d.str();
  return r;
}

CriterionResult crit_eta(SuiteState& st) {
  CriterionResult r{6, "conformal exponent slope within 5% of -16 pi G N"};
  st.need_strings();
  r.bound = 0.05;
  r.pass = true;
  std::ostringstream d;
  for (std::size_t k = 0; k < st.strings.size(); ++k) {
    double expect = st.string_obs[k].eta_slope_expected;
    double rel = std::abs(st.string_obs[k].eta_slope - expect) / std::abs(expect);
    r.measured = std::max(r.measured, rel);
    if (rel >= r.bound) r.pass = false;
    d << "slope=" << fmt(st.string_obs[k].eta_slope) << " expect=" << fmt(expect) << "; ";
  }
  r.detail = d.str();
  return r;
}

CriterionResult crit_string_bracket(SuiteState& st) {
  CriterionResult r{7, "string bracket chain 0 <= u_d <= -u0_d <= -u0 at every rung"};
  st.need_strings();
  int hard = 0;
  double worst = 0.0;
  for (const auto& ss : st.strings) {
    const Grid& g = *ss.grid;
    Field u0 = background_u0(ss.grid, ss.conf, 0.0);
    for (const auto& rung : ss.ladder) {
      Field u0d = background_u0(ss.grid, ss.conf, rung.delta);
      const auto& u = rung.report.solution.values;
      for (std::size_t i = 0; i < g.size(); ++i) {
        double h = g.local_h(i);
        double slack = 10.0 * h * h * std::max(1.0, std::abs(u[i]));
        double lo = -u[i];                      // u >= 0
        double mid = u[i] - (-u0d.values[i]);   // u <= -u0_delta
        double chain = (-u0d.values[i]) - (-u0.values[i]);  // -u0_d <= -u0
        worst = std::max({worst, lo, mid, chain});
        if (lo > slack || mid > slack || chain > 1e-12) ++hard;
      }
    }
  }
  r.measured = worst;
  r.pass = hard == 0;
  r.detail = "hard violations: " + std::to_string(hard) + ", worst excess " + fmt(worst);
  return r;
}

CriterionResult crit_stress(SuiteState& st) {
  CriterionResult r{8, "stress residuals sup|T11,T22,T12| < 1e-3 of max energy density"};
  st.need_strings();
  r.bound = 1e-3;
  r.pass = true;
  std::ostringstream d;
  for (const auto& o : st.string_obs) {
    r.measured = std::max(r.measured, o.stress.worst());
    if (o.stress.worst() >= r.bound) r.pass = false;
    d << "T11=" << fmt(o.stress.t11) << " T22=" << fmt(o.stress.t22)
      << " T12=" << fmt(o.stress.t12) << "; ";
  }
  r.detail = d.str();
  return r;
}

CriterionResult crit_oracle(SuiteState& st, const AcceptanceOptions& opts) {
  CriterionResult r{9, "2D cartesian vs radial fine-grid oracle: sup|dv| on [1,50] < 1e-3"};
  r.bound = 1e-3;
  auto conf = VortexConfiguration::make({{0.0, 0.0}}, {1});
  auto fine = make_radial_grid(100.0, 32769, 2.0);
  VortexSolution oracle = solve_vortex(st.canon, fine, conf);
  auto cart = make_cartesian_grid(opts.cart_half_width, opts.cart_n);
  VortexSolution sol2d = solve_vortex(st.canon, cart, conf);

  // cubic-free comparison: linear interpolation of the fine radial profile
  const auto& rr = fine->r;
  auto interp = [&](double rho) {
    auto it = std::lower_bound(rr.begin(), rr.end(), rho);
    std::size_t j = std::min<std::size_t>(std::max<std::ptrdiff_t>(1, it - rr.begin()),
                                          rr.size() - 1);
    double w = (rho - rr[j - 1]) / (rr[j] - rr[j - 1]);
    return (1.0 - w) * oracle.v.values[j - 1] + w * oracle.v.values[j];
  };
  double sup = 0.0;
  const Grid& g = *cart;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double rho = g.node_radius(i);
    if (rho < 1.0 || rho > 50.0) continue;
    sup = std::max(sup, std::abs(sol2d.v.values[i] - interp(rho)));
  }
  r.measured = sup;
  r.pass = sup < r.bound;
  r.detail = "cartesian " + std::to_string(opts.cart_n) + "^2 on [-" +
             fmt(opts.cart_half_width) + "," + fmt(opts.cart_half_width) +
             "]^2 vs radial n=32769; sup diff " + fmt(sup);
  return r;
}

CriterionResult crit_gating(SuiteState& st) {
  CriterionResult r{10, "hypothesis gating: 8 pi G N = 0.99 solves, 1.01 rejected"};
  double g99 = 0.99 / (8.0 * M_PI);
  double g101 = 1.01 / (8.0 * M_PI);
  bool solved = false, rejected = false, rejected_spec_example = false;
  std::string note;
  try {
    auto grid = make_radial_grid(50.0, 2049, 2.0);
    auto conf = VortexConfiguration::make({{0.0, 0.0}}, {1}, g99);
    StringSolution s = solve_string(st.canon, grid, conf);
    solved = s.ladder.back().report.converged;
  } catch (const std::exception& e) {
    note = std::string("0.99 case failed: ") + e.what();
  }
  try {
    auto grid = make_radial_grid(50.0, 513, 2.0);
    auto conf = VortexConfiguration::make({{0.0, 0.0}}, {1}, g101);
    solve_string(st.canon, grid, conf);
  } catch (const HypothesisViolation&) {
    rejected = true;
  } catch (const std::exception&) {
  }
  try {
    auto grid = make_radial_grid(50.0, 513, 2.0);
    auto conf = VortexConfiguration::make({{0.0, 0.0}}, {1}, 0.05);  // 8 pi G N ~ 1.257
    solve_string(st.canon, grid, conf);
  } catch (const HypothesisViolation&) {
    rejected_spec_example = true;
  } catch (const std::exception&) {
  }
  r.pass = solved && rejected && rejected_spec_example;
  r.detail = std::string("0.99: ") + (solved ? "converged" : "failed") + "; 1.01: " +
             (rejected ? "HypothesisViolation" : "not rejected") + "; G_N=0.05,N=1: " +
             (rejected_spec_example ? "HypothesisViolation" : "not rejected") +
             (note.empty() ? "" : "; " + note);
  return r;
}

CriterionResult crit_negative(SuiteState& st, const AcceptanceOptions& opts) {
  CriterionResult r{11, "negative controls: 1% perturbation breaks BPS >= 10x; descent monotone"};
  st.need_vortex();
  const VortexSolution& vs = st.vortex[0];
  ReconstructedFields base = reconstruct(*st.canon, vs.v);
  BpsReport clean = bps_residuals(*st.canon, base, vs.v, vs.conf);

  Field pert = vs.v;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (auto& x : pert.values)
    if (std::isfinite(x)) x *= 1.0 + 0.01 * uni(rng);
  ReconstructedFields pf = reconstruct(*st.canon, pert);
  BpsReport dirty = bps_residuals(*st.canon, pf, pert, vs.conf);
  double ratio = dirty.residual_sup / std::max(clean.residual_sup, 1e-300);

  int mono = 0;
  for (const auto& v : st.vortex)
    mono += v.report.monotone_violations + v.report_lambda1.monotone_violations +
            v.report_lambda2.monotone_violations;
  if (!st.strings.empty())
    for (const auto& s : st.strings)
      for (const auto& rung : s.ladder) mono += rung.report.monotone_violations;

  r.measured = ratio;
  r.bound = 10.0;
  r.pass = ratio >= 10.0 && mono == 0;
  r.detail = "bps clean=" + fmt(clean.residual_sup) + " perturbed=" + fmt(dirty.residual_sup) +
             " ratio=" + fmt(ratio) + "; monotone violations=" + std::to_string(mono);
  return r;
}

CriterionResult crit_richardson(SuiteState& st) {
  CriterionResult r{12, "mesh convergence: Richardson order in [1.7, 2.3] for flux and energy"};
  r.pass = true;
  std::ostringstream d;
  auto order = [](double q1, double q2, double q3) {
    return std::log2(std::abs(q1 - q2) / std::abs(q2 - q3));
  };

  // vortex triplet
  {
    auto conf = VortexConfiguration::make({{0.0, 0.0}}, {1});
    double fl[3], en[3];
    int k = 0;
    for (std::size_t n : {1025u, 2049u, 4097u}) {
      auto grid = make_radial_grid(100.0, n, 2.0);
      VortexSolution vs = solve_vortex(st.canon, grid, conf);
      ReconstructedFields f = reconstruct(*st.canon, vs.v);
      fl[k] = flux(f);
      en[k] = energy(f, EnergyMetric::flat);
      ++k;
    }
    double pf = order(fl[0], fl[1], fl[2]), pe = order(en[0], en[1], en[2]);
    if (pf < 1.7 || pf > 2.3 || pe < 1.7 || pe > 2.3) r.pass = false;
    d << "vortex: flux order " << fmt(pf) << ", energy order " << fmt(pe) << "; ";
    r.measured = pf;
  }
  // string triplet (c pinned across resolutions)
  {
    double fl[3], en[3];
    int k = 0;
    double c_pin = -1.0;
    for (std::size_t n : {1025u, 2049u, 4097u}) {
      auto grid = make_radial_grid(100.0, n, 2.0);
      auto conf = VortexConfiguration::make({{0.0, 0.0}}, {1}, 0.01);
      if (c_pin < 0.0)
        c_pin = find_c(*st.canon, grid, conf, kDefaultLadder.front());
      conf.c = c_pin;
      StringSolution ss = solve_string(st.canon, grid, conf);
      ReconstructedFields f = reconstruct(*st.canon, ss.v, ss.eta);
      fl[k] = flux(f);
      en[k] = energy(f, EnergyMetric::conformal);
      ++k;
    }
    double pf = order(fl[0], fl[1], fl[2]), pe = order(en[0], en[1], en[2]);
    if (pf < 1.7 || pf > 2.3 || pe < 1.7 || pe > 2.3) r.pass = false;
    d << "string: flux order " << fmt(pf) << ", energy order " << fmt(pe);
  }
  r.detail = d.str();
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts, std::ostream& log) {
  set_threads(opts.threads);
  std::vector<int> which = opts.criteria;
  if (which.empty()) which = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};

  SuiteState st;
  std::vector<CriterionResult> results;
  for (int id : which) {
    auto t0 = clock_type::now();
    CriterionResult r;
    try {
      switch (id) {
        case 1: r = crit_flux(st); break;
        case 2: r = crit_energy(st); break;
        case 3: r = crit_decay(st); break;
        case 4: r = crit_bracket(st); break;
        case 5: r = crit_curvature(st); break;
        case 6: r = crit_eta(st); break;
        case 7: r = crit_string_bracket(st); break;
        case 8: r = crit_stress(st); break;
        case 9: r = crit_oracle(st, opts); break;
        case 10: r = crit_gating(st); break;
        case 11: r = crit_negative(st, opts); break;
        case 12: r = crit_richardson(st); break;
        default:
          r.id = id;
          r.name = "unknown criterion";
          r.detail = "no such criterion id";
      }
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "criterion " + std::to_string(id);
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = seconds_since(t0);
    log << (r.pass ? "PASS" : "FAIL") << "  [" << std::setw(2) << r.id << "] " << r.name
        << "\n      " << r.detail << "  (" << std::setprecision(3) << r.seconds << " s)\n";
    results.push_back(std::move(r));
  }
  int failed = 0;
  for (const auto& r : results)
    if (!r.pass) ++failed;
  log << (failed == 0 ? "ALL CRITERIA PASSED" : std::to_string(failed) + " CRITERIA FAILED")
      << "\n";
  return results;
}

nlohmann::json acceptance_to_json(const std::vector<CriterionResult>& results) {
  nlohmann::json arr = nlohmann::json::array();
  bool all = true;
  for (const auto& r : results) {
    arr.push_back({{"id", r.id},
                   {"name", r.name},
                   {"pass", r.pass},
                   {"measured", r.measured},
                   {"bound", r.bound},
                   {"detail", r.detail}});
    all = all && r.pass;
  }
  return {{"criteria", arr}, {"all_pass", all}};
}

}  // namespace bih

#include "bih/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "bih/config.hpp"
#include "bih/errors.hpp"
#include "bih/io.hpp"
#include "bih/observables.hpp"
#include "bih/parallel.hpp"
#include "bih/strings.hpp"
#include "bih/verify.hpp"
#include "bih/vortex.hpp"

namespace bih {

namespace {

namespace fs = std::filesystem;

struct RunContext {
  RunConfig rc;
  fs::path out;
  bool quiet = false;
};

int setup(const std::string& config_path, const CliOverrides& ov, const char* fallback_dir,
          RunContext& ctx) {
  try {
    ctx.rc = parse_run_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  }
  ctx.quiet = ov.quiet;
  unsigned threads = ov.threads >= 0 ? static_cast<unsigned>(ov.threads) : ctx.rc.threads;
  set_threads(threads);
  std::string dir = !ov.out_dir.empty() ? ov.out_dir
                    : !ctx.rc.output_dir.empty() ? ctx.rc.output_dir
                                                 : std::string(fallback_dir);
  ctx.out = dir;
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec) {
    std::cerr << "config error: cannot create output directory " << ctx.out << "\n";
    return 3;
  }
  write_json_file((ctx.out / "config.json").string(), ctx.rc.raw);
  return 0;
}

void write_common_outputs(const RunContext& ctx, const Grid& grid,
                          const Observables& obs, nlohmann::json summary,
                          const std::vector<std::pair<std::string, const std::vector<double>*>>& cols,
                          const nlohmann::json& trace) {
  summary["observables"] = observables_to_json(obs);
  write_json_file((ctx.out / "summary.json").string(), summary);
  write_fields_csv((ctx.out / "fields.csv").string(), grid, cols);
  write_json_file((ctx.out / "trace.json").string(), trace);
  if (!ctx.quiet)
    std::cerr << "wrote " << (ctx.out / "summary.json").string() << "\n";
}

nlohmann::json run_metadata(const RunConfig& rc, const VortexConfiguration& conf) {
  return {
      {"model", rc.model.name.empty() ? "poly" : rc.model.name},
      {"grid", rc.grid.kind == GridKind::radial ? "radial" : "cartesian"},
      {"n", rc.grid.n},
      {"extent", rc.grid.extent},
      {"N", conf.total_multiplicity()},
      {"newton_g", conf.newton_g},
      {"seed", rc.seed},
  };
}

}  // namespace

int cmd_solve_vortex(const std::string& config_path, const CliOverrides& ov) {
  RunContext ctx;
  if (int rcode = setup(config_path, ov, "run-vortex", ctx)) return rcode;
  if (ctx.rc.newton_g != 0.0) {
    std::cerr << "config error: newton_g > 0 requires solve-string\n";
    return 3;
  }
  try {
    auto model = std::make_shared<const ModelSpec>(instantiate_model(ctx.rc.model));
    auto grid = instantiate_grid(ctx.rc.grid);
    auto conf = instantiate_configuration(ctx.rc);
    SolverOptions opts;
    opts.tol = ctx.rc.tol_update;
    opts.cg_tol = ctx.rc.tol_cg;
    opts.anti_vortex = ctx.rc.anti_vortex;

    VortexSolution sol = solve_vortex(model, grid, conf, opts);
    Observables obs = compute_observables(*model, grid, conf, sol.v, std::nullopt,
                                          ctx.rc.anti_vortex, ctx.rc.quadrature);

    ReconstructedFields fields = reconstruct(*model, sol.v, std::nullopt, ctx.rc.anti_vortex);
    nlohmann::json summary = run_metadata(ctx.rc, conf);
    summary["bracket"] = {{"sub_admissibility", sol.sub_admissibility},
                          {"super_admissibility", sol.super_admissibility},
                          {"lambda1", model->bounds().lambda1},
                          {"lambda2", model->bounds().lambda2}};
    summary["tail_start_radius"] = sol.tail_start_radius;
    nlohmann::json trace = {{"main", report_to_json(sol.report, true)},
                            {"lambda1", report_to_json(sol.report_lambda1, true)},
                            {"lambda2", report_to_json(sol.report_lambda2, true)}};
    write_common_outputs(ctx, *grid, obs, std::move(summary),
                         {{"u", &sol.u.values},
                          {"v", &sol.v.values},
                          {"phi_sq", &fields.phi_sq.values},
                          {"F12", &fields.F12.values},
                          {"energy_density", &fields.energy_density.values}},
                         trace);
    return 0;
  } catch (const ConstraintViolation& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 2;
  }
}

int cmd_solve_string(const std::string& config_path, const CliOverrides& ov) {
  RunContext ctx;
  if (int rcode = setup(config_path, ov, "run-string", ctx)) return rcode;
  try {
    auto model = std::make_shared<const ModelSpec>(instantiate_model(ctx.rc.model));
    auto grid = instantiate_grid(ctx.rc.grid);
    auto conf = instantiate_configuration(ctx.rc);
    StringOptions opts;
    opts.tol = ctx.rc.tol_update;
    opts.cg_tol = ctx.rc.tol_cg;
    opts.anti_vortex = ctx.rc.anti_vortex;
    if (!ctx.rc.delta_ladder.empty()) {
      opts.ladder = ctx.rc.delta_ladder;
      if (opts.ladder.back() != 0.0) opts.ladder.push_back(0.0);
    }

    StringSolution sol = solve_string(model, grid, conf, opts);
    for (const auto& w : sol.warnings) std::cerr << "warning: " << w << "\n";
    Observables obs = compute_observables(*model, grid, conf, sol.v, sol.eta,
                                          ctx.rc.anti_vortex, ctx.rc.quadrature);

    ReconstructedFields fields = reconstruct(*model, sol.v, sol.eta, ctx.rc.anti_vortex);
    // Gauss curvature of the conformal metric, finite off vortex nodes
    LinearOperator lap(grid);
    Field k_g = lap.apply(sol.eta);
    for (std::size_t i = 0; i < k_g.size(); ++i)
      k_g.values[i] = -0.5 * std::exp(-sol.eta.values[i]) * k_g.values[i];
    k_g.name = "K_g";

    nlohmann::json ladder = nlohmann::json::array();
    for (const auto& rung : sol.ladder)
      ladder.push_back({{"delta", rung.delta},
                        {"report", report_to_json(rung.report)},
                        {"jump_outer", rung.jump_outer}});
    nlohmann::json summary = run_metadata(ctx.rc, conf);
    summary["c"] = sol.c_used;
    summary["ladder"] = ladder;
    summary["tail_start_radius"] = sol.tail_start_radius;
    if (!sol.warnings.empty()) summary["warnings"] = sol.warnings;
    nlohmann::json trace = {{"final", report_to_json(sol.ladder.back().report, true)}};
    write_common_outputs(ctx, *grid, obs, std::move(summary),
                         {{"u", &sol.u.values},
                          {"v", &sol.v.values},
                          {"phi_sq", &fields.phi_sq.values},
                          {"F12", &fields.F12.values},
                          {"energy_density", &fields.energy_density.values},
                          {"eta", &sol.eta.values},
                          {"K_g", &k_g.values}},
                         trace);
    return 0;
  } catch (const HypothesisViolation& e) {
    std::cerr << "hypothesis violation: " << e.what() << "\n";
    return 4;
  } catch (const ConstraintViolation& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 2;
  }
}

int cmd_verify(const std::string& config_path, const CliOverrides& ov) {
  RunContext ctx;
  if (int rcode = setup(config_path, ov, "run-verify", ctx)) return rcode;
  AcceptanceOptions opts;
  opts.seed = ctx.rc.seed;
  opts.threads = ov.threads >= 0 ? static_cast<unsigned>(ov.threads) : ctx.rc.threads;
  if (ctx.rc.raw.contains("suite")) {
    const auto& js = ctx.rc.raw["suite"];
    if (js.contains("criteria")) opts.criteria = js["criteria"].get<std::vector<int>>();
    if (js.contains("cart_n")) opts.cart_n = js["cart_n"].get<std::size_t>();
    if (js.contains("cart_half_width")) opts.cart_half_width = js["cart_half_width"].get<double>();
  }
  auto results = run_acceptance(opts, std::cout);
  write_json_file((ctx.out / "verdict.json").string(), acceptance_to_json(results));
  for (const auto& r : results)
    if (!r.pass) return 1;
  return 0;
}

int cmd_dump_model(const std::string& config_path, const CliOverrides& ov) {
  RunContext ctx;
  if (int rcode = setup(config_path, ov, "run-dump", ctx)) return rcode;
  try {
    ModelSpec m = instantiate_model(ctx.rc.model);
    const auto& bd = m.bounds();
    std::cout << "model " << m.name() << "  b=" << format_double(m.b()) << "\n"
              << "lambda1=" << format_double(bd.lambda1)
              << " lambda2=" << format_double(bd.lambda2)
              << " M_decay=" << format_double(bd.M_decay) << "\n"
              << "m_U=" << format_double(bd.m_U) << " M_U=" << format_double(bd.M_U)
              << " m_G=" << format_double(bd.m_G) << " M_G=" << format_double(bd.M_G) << "\n"
              << "t,g,w,V,rhs,W\n";
    for (int k = 1; k <= 20; ++k) {
      double t = k / 20.0;
      std::cout << format_double(t) << "," << format_double(m.g_derived(t)) << ","
                << format_double(m.w_derived(t)) << "," << format_double(m.V_derived(t))
                << "," << format_double(m.rhs_vortex(t)) << ","
                << format_double(m.dilation(t)) << "\n";
    }
    return 0;
  } catch (const ConstraintViolation& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace bih

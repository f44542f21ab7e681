#include <CLI11.hpp>

#include "bih/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"bihsolve - self-dual vortices and cosmic strings of the "
               "generalized Born-Infeld-Higgs model"};
  app.require_subcommand(1);

  std::string config;
  bih::CliOverrides ov;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config, "run configuration (JSON)")->required();
    cmd->add_option("--out", ov.out_dir, "output directory (overrides config)");
    cmd->add_option("--threads", ov.threads, "worker threads (0 = all cores)");
    cmd->add_flag("--quiet", ov.quiet, "suppress progress output");
  };

  auto* sv = app.add_subcommand("solve-vortex", "solve the flat-space vortex equation");
  add_common(sv);
  auto* ss = app.add_subcommand("solve-string", "solve the gravitating string equation");
  add_common(ss);
  auto* vf = app.add_subcommand("verify", "run the acceptance criteria suite");
  add_common(vf);
  auto* dm = app.add_subcommand("dump-model", "print derived model functions and bounds");
  add_common(dm);

  CLI11_PARSE(app, argc, argv);

  if (sv->parsed()) return bih::cmd_solve_vortex(config, ov);
  if (ss->parsed()) return bih::cmd_solve_string(config, ov);
  if (vf->parsed()) return bih::cmd_verify(config, ov);
  if (dm->parsed()) return bih::cmd_dump_model(config, ov);
  return 1;
}

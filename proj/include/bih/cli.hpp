#ifndef BIH_CLI_HPP
#define BIH_CLI_HPP

#include <string>

namespace bih {

struct CliOverrides {
  std::string out_dir;   // --out
  int threads = -1;      // --threads, -1 = config value
  bool quiet = false;
};

// Exit codes: 0 success, 2 solver failure, 3 config error; solve-string adds
// 4 for a hypothesis violation; verify returns 1 when any criterion fails.
int cmd_solve_vortex(const std::string& config_path, const CliOverrides& ov = {});
int cmd_solve_string(const std::string& config_path, const CliOverrides& ov = {});
int cmd_verify(const std::string& config_path, const CliOverrides& ov = {});
int cmd_dump_model(const std::string& config_path, const CliOverrides& ov = {});

}  // namespace bih

#endif

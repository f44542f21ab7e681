#ifndef BIH_CONFIG_HPP
#define BIH_CONFIG_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bih/geometry.hpp"
#include "bih/grid.hpp"
#include "bih/model.hpp"

namespace bih {

struct ModelConfig {
  std::string name;                    // "canon", "abelian-limit", or "" for poly
  std::vector<double> u_coeffs, g_coeffs;
  double b = 1.0;
};

struct GridConfig {
  GridKind kind = GridKind::radial;
  double extent = 100.0;               // r_max or half-width L
  std::size_t n = 4097;
  double stretch = 2.0;                // radial only
};

/// One run = one config file. Parsed from JSON with schema validation; the
/// raw document is preserved for byte-exact round-tripping into the run
/// directory.
struct RunConfig {
  ModelConfig model;
  GridConfig grid;
  std::vector<std::array<double, 2>> points{{0.0, 0.0}};
  std::vector<int> multiplicities{1};
  double newton_g = 0.0;
  std::optional<double> c;             // nullopt = "auto"
  std::vector<double> delta_ladder;    // empty = default ladder
  double tol_update = 0.0;             // 0 = grid default
  double tol_cg = 1e-10;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  QuadratureRule quadrature = QuadratureRule::trapezoid;
  bool anti_vortex = false;
  std::string output_dir;
  nlohmann::json raw;
};

/// Parses and validates; throws ConfigError with a file:line diagnostic.
RunConfig parse_run_config(const std::string& path);
RunConfig parse_run_config_text(const std::string& text, const std::string& origin);

ModelSpec instantiate_model(const ModelConfig& mc);
std::shared_ptr<const Grid> instantiate_grid(const GridConfig& gc);
VortexConfiguration instantiate_configuration(const RunConfig& rc);

}  // namespace bih

#endif

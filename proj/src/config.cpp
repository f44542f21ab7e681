#include "bih/config.hpp"

#include <fstream>
#include <sstream>

#include "bih/errors.hpp"

namespace bih {

namespace {

using nlohmann::json;

std::size_t line_of_offset(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

std::size_t line_of_key(const std::string& text, const std::string& key) {
  auto pos = text.find("\"" + key + "\"");
  return pos == std::string::npos ? 1 : line_of_offset(text, pos);
}

[[noreturn]] void fail(const std::string& origin, const std::string& text,
                       const std::string& key, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line_of_key(text, key)) + ": " + msg);
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ":" + std::to_string(line_of_offset(text, e.byte)) +
                      ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(origin + ":1: config must be a JSON object");

  RunConfig rc;
  rc.raw = doc;

  static const std::vector<std::string> known = {
      "model", "grid", "vortices", "newton_g", "c", "delta_ladder", "tolerances",
      "seed", "threads", "quadrature", "anti_vortex", "output_dir", "suite"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      fail(origin, text, it.key(), "unknown key '" + it.key() + "'");

  // model
  if (!doc.contains("model")) fail(origin, text, "model", "missing 'model' section");
  const json& jm = doc["model"];
  if (jm.contains("name")) {
    rc.model.name = jm["name"].get<std::string>();
    if (rc.model.name != "canon" && rc.model.name != "abelian-limit")
      fail(origin, text, "name", "unknown builtin model '" + rc.model.name +
                                      "' (have: canon, abelian-limit)");
  } else {
    if (!jm.contains("U") || !jm.contains("G") || !jm.contains("b"))
      fail(origin, text, "model", "polynomial model needs 'U', 'G', 'b'");
    rc.model.u_coeffs = jm["U"].get<std::vector<double>>();
    rc.model.g_coeffs = jm["G"].get<std::vector<double>>();
    rc.model.b = jm["b"].get<double>();
    if (rc.model.b <= 0) fail(origin, text, "b", "b must be positive");
  }

  // grid
  if (!doc.contains("grid")) fail(origin, text, "grid", "missing 'grid' section");
  const json& jg = doc["grid"];
  std::string kind = jg.value("kind", "radial");
  if (kind == "radial") {
    rc.grid.kind = GridKind::radial;
    rc.grid.extent = jg.value("r_max", 100.0);
    rc.grid.n = jg.value("n", std::size_t{4097});
    rc.grid.stretch = jg.value("stretch", 2.0);
  } else if (kind == "cartesian") {
    rc.grid.kind = GridKind::cartesian;
    rc.grid.extent = jg.value("half_width", 100.0);
    rc.grid.n = jg.value("n", std::size_t{513});
  } else {
    fail(origin, text, "kind", "grid kind must be 'radial' or 'cartesian'");
  }
  if (rc.grid.extent <= 0) fail(origin, text, "grid", "grid extent must be positive");
  if (rc.grid.n < 8) fail(origin, text, "n", "grid needs at least 8 nodes per side");

  // vortices
  if (doc.contains("vortices")) {
    const json& jv = doc["vortices"];
    if (!jv.contains("points")) fail(origin, text, "vortices", "vortices need 'points'");
    rc.points.clear();
    for (const auto& p : jv["points"]) {
      if (!p.is_array() || p.size() != 2)
        fail(origin, text, "points", "each vortex point must be [x1, x2]");
      rc.points.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    if (jv.contains("multiplicities"))
      rc.multiplicities = jv["multiplicities"].get<std::vector<int>>();
    else
      rc.multiplicities.assign(rc.points.size(), 1);
    if (rc.multiplicities.size() != rc.points.size())
      fail(origin, text, "multiplicities", "one multiplicity per point required");
    for (int m : rc.multiplicities)
      if (m <= 0) fail(origin, text, "multiplicities", "multiplicities must be positive");
  }

  rc.newton_g = doc.value("newton_g", 0.0);
  if (rc.newton_g < 0) fail(origin, text, "newton_g", "newton_g must be >= 0");

  if (doc.contains("c")) {
    const json& jc = doc["c"];
    if (jc.is_string()) {
      if (jc.get<std::string>() != "auto")
        fail(origin, text, "c", "c must be a number or \"auto\"");
    } else {
      rc.c = jc.get<double>();
    }
  }

  if (doc.contains("delta_ladder")) {
    rc.delta_ladder = doc["delta_ladder"].get<std::vector<double>>();
    if (rc.delta_ladder.empty() || rc.delta_ladder.front() >= 0.5 ||
        rc.delta_ladder.front() <= 0.0)
      fail(origin, text, "delta_ladder", "ladder must start with 0 < delta < 1/2");
    for (std::size_t k = 1; k < rc.delta_ladder.size(); ++k)
      if (rc.delta_ladder[k] >= rc.delta_ladder[k - 1])
        fail(origin, text, "delta_ladder", "ladder must be strictly decreasing");
  }

  if (doc.contains("tolerances")) {
    rc.tol_update = doc["tolerances"].value("update", 0.0);
    rc.tol_cg = doc["tolerances"].value("cg", 1e-10);
  }
  rc.seed = doc.value("seed", std::uint64_t{1});
  rc.threads = doc.value("threads", 1u);
  std::string quad = doc.value("quadrature", "trapezoid");
  if (quad == "trapezoid") rc.quadrature = QuadratureRule::trapezoid;
  else if (quad == "simpson") rc.quadrature = QuadratureRule::simpson;
  else fail(origin, text, "quadrature", "quadrature must be 'trapezoid' or 'simpson'");
  rc.anti_vortex = doc.value("anti_vortex", false);
  rc.output_dir = doc.value("output_dir", std::string{});

  // geometric coupling between grid and vortices
  double max_r = 0.0;
  for (const auto& p : rc.points) max_r = std::max(max_r, std::hypot(p[0], p[1]));
  if (!(rc.grid.extent > 4.0 * max_r))
    fail(origin, text, "grid",
         "grid extent " + std::to_string(rc.grid.extent) +
             " must exceed 4x the largest vortex radius " + std::to_string(max_r));
  if (rc.grid.kind == GridKind::radial && max_r > 0.0)
    fail(origin, text, "points", "radial grids require all vortices at the origin");
  return rc;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config_text(ss.str(), path);
}

ModelSpec instantiate_model(const ModelConfig& mc) {
  if (mc.name == "canon") return make_canon();
  if (mc.name == "abelian-limit") return make_abelian_limit();
  return make_polynomial(mc.u_coeffs, mc.g_coeffs, mc.b);
}

std::shared_ptr<const Grid> instantiate_grid(const GridConfig& gc) {
  if (gc.kind == GridKind::radial) return make_radial_grid(gc.extent, gc.n, gc.stretch);
  return make_cartesian_grid(gc.extent, gc.n);
}

VortexConfiguration instantiate_configuration(const RunConfig& rc) {
  return VortexConfiguration::make(rc.points, rc.multiplicities, rc.newton_g, rc.c);
}

}  // namespace bih

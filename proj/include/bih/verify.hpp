#ifndef BIH_VERIFY_HPP
#define BIH_VERIFY_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace bih {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double bound = 0.0;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::vector<int> criteria;   // empty = all 12
  unsigned threads = 0;        // 0 = hardware concurrency
  std::uint64_t seed = 12345;  // perturbation controls
  // criterion 9 grid (cartesian side nodes / half width)
  std::size_t cart_n = 769;
  double cart_half_width = 50.0;
};

/// Runs the acceptance criteria, printing one PASS/FAIL line per criterion.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts, std::ostream& log);

nlohmann::json acceptance_to_json(const std::vector<CriterionResult>& results);

}  // namespace bih

#endif

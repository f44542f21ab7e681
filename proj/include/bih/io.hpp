#ifndef BIH_IO_HPP
#define BIH_IO_HPP

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bih/grid.hpp"
#include "bih/iterate.hpp"
#include "bih/observables.hpp"

namespace bih {

/// Shortest text that round-trips the double exactly (17 significant digits).
std::string format_double(double x);

/// CSV with columns (r, ...) or (x1, x2, ...) and a '# name=' header line.
void write_fields_csv(const std::string& path, const Grid& grid,
                      const std::vector<std::pair<std::string, const std::vector<double>*>>& columns);

/// Reads back a fields CSV (used by tests for round-trip checks).
std::vector<std::vector<double>> read_csv_columns(const std::string& path);

void write_json_file(const std::string& path, const nlohmann::json& j);

nlohmann::json decay_to_json(const DecayReport& d);
nlohmann::json observables_to_json(const Observables& o);
nlohmann::json report_to_json(const SolveReport& r, bool with_history = false);

}  // namespace bih

#endif

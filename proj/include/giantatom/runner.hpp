#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "giantatom/config.hpp"
#include "giantatom/csv.hpp"

namespace giantatom {

enum ExitCode : int { kExitOk = 0, kExitInvariant = 1, kExitConfig = 2 };

/// Runs one configured experiment, writing CSV to `config.output` (stdout when
/// empty; a directory for figure presets). Diagnostics go to `log`.
int run(const RunConfig& config, std::ostream& log);

CsvTable spectrum_table(const RunConfig& config, std::ostream& log);
CsvTable dynamics_table(const RunConfig& config, std::ostream& log);
CsvTable steady_table(const RunConfig& config, std::ostream& log);
CsvTable sweep_table(const RunConfig& config, std::ostream& log);
CsvTable validate_table(const RunConfig& config, std::ostream& log, bool* all_passed = nullptr);

std::vector<std::string> figure_presets();

/// Expands a preset into named sub-runs (file stem, config). Numerics, jobs and
/// the output directory are inherited from `base`.
std::vector<std::pair<std::string, RunConfig>> figure_plan(const std::string& preset, const RunConfig& base);

}  // namespace giantatom

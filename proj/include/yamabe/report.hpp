#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "yamabe/config.hpp"

namespace yamabe {

/// %.17g; nan and inf spelled out.
std::string format_number(double x);

/// Columns r, u, du, f, margin and, when given, exact and error.
std::string solution_csv(const RadialSolution& sol, const RadialProfile* exact = nullptr);

nlohmann::json solution_summary(const RadialSolution& sol, const RadialProfile* exact = nullptr);
nlohmann::json stage_json(const StageRecord& st);
nlohmann::json report_json(const ExhaustionReport& rep);

/// sup |u - exact| over the grid.
double sup_error(const RadialSolution& sol, const RadialProfile& exact);

/// Writes <dir>/summary.json, <dir>/report.json and <dir>/stage-<j>.csv per
/// the config's formats. Creates the directory.
void write_solve_outputs(const ExperimentConfig& config, const RadialSolution& sol);
void write_exhaustion_outputs(const ExperimentConfig& config, const ExhaustionReport& rep);

}  // namespace yamabe

#include "yamabe/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "yamabe/errors.hpp"

namespace yamabe {

using json = nlohmann::json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double sup_error(const RadialSolution& sol, const RadialProfile& exact) {
  double e = 0.0;
  for (std::size_t i = 0; i < sol.u.size(); ++i) {
    e = std::max(e, std::abs(sol.u[i] - exact(sol.grid.node(i))));
  }
  return e;
}

std::string solution_csv(const RadialSolution& sol, const RadialProfile* exact) {
  std::string out = exact != nullptr ? "r,u,du,f,margin,exact,error\n" : "r,u,du,f,margin\n";
  const auto du = sol.derivative();
  for (std::size_t i = 0; i < sol.u.size(); ++i) {
    const double r = sol.grid.node(i);
    const double f = i < sol.f_values.size() ? sol.f_values[i] : std::nan("");
    const double m = i < sol.margin.size() ? sol.margin[i] : std::nan("");
    out += format_number(r) + ',' + format_number(sol.u[i]) + ',' + format_number(du[i]) + ',' +
           format_number(f) + ',' + format_number(m);
    if (exact != nullptr) {
      const double e = (*exact)(r);
      out += ',' + format_number(e) + ',' + format_number(sol.u[i] - e);
    }
    out += '\n';
  }
  return out;
}

json solution_summary(const RadialSolution& sol, const RadialProfile* exact) {
  json j = {{"status", to_string(sol.status)},
            {"converged", sol.converged},
            {"iterations", sol.iterations},
            {"residual", sol.residual},
            {"effective_tolerance", sol.effective_tolerance},
            {"min_margin", sol.min_margin()},
            {"nodes", sol.grid.size()},
            {"r_min", sol.grid.r_min()},
            {"r_max", sol.grid.r_max()},
            {"message", sol.message}};
  if (exact != nullptr) j["sup_error"] = sup_error(sol, *exact);
  return j;
}

namespace {

json barrier_json(const BarrierReport& b) {
  return {{"applicable", b.applicable}, {"pass", b.pass},
          {"exempt", b.exempt},         {"bound", b.bound},
          {"extreme", b.extreme},       {"extreme_radius", b.extreme_radius},
          {"max_violation", b.max_violation}};
}

}  // namespace

json stage_json(const StageRecord& st) {
  const json b = barrier_json(st.barrier);
  return {{"index", st.index},
          {"R", st.R},
          {"psi_level", st.psi_level},
          {"converged", st.converged},
          {"status", st.status},
          {"iterations", st.iterations},
          {"residual", st.residual},
          {"inf_core", st.inf_core},
          {"min_u", st.min_u},
          {"max_u", st.max_u},
          {"cauchy_u", st.cauchy_u},
          {"cauchy_du", st.cauchy_du},
          {"f_min", st.f_min},
          {"f_max", st.f_max},
          {"margin", st.margin},
          {"f_level", st.f_level},
          {"min_uhat", st.min_uhat},
          {"cauchy_uhat", st.cauchy_uhat},
          {"cauchy_duhat", st.cauchy_duhat},
          {"scaled_identity_error", st.scaled_identity_error},
          {"barrier", b},
          {"monotone_checked", st.monotone_checked},
          {"monotone_ok", st.monotone_ok},
          {"monotone_violation", st.monotone_violation}};
}

json report_json(const ExhaustionReport& rep) {
  json stages = json::array();
  for (const auto& st : rep.stages) stages.push_back(stage_json(st));
  json limit = json::array();
  for (std::size_t m = 0; m < rep.limit_stages.size(); ++m) {
    auto s = solution_summary(rep.limit_stages[m]);
    s["psi_level"] = rep.limit_levels[m];
    s["index"] = rep.stages.size() + m + 1;
    if (m < rep.limit_barriers.size()) s["barrier"] = barrier_json(rep.limit_barriers[m]);
    limit.push_back(s);
  }
  return {{"kind", rep.kind},
          {"classification", to_string(rep.classification)},
          {"stages", stages},
          {"truncated", rep.truncated},
          {"message", rep.message},
          {"audits",
           {{"barrier_c", rep.barrier_c},
            {"sup_psi", rep.sup_psi},
            {"barrier_ok", rep.barrier_ok},
            {"uniqueness_regime", rep.uniqueness_regime},
            {"monotone_ok", rep.monotone_ok},
            {"upper_bound_ok", rep.upper_bound_ok},
            {"ordering_ok", rep.ordering_ok}}},
          {"completeness",
           {{"probes", rep.completeness.probes},
            {"lengths", rep.completeness.lengths},
            {"unbounded", rep.completeness.unbounded},
            {"last_increment_ratio", rep.completeness.last_increment_ratio}}},
          {"positive",
           {{"Lambda", rep.Lambda},
            {"epsilons", rep.epsilons},
            {"trend", to_string(rep.trend)},
            {"limit_stages", limit}}}};
}

namespace {

bool wants(const ExperimentConfig& c, const char* format) {
  return std::find(c.output.formats.begin(), c.output.formats.end(), format) !=
         c.output.formats.end();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  out << text;
}

std::filesystem::path prepare(const ExperimentConfig& c) {
  const std::filesystem::path dir = run_directory(c);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

void write_solve_outputs(const ExperimentConfig& config, const RadialSolution& sol) {
  const auto dir = prepare(config);
  std::optional<RadialProfile> exact;
  if (config.problem.exact) exact = config.problem.exact->build();
  const RadialProfile* ex = exact ? &*exact : nullptr;
  if (wants(config, "json")) {
    const json summary = solution_summary(sol, ex);
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    write_file(dir / "report.json",
               json{{"config", to_json(config)}, {"solution", summary}}.dump(2) + "\n");
  }
  if (wants(config, "csv")) write_file(dir / "stage-1.csv", solution_csv(sol, ex));
}

void write_exhaustion_outputs(const ExperimentConfig& config, const ExhaustionReport& rep) {
  const auto dir = prepare(config);
  if (wants(config, "json")) {
    json inf_trace = json::array();
    for (const auto& st : rep.stages) inf_trace.push_back(st.inf_core);
    const json summary = {{"kind", rep.kind},
                          {"classification", to_string(rep.classification)},
                          {"stages", rep.stages.size()},
                          {"inf_trace", inf_trace},
                          {"audits_ok", rep.audits_ok()},
                          {"truncated", rep.truncated}};
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    json full = report_json(rep);
    full["config"] = to_json(config);
    write_file(dir / "report.json", full.dump(2) + "\n");
  }
  if (wants(config, "csv")) {
    std::size_t j = 1;
    for (const auto& sol : rep.solutions) {
      write_file(dir / ("stage-" + std::to_string(j++) + ".csv"), solution_csv(sol));
    }
    for (const auto& sol : rep.limit_stages) {
      write_file(dir / ("stage-" + std::to_string(j++) + ".csv"), solution_csv(sol));
    }
  }
}

}  // namespace yamabe

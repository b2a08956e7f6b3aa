#pragma once

#include <json.hpp>

#include "wpt/cone.hpp"
#include "wpt/json_io.hpp"
#include "wpt/oracles.hpp"

namespace wpt {

// Every tolerance and schedule is explicit; defaults are resolved at load
// time and echoed into output headers.
struct ExperimentConfig {
  nlohmann::json spec;  // resolved config, embedded in all outputs
  double a = 0.1, b = 0.9;
  double tol = 1e-4;
  int budget = 1024;
  int samples = 32;
  unsigned long seed = 2024;
  EpsSchedule sched = default_eps_schedule();

  static ExperimentConfig from_json(nlohmann::json j);
  static ExperimentConfig from_file(const std::string& path);
};

// Geodesic specs: {"backend":"gaussian", "mean0":..,"cov0":..,"mean1":..,
// "cov1":..} or {"backend":"discrete", "mu":<measure>, "nu":<measure>} or
// {"backend":"generator", "name": "translation"|"monotone1d"|"random2d"|
// "sphere_atom", "n": k, "seed": s}.
MongeGeodesic build_geodesic(const nlohmann::json& jg);

struct ReportRow {
  int n;
  double width;
  double successive_diff;
  double defect;
  double wall_time;  // seconds; never written to CSV, never used in pass/fail
};

struct ConvergenceReport {
  std::vector<ReportRow> rows;
  double slope = 0, slope_residual = 0;
  bool exact = false;  // all successive diffs at numerical zero
  bool converged = false;
  bool assumption_flagged = false;
  nlohmann::json summary;
  std::string csv;
};

ConvergenceReport run_linear_convergence(const ExperimentConfig& cfg);
ConvergenceReport run_cone_convergence(const ExperimentConfig& cfg);

struct DcheckReport {
  std::string csv;
  nlohmann::json summary;
};
DcheckReport run_dcheck(const ExperimentConfig& cfg);
DcheckReport run_plan_distance_limit(const ExperimentConfig& cfg);

// Least-squares slope of log(y) against log(x); residual is the RMS misfit.
std::pair<double, double> loglog_slope(const std::vector<double>& x,
                                       const std::vector<double>& y);

}  // namespace wpt

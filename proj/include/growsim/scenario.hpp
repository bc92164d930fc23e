#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "growsim/fem_solver.hpp"

namespace growsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One scenario run: geometry, material, schedule and output settings.
// Defaults per scenario follow the reference parameter table.
struct ScenarioConfig {
  std::string scenario;           // free-block | constrained-block | clamped-stripe
  std::string material = "potential";  // potential | isotropic
  GrowthParams growth;
  IsoParams iso;
  std::array<int, 3> divisions{2, 2, 2};  // block scenarios
  int level = 2;                          // stripe scenario
  double dt = 1.0;                        // [s]
  int steps = 0;
  std::string out_dir;
  int vtk_every = 0;  // 0 = no snapshots
  std::string probe = "P1";

  bool operator==(const ScenarioConfig&) const = default;
};

// Defaults for a scenario id; throws ConfigError for unknown ids.
ScenarioConfig default_config(const std::string& scenario, const std::string& material);

// Strict JSON parsing (unknown keys rejected at every level) and the exact
// inverse used for the run metadata echo.
ScenarioConfig parse_config_json(const std::string& text);
std::string config_to_json(const ScenarioConfig& cfg);

// Output root override; relative out_dir values are resolved against
// the GROWSIM_OUT_ROOT environment variable when it is set.
std::string resolve_out_dir(const std::string& out_dir);

// One accepted step of the time series (the series.csv row).
struct StepRecord {
  int step = 0;
  double time = 0.0;
  double ux_p1 = 0.0, uy_p1 = 0.0, uz_p1 = 0.0;
  double szz_p1 = 0.0;
  double dlam = 0.0;  // growth multiplier increment, or theta for the iso law
  double phi = 0.0;
  double rx = 0.0, ry = 0.0, rz = 0.0;
  double diss = 0.0;
};

inline constexpr const char* kSeriesHeader =
    "step,time,ux_p1,uy_p1,uz_p1,szz_p1,dlam,phi,rx,ry,rz,diss";

using StepObserver = std::function<void(const StepRecord&, const QuasiStaticSolver&)>;

// Runs a scenario to completion: series.csv, optional VTK snapshots and the
// run_meta.json configuration echo under the resolved out_dir. Returns 0 on
// completion, 2 on a step failure (partial outputs are kept).
int run_scenario(const ScenarioConfig& cfg, std::vector<StepRecord>* series_out = nullptr,
                 const StepObserver& observer = {});

// Builds the solver for a config without running it (used by verification).
QuasiStaticSolver make_scenario_solver(const ScenarioConfig& cfg);

struct SweepResult {
  double value = 0.0;
  int status = 0;        // run_scenario exit status
  double final_uz = 0.0;  // last accepted uz at the probe
};

// One run per value with the overridden parameter; failures are recorded and
// the sweep continues. Writes <out_dir>/sweep_summary.csv.
std::vector<SweepResult> sweep(const ScenarioConfig& base, const std::string& param,
                               const std::vector<double>& values);

// Named parameter override (mu, lambda, kappa_g, m, sigma_g, eta, nu, iso
// parameters, dt, steps, level); throws ConfigError for unknown names.
void apply_override(ScenarioConfig& cfg, const std::string& param, double value);

}  // namespace growsim

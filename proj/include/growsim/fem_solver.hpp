#pragma once

#include <memory>
#include <string>
#include <vector>

#include "growsim/hex8.hpp"
#include "growsim/mesh.hpp"

namespace growsim {

// Piecewise-constant-hold time function given as (step index, value) pairs:
// the value at integer step k is that of the last pair with index <= k.
// Within a step (for bisected substeps) the prescribed value is interpolated
// linearly between the bracketing step values.
struct HoldRamp {
  std::vector<std::pair<int, double>> points;  // sorted by step index

  double at_step(int step) const;
  static HoldRamp constant(double v) { return HoldRamp{{{0, v}}}; }
};

struct BCEntry {
  std::string node_set;
  int dof = 0;  // 0 = x, 1 = y, 2 = z
  HoldRamp ramp;
};

struct BCSchedule {
  std::vector<BCEntry> entries;
};

struct SolveConfig {
  double dt = 1.0;           // [s]
  int steps = 1;
  double newton_rtol = 1e-8;   // relative to the first-iterate residual norm
  double newton_floor = 1e-12;  // absolute floor [N]
  int max_newton_iter = 25;
  int max_bisections = 10;

  void validate() const;
};

struct GaussPointStore {
  std::vector<std::array<GpGeometry, 8>> geometry;
  std::vector<std::array<PointState, 8>> states;
  // committed per-point diagnostics from the accepting evaluation
  std::vector<std::array<double, 8>> phi;
  std::vector<std::array<double, 8>> aux;   // delta lambda or theta
  std::vector<std::array<double, 8>> diss;
};

struct StepResult {
  int step = 0;
  double time = 0.0;
  int iterations = 0;  // largest Newton iteration count over the substeps
  int substeps = 1;
  std::vector<double> residual_history;  // Newton residual norms, last substep
};

struct StepFailure : std::runtime_error {
  StepFailure(const std::string& msg, int step, double time)
      : std::runtime_error(msg), step(step), time(time) {}
  int step = 0;
  double time = 0.0;
};

// Quasi-static total-Lagrangian solver with Dirichlet elimination; reactions
// are plain internal-force sums at constrained dofs. Time steps that fail to
// converge are bisected (with linearly interpolated boundary values) up to
// the configured depth; Gauss states commit only on accepted solves.
class QuasiStaticSolver {
 public:
  QuasiStaticSolver(Mesh mesh, BCSchedule schedule, Material material, SolveConfig config);

  StepResult advance_step();

  int current_step() const { return step_; }
  double current_time() const { return step_ * config_.dt; }
  const Mesh& mesh() const { return mesh_; }
  const Material& material() const { return material_; }
  const SolveConfig& config() const { return config_; }
  const GaussPointStore& store() const { return store_; }
  const std::vector<double>& displacement() const { return u_; }
  const std::vector<double>& internal_force() const { return f_int_; }
  bool dof_constrained(int dof) const { return constrained_[static_cast<std::size_t>(dof)]; }

  // per-direction sums of internal force over constrained dofs of a node set
  std::array<double, 3> reaction_sum(const std::string& node_set) const;

  struct GpRecord {
    Tensor2 f;          // deformation gradient
    SymVoigt6 cauchy;   // J^-1 F S F^T
    double phi = 0.0;
    double aux = 0.0;
    double diss = 0.0;
  };
  GpRecord gp_record(int element, int gp) const;

  // nearest Gauss point to a spatial location (reference coordinates)
  std::pair<int, int> nearest_gauss_point(const std::array<double, 3>& x) const;

 private:
  struct Constraint {
    int dof;
    double v_prev, v_next;  // step braket values
  };

  bool solve_substep(double frac0, double frac1, int depth, StepResult& result);
  bool newton(const std::vector<Constraint>& constraints, double frac, StepResult& result);
  void evaluate_all(double dt_sub);
  void build_step_constraints(std::vector<Constraint>& out) const;

  Mesh mesh_;
  BCSchedule schedule_;
  Material material_;
  SolveConfig config_;
  GaussPointStore store_;

  std::vector<bool> constrained_;
  std::vector<int> free_index_;  // dof -> compact free numbering, -1 if constrained
  int num_free_ = 0;

  int step_ = 0;
  std::vector<double> u_;       // committed displacements
  std::vector<double> f_int_;   // committed internal force

  // scratch for the current Newton solve
  std::vector<double> u_trial_;
  std::vector<double> f_trial_;
  double dt_frac_ = 0.0;  // time-step size of the active substep
  std::vector<ElementResult> scratch_;
  bool pattern_ready_ = false;
  struct Impl;
  std::shared_ptr<Impl> impl_;  // sparse solver workspace
};

}  // namespace growsim

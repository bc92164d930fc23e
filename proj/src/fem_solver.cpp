#include "growsim/fem_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace growsim {

double HoldRamp::at_step(int step) const {
  double v = 0.0;
  for (const auto& [idx, val] : points) {
    if (idx > step) break;
    v = val;
  }
  return v;
}

void SolveConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("SolveConfig: dt must be > 0");
  if (steps < 1) throw std::invalid_argument("SolveConfig: steps must be >= 1");
  if (!(newton_rtol > 0.0) || !(newton_floor > 0.0))
    throw std::invalid_argument("SolveConfig: tolerances must be > 0");
  if (max_newton_iter < 1 || max_bisections < 0)
    throw std::invalid_argument("SolveConfig: iteration limits invalid");
}

struct QuasiStaticSolver::Impl {
  Eigen::SparseMatrix<double> k;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  std::vector<Eigen::Triplet<double>> triplets;
};

QuasiStaticSolver::QuasiStaticSolver(Mesh mesh, BCSchedule schedule, Material material,
                                     SolveConfig config)
    : mesh_(std::move(mesh)),
      schedule_(std::move(schedule)),
      material_(std::move(material)),
      config_(config),
      impl_(std::make_shared<Impl>()) {
  config_.validate();
  const int ndof = mesh_.num_dofs();
  u_.assign(static_cast<std::size_t>(ndof), 0.0);
  f_int_.assign(static_cast<std::size_t>(ndof), 0.0);
  u_trial_ = u_;
  f_trial_ = f_int_;

  // reference geometry and virgin states
  const int nel = mesh_.num_elements();
  store_.geometry.resize(static_cast<std::size_t>(nel));
  store_.states.resize(static_cast<std::size_t>(nel));
  store_.phi.assign(static_cast<std::size_t>(nel), {});
  store_.aux.assign(static_cast<std::size_t>(nel), {});
  store_.diss.assign(static_cast<std::size_t>(nel), {});
  for (int e = 0; e < nel; ++e) {
    std::array<std::array<double, 3>, 8> coords;
    for (int a = 0; a < 8; ++a)
      coords[static_cast<std::size_t>(a)] =
          mesh_.nodes[static_cast<std::size_t>(mesh_.elements[static_cast<std::size_t>(e)][static_cast<std::size_t>(a)])];
    store_.geometry[static_cast<std::size_t>(e)] = element_reference_geometry(coords);
    for (int q = 0; q < 8; ++q)
      store_.states[static_cast<std::size_t>(e)][static_cast<std::size_t>(q)] =
          initial_point_state(material_);
    if (!material_.is_growth()) {
      for (int q = 0; q < 8; ++q) store_.aux[static_cast<std::size_t>(e)][static_cast<std::size_t>(q)] = 1.0;
    }
  }
  scratch_.resize(static_cast<std::size_t>(nel));

  // fixed constrained-dof set; values vary by step
  constrained_.assign(static_cast<std::size_t>(ndof), false);
  for (const auto& entry : schedule_.entries) {
    for (int n : mesh_.node_set(entry.node_set)) {
      constrained_[static_cast<std::size_t>(3 * n + entry.dof)] = true;
    }
  }
  free_index_.assign(static_cast<std::size_t>(ndof), -1);
  for (int d = 0; d < ndof; ++d) {
    if (!constrained_[static_cast<std::size_t>(d)]) free_index_[static_cast<std::size_t>(d)] = num_free_++;
  }
}

void QuasiStaticSolver::build_step_constraints(std::vector<Constraint>& out) const {
  out.clear();
  std::vector<double> value(static_cast<std::size_t>(mesh_.num_dofs()),
                            std::numeric_limits<double>::quiet_NaN());
  std::vector<double> value_prev(value);
  for (const auto& entry : schedule_.entries) {
    const double vp = entry.ramp.at_step(step_ - 1);
    const double vn = entry.ramp.at_step(step_);
    for (int n : mesh_.node_set(entry.node_set)) {
      const int dof = 3 * n + entry.dof;
      const double old_vn = value[static_cast<std::size_t>(dof)];
      if (!std::isnan(old_vn) && old_vn != vn) {
        std::ostringstream os;
        os << "BCSchedule: conflicting values for node " << n << " dof " << entry.dof
           << " at step " << step_ << " (" << old_vn << " vs " << vn << ")";
        throw std::invalid_argument(os.str());
      }
      value[static_cast<std::size_t>(dof)] = vn;
      value_prev[static_cast<std::size_t>(dof)] = vp;
    }
  }
  for (int d = 0; d < mesh_.num_dofs(); ++d) {
    if (!std::isnan(value[static_cast<std::size_t>(d)])) {
      out.push_back(Constraint{d, value_prev[static_cast<std::size_t>(d)], value[static_cast<std::size_t>(d)]});
    }
  }
}

void QuasiStaticSolver::evaluate_all(double dt_sub) {
  const int nel = mesh_.num_elements();
  std::string first_error;
  bool failed = false;
#pragma omp parallel for schedule(static)
  for (int e = 0; e < nel; ++e) {
    if (failed) continue;
    std::array<std::array<double, 3>, 8> ue;
    for (int a = 0; a < 8; ++a) {
      const int n = mesh_.elements[static_cast<std::size_t>(e)][static_cast<std::size_t>(a)];
      for (int i = 0; i < 3; ++i)
        ue[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] = u_trial_[static_cast<std::size_t>(3 * n + i)];
    }
    try {
      scratch_[static_cast<std::size_t>(e)] = element_force_stiffness(
          store_.geometry[static_cast<std::size_t>(e)], ue, store_.states[static_cast<std::size_t>(e)], material_, dt_sub);
    } catch (const std::exception& ex) {
#pragma omp critical
      {
        if (!failed) first_error = ex.what();
        failed = true;
      }
    }
  }
  if (failed) throw std::runtime_error(first_error);
}

bool QuasiStaticSolver::newton(const std::vector<Constraint>& constraints, double frac,
                               StepResult& result) {
  u_trial_ = u_;
  for (const auto& c : constraints) {
    u_trial_[static_cast<std::size_t>(c.dof)] = c.v_prev + frac * (c.v_next - c.v_prev);
  }

  double r0 = -1.0;
  result.residual_history.clear();
  for (int it = 1; it <= config_.max_newton_iter; ++it) {
    try {
      evaluate_all(dt_frac_);
    } catch (const std::exception&) {
      return false;
    }

    // assemble internal force
    std::fill(f_trial_.begin(), f_trial_.end(), 0.0);
    for (int e = 0; e < mesh_.num_elements(); ++e) {
      const auto& el = mesh_.elements[static_cast<std::size_t>(e)];
      const auto& fe = scratch_[static_cast<std::size_t>(e)].f_int;
      for (int a = 0; a < 8; ++a)
        for (int i = 0; i < 3; ++i)
          f_trial_[static_cast<std::size_t>(3 * el[static_cast<std::size_t>(a)] + i)] +=
              fe[static_cast<std::size_t>(3 * a + i)];
    }

    double rn2 = 0.0;
    for (int d = 0; d < mesh_.num_dofs(); ++d) {
      if (!constrained_[static_cast<std::size_t>(d)]) {
        rn2 += f_trial_[static_cast<std::size_t>(d)] * f_trial_[static_cast<std::size_t>(d)];
      }
    }
    const double rn = std::sqrt(rn2);
    result.residual_history.push_back(rn);
    if (it == 1) r0 = rn;
    if (rn <= std::max(config_.newton_floor, config_.newton_rtol * r0)) {
      // accept: commit states, displacements, force
      u_ = u_trial_;
      f_int_ = f_trial_;
      for (int e = 0; e < mesh_.num_elements(); ++e) {
        store_.states[static_cast<std::size_t>(e)] = scratch_[static_cast<std::size_t>(e)].new_states;
        store_.phi[static_cast<std::size_t>(e)] = scratch_[static_cast<std::size_t>(e)].gp_phi;
        store_.aux[static_cast<std::size_t>(e)] = scratch_[static_cast<std::size_t>(e)].gp_aux;
        store_.diss[static_cast<std::size_t>(e)] = scratch_[static_cast<std::size_t>(e)].gp_diss;
      }
      result.iterations = std::max(result.iterations, it);
      return true;
    }
    if (it == config_.max_newton_iter) return false;

    // assemble and solve the free-dof system
    auto& tr = impl_->triplets;
    tr.clear();
    for (int e = 0; e < mesh_.num_elements(); ++e) {
      const auto& el = mesh_.elements[static_cast<std::size_t>(e)];
      const auto& ke = scratch_[static_cast<std::size_t>(e)].k;
      for (int a = 0; a < 8; ++a)
        for (int i = 0; i < 3; ++i) {
          const int gr = free_index_[static_cast<std::size_t>(3 * el[static_cast<std::size_t>(a)] + i)];
          if (gr < 0) continue;
          for (int b = 0; b < 8; ++b)
            for (int j = 0; j < 3; ++j) {
              const int gc = free_index_[static_cast<std::size_t>(3 * el[static_cast<std::size_t>(b)] + j)];
              if (gc < 0) continue;
              tr.emplace_back(gr, gc, ke[static_cast<std::size_t>(24 * (3 * a + i) + (3 * b + j))]);
            }
        }
    }
    impl_->k.resize(num_free_, num_free_);
    impl_->k.setFromTriplets(tr.begin(), tr.end());
    if (!pattern_ready_) {
      impl_->lu.analyzePattern(impl_->k);
      pattern_ready_ = true;
    }
    impl_->lu.factorize(impl_->k);
    if (impl_->lu.info() != Eigen::Success) return false;

    Eigen::VectorXd rhs(num_free_);
    for (int d = 0; d < mesh_.num_dofs(); ++d) {
      const int g = free_index_[static_cast<std::size_t>(d)];
      if (g >= 0) rhs[g] = -f_trial_[static_cast<std::size_t>(d)];
    }
    const Eigen::VectorXd dx = impl_->lu.solve(rhs);
    if (impl_->lu.info() != Eigen::Success) return false;
    for (int d = 0; d < mesh_.num_dofs(); ++d) {
      const int g = free_index_[static_cast<std::size_t>(d)];
      if (g >= 0) u_trial_[static_cast<std::size_t>(d)] += dx[g];
    }
  }
  return false;
}

bool QuasiStaticSolver::solve_substep(double frac0, double frac1, int depth, StepResult& result) {
  dt_frac_ = config_.dt * (frac1 - frac0);
  std::vector<Constraint> constraints;
  build_step_constraints(constraints);
  if (newton(constraints, frac1, result)) {
    if (depth > 0) ++result.substeps;
    return true;
  }
  if (depth >= config_.max_bisections) return false;
  const double mid = 0.5 * (frac0 + frac1);
  return solve_substep(frac0, mid, depth + 1, result) &&
         solve_substep(mid, frac1, depth + 1, result);
}

StepResult QuasiStaticSolver::advance_step() {
  ++step_;
  StepResult result;
  result.step = step_;
  result.time = current_time();
  result.substeps = 0;

  // snapshots for rollback on failure
  const std::vector<double> u_saved = u_;
  const std::vector<double> f_saved = f_int_;
  const auto states_saved = store_.states;
  const auto phi_saved = store_.phi;
  const auto aux_saved = store_.aux;
  const auto diss_saved = store_.diss;

  if (!solve_substep(0.0, 1.0, 0, result)) {
    u_ = u_saved;
    f_int_ = f_saved;
    store_.states = states_saved;
    store_.phi = phi_saved;
    store_.aux = aux_saved;
    store_.diss = diss_saved;
    --step_;
    throw StepFailure("step failed after bisection limit", step_ + 1, (step_ + 1) * config_.dt);
  }
  if (result.substeps == 0) result.substeps = 1;
  return result;
}

std::array<double, 3> QuasiStaticSolver::reaction_sum(const std::string& node_set) const {
  std::array<double, 3> r{0.0, 0.0, 0.0};
  for (int n : mesh_.node_set(node_set)) {
    for (int i = 0; i < 3; ++i) {
      const int dof = 3 * n + i;
      if (constrained_[static_cast<std::size_t>(dof)]) {
        r[static_cast<std::size_t>(i)] += f_int_[static_cast<std::size_t>(dof)];
      }
    }
  }
  return r;
}

QuasiStaticSolver::GpRecord QuasiStaticSolver::gp_record(int element, int gp) const {
  GpRecord rec;
  const auto& geo = store_.geometry[static_cast<std::size_t>(element)][static_cast<std::size_t>(gp)];
  std::array<std::array<double, 3>, 8> ue;
  for (int a = 0; a < 8; ++a) {
    const int n = mesh_.elements[static_cast<std::size_t>(element)][static_cast<std::size_t>(a)];
    for (int i = 0; i < 3; ++i)
      ue[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] = u_[static_cast<std::size_t>(3 * n + i)];
  }
  rec.f = deformation_gradient(geo, ue);
  const Tensor2 c = transpose(rec.f) * rec.f;

  Tensor2 s;
  const auto& state = store_.states[static_cast<std::size_t>(element)][static_cast<std::size_t>(gp)];
  if (material_.is_growth()) {
    const auto& gs = std::get<GrowthState>(state);
    const Tensor2 ug_inv = voigt_unpack(gs.ug_inv);
    s = pk2_stress(c, invert(ug_inv * ug_inv), std::get<GrowthParams>(material_.law));
  } else {
    const auto& is = std::get<IsoState>(state);
    s = voigt_unpack(iso_pk2(c, is.theta, std::get<IsoParams>(material_.law)));
  }
  const double j = std::sqrt(det(c));
  const Tensor2 cauchy = (1.0 / j) * (rec.f * (s * transpose(rec.f)));
  rec.cauchy = SymVoigt6{{cauchy(0, 0), cauchy(1, 1), cauchy(2, 2),
                          0.5 * (cauchy(0, 1) + cauchy(1, 0)), 0.5 * (cauchy(0, 2) + cauchy(2, 0)),
                          0.5 * (cauchy(1, 2) + cauchy(2, 1))}};
  rec.phi = store_.phi[static_cast<std::size_t>(element)][static_cast<std::size_t>(gp)];
  rec.aux = store_.aux[static_cast<std::size_t>(element)][static_cast<std::size_t>(gp)];
  rec.diss = store_.diss[static_cast<std::size_t>(element)][static_cast<std::size_t>(gp)];
  return rec;
}

std::pair<int, int> QuasiStaticSolver::nearest_gauss_point(const std::array<double, 3>& x) const {
  int best_e = 0, best_q = 0;
  double best_d = 1e300;
  for (int e = 0; e < mesh_.num_elements(); ++e) {
    const auto& el = mesh_.elements[static_cast<std::size_t>(e)];
    int q = 0;
    for (const auto& xi : hex8_gauss_points()) {
      const ShapeHex8 sh = shape_hex8(xi);
      std::array<double, 3> gx{0.0, 0.0, 0.0};
      for (int a = 0; a < 8; ++a)
        for (int i = 0; i < 3; ++i)
          gx[static_cast<std::size_t>(i)] += sh.value[static_cast<std::size_t>(a)] *
                                             mesh_.nodes[static_cast<std::size_t>(el[static_cast<std::size_t>(a)])][static_cast<std::size_t>(i)];
      const double d = (gx[0] - x[0]) * (gx[0] - x[0]) + (gx[1] - x[1]) * (gx[1] - x[1]) +
                       (gx[2] - x[2]) * (gx[2] - x[2]);
      if (d < best_d) {
        best_d = d;
        best_e = e;
        best_q = q;
      }
      ++q;
    }
  }
  return {best_e, best_q};
}

}  // namespace growsim

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "growsim/fem_solver.hpp"
#include "growsim/mesh.hpp"
#include "growsim/vtk_writer.hpp"
#include "oracles.hpp"

using namespace growsim;

namespace {

const GrowthParams kRow1{40.0, 400.0, 150.0, 1.2, 70.0, 20.0, 1.0};
const GrowthParams kRow2{40.0, 400.0, 250.0, 1.2, 200.0, 100.0, 1.0};

Material growth_material(const GrowthParams& p) { return Material{p}; }

BCSchedule free_block_bcs() {
  return BCSchedule{{{"xmin", 0, HoldRamp::constant(0.0)},
                     {"ymin", 1, HoldRamp::constant(0.0)},
                     {"zmin", 2, HoldRamp::constant(0.0)}}};
}

// 0-D free-growth reference: S = 0 exactly means C tracks Cg
GrowthState free_material_trajectory(const GrowthParams& p, int steps, double dt) {
  GrowthState state = GrowthState::virgin();
  for (int k = 0; k < steps; ++k) {
    Tensor2 ui = voigt_unpack(state.ug_inv);
    Tensor2 c = invert(ui * ui);
    for (int pass = 0; pass < 50; ++pass) {
      const auto [next, rep] = local_solve(c, state, p, dt);
      const Tensor2 ui_new = voigt_unpack(next.ug_inv);
      const Tensor2 cg = invert(ui_new * ui_new);
      if (frobenius_norm(c - cg) < 1e-14) {
        state = next;
        break;
      }
      c = cg;
      if (pass == 49) state = next;
    }
  }
  return state;
}

}  // namespace

TEST_CASE("block mesh: counts, sets, Jacobians") {
  const Mesh m1 = build_block_mesh(1, 1, 1, 1.0, 1.0, 1.0);
  CHECK(m1.num_nodes() == 8);
  CHECK(m1.num_elements() == 1);
  const Mesh m2 = build_block_mesh(2, 2, 2, 1.0, 1.0, 1.0);
  CHECK(m2.num_nodes() == 27);
  CHECK(m2.num_elements() == 8);
  CHECK(min_reference_jacobian(m2) > 0.0);
  CHECK(m2.node_set("P1").size() == 1);
  CHECK(m2.node_set("P2").size() == 1);
  const auto& p2 = m2.nodes[static_cast<std::size_t>(m2.node_set("P2")[0])];
  CHECK(p2[2] == doctest::Approx(0.5));
  CHECK(m2.node_set("zmin").size() == 9);
}

TEST_CASE("stripe mesh: element counts and plane sets") {
  const int targets[5] = {360, 408, 450, 1000, 3000};
  for (int level = 0; level <= 4; ++level) {
    const Mesh m = build_stripe_mesh(level);
    CHECK(m.num_elements() == targets[level]);
    CHECK(min_reference_jacobian(m) > 0.0);
    for (int n : m.node_set("symy")) CHECK(m.nodes[static_cast<std::size_t>(n)][1] == 0.0);
    for (int n : m.node_set("symz")) CHECK(m.nodes[static_cast<std::size_t>(n)][2] == doctest::Approx(8.0));
    for (int n : m.node_set("clamp")) CHECK(m.nodes[static_cast<std::size_t>(n)][2] == 0.0);
  }
  // element-count window stated for the coarsest level
  CHECK(build_stripe_mesh(0).num_elements() >= 324);
  CHECK(build_stripe_mesh(0).num_elements() <= 396);
}

TEST_CASE("hex8 shape functions: Kronecker, center, analytic identities") {
  const ShapeHex8 at_node = shape_hex8({-1.0, -1.0, -1.0});
  CHECK(at_node.value[0] == doctest::Approx(1.0));
  for (int a = 1; a < 8; ++a) CHECK(at_node.value[static_cast<std::size_t>(a)] == doctest::Approx(0.0));

  const ShapeHex8 center = shape_hex8({0.0, 0.0, 0.0});
  for (int a = 0; a < 8; ++a) CHECK(center.value[static_cast<std::size_t>(a)] == doctest::Approx(0.125));

  oracles::Rng rng(41);
  for (int k = 0; k < 50; ++k) {
    const std::array<double, 3> xi{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const ShapeHex8 sh = shape_hex8(xi);
    double sum = 0.0;
    std::array<double, 3> gsum{};
    for (int a = 0; a < 8; ++a) {
      sum += sh.value[static_cast<std::size_t>(a)];
      for (int d = 0; d < 3; ++d) gsum[static_cast<std::size_t>(d)] += sh.grad[static_cast<std::size_t>(a)][static_cast<std::size_t>(d)];
    }
    CHECK(std::abs(sum - 1.0) < 1e-14);
    for (int d = 0; d < 3; ++d) CHECK(std::abs(gsum[static_cast<std::size_t>(d)]) < 1e-14);
  }
}

TEST_CASE("element kernel: rigid translation and homogeneous stretch") {
  const Mesh m = build_block_mesh(1, 1, 1, 1.0, 1.0, 1.0);
  std::array<std::array<double, 3>, 8> coords;
  for (int a = 0; a < 8; ++a) coords[static_cast<std::size_t>(a)] = m.nodes[static_cast<std::size_t>(m.elements[0][static_cast<std::size_t>(a)])];
  const auto geo = element_reference_geometry(coords);
  const Material mat = growth_material(kRow1);
  std::array<PointState, 8> virgin;
  for (auto& s : virgin) s = initial_point_state(mat);

  // rigid translation at frozen state: zero force, reference stiffness
  std::array<std::array<double, 3>, 8> u_trans;
  for (auto& u : u_trans) u = {0.3, -0.1, 0.2};
  const auto r_trans = element_force_stiffness(geo, u_trans, virgin, mat, 0.0);
  std::array<std::array<double, 3>, 8> u_zero{};
  const auto r_ref = element_force_stiffness(geo, u_zero, virgin, mat, 0.0);
  for (int i = 0; i < 24; ++i) CHECK(std::abs(r_trans.f_int[static_cast<std::size_t>(i)]) < 1e-12);
  for (int i = 0; i < 576; ++i)
    CHECK(r_trans.k[static_cast<std::size_t>(i)] ==
          doctest::Approx(r_ref.k[static_cast<std::size_t>(i)]).epsilon(1e-10).scale(1.0));

  // homogeneous F = diag(1.1, 1, 1): nodal forces match closed-form tractions
  std::array<std::array<double, 3>, 8> u_hom;
  for (int a = 0; a < 8; ++a) u_hom[static_cast<std::size_t>(a)] = {0.1 * coords[static_cast<std::size_t>(a)][0], 0.0, 0.0};
  const auto r_hom = element_force_stiffness(geo, u_hom, virgin, mat, 0.0);
  const Tensor2 c = Tensor2::diag(1.21, 1.0, 1.0);
  const Tensor2 s = pk2_stress(c, Tensor2::identity(), kRow1);
  const double p11 = 1.1 * s(0, 0);  // P = F S
  // x-face nodes carry P11/4 each; the force at node 1 (x = 1 face) is +P11/4
  double fx_face = 0.0;
  for (int a = 0; a < 8; ++a) {
    if (coords[static_cast<std::size_t>(a)][0] > 0.5) fx_face += r_hom.f_int[static_cast<std::size_t>(3 * a)];
  }
  CHECK(fx_face == doctest::Approx(p11).epsilon(1e-10));
  double f_total = 0.0;
  for (int a = 0; a < 8; ++a) f_total += r_hom.f_int[static_cast<std::size_t>(3 * a)];
  CHECK(std::abs(f_total) < 1e-10);
  // all 8 Gauss states identical under homogeneous data
  const auto resp0 = std::get<GrowthState>(r_hom.new_states[0]);
  for (int q = 1; q < 8; ++q) {
    const auto rq = std::get<GrowthState>(r_hom.new_states[static_cast<std::size_t>(q)]);
    for (int i = 0; i < 6; ++i)
      CHECK(std::abs(rq.ug_inv[i] - resp0.ug_inv[i]) < 1e-12);
  }
}

TEST_CASE("element stiffness matches finite differences of internal force") {
  const Mesh m = build_block_mesh(1, 1, 1, 1.0, 1.0, 1.0);
  std::array<std::array<double, 3>, 8> coords;
  for (int a = 0; a < 8; ++a) coords[static_cast<std::size_t>(a)] = m.nodes[static_cast<std::size_t>(m.elements[0][static_cast<std::size_t>(a)])];
  const auto geo = element_reference_geometry(coords);
  const Material mat = growth_material(kRow2);
  std::array<PointState, 8> virgin;
  for (auto& s : virgin) s = initial_point_state(mat);

  oracles::Rng rng(42);
  std::array<std::array<double, 3>, 8> u;
  for (auto& ua : u)
    ua = {0.02 * rng.uniform(-1, 1), 0.02 * rng.uniform(-1, 1), 0.02 * rng.uniform(-1, 1)};

  const auto r = element_force_stiffness(geo, u, virgin, mat, 1.0);
  double knorm = 0.0;
  for (double v : r.k) knorm = std::max(knorm, std::abs(v));
  const double h = 1e-6;
  for (int col = 0; col < 24; ++col) {
    auto up = u, um = u;
    up[static_cast<std::size_t>(col / 3)][static_cast<std::size_t>(col % 3)] += h;
    um[static_cast<std::size_t>(col / 3)][static_cast<std::size_t>(col % 3)] -= h;
    const auto rp = element_force_stiffness(geo, up, virgin, mat, 1.0);
    const auto rm = element_force_stiffness(geo, um, virgin, mat, 1.0);
    for (int row = 0; row < 24; ++row) {
      const double fd = (rp.f_int[static_cast<std::size_t>(row)] - rm.f_int[static_cast<std::size_t>(row)]) / (2.0 * h);
      CHECK(r.k[static_cast<std::size_t>(24 * row + col)] ==
            doctest::Approx(fd).epsilon(1e-6).scale(knorm));
    }
  }
}

TEST_CASE("HoldRamp: hold semantics") {
  HoldRamp rmp{{{1, 0.0}, {251, 0.3}, {451, -0.1}, {701, 0.0}}};
  CHECK(rmp.at_step(0) == 0.0);
  CHECK(rmp.at_step(1) == 0.0);
  CHECK(rmp.at_step(250) == 0.0);
  CHECK(rmp.at_step(251) == 0.3);
  CHECK(rmp.at_step(450) == 0.3);
  CHECK(rmp.at_step(451) == -0.1);
  CHECK(rmp.at_step(700) == -0.1);
  CHECK(rmp.at_step(701) == 0.0);
  CHECK(rmp.at_step(10000) == 0.0);
}

TEST_CASE("solver: zero growth under zero load converges immediately") {
  GrowthParams p = kRow1;
  p.eta = 1e30;
  QuasiStaticSolver solver(build_block_mesh(2, 2, 2, 1, 1, 1), free_block_bcs(),
                           growth_material(p), SolveConfig{1.0, 3});
  const StepResult r = solver.advance_step();
  CHECK(r.iterations == 1);
  for (double ui : solver.displacement()) CHECK(ui == 0.0);
}

TEST_CASE("solver: free block matches the 0-D growth trajectory") {
  const int steps = 10;
  QuasiStaticSolver solver(build_block_mesh(1, 1, 1, 1, 1, 1), free_block_bcs(),
                           growth_material(kRow1), SolveConfig{1.0, steps});
  StepResult first{};
  for (int k = 0; k < steps; ++k) {
    const StepResult r = solver.advance_step();
    if (k == 0) first = r;
    CHECK(r.iterations <= 6);
  }
  const GrowthState ref = free_material_trajectory(kRow1, steps, 1.0);
  const Tensor2 ui_ref = voigt_unpack(ref.ug_inv);
  const double lam_ref = 1.0 / ui_ref(0, 0);  // Cg spherical: stretch = 1/ug_inv
  const int p1 = solver.mesh().node_set("P1")[0];
  const double uz = solver.displacement()[static_cast<std::size_t>(3 * p1 + 2)];
  CHECK(uz == doctest::Approx(lam_ref - 1.0).epsilon(1e-6));

  // isotropy at the probe corner
  const double ux = solver.displacement()[static_cast<std::size_t>(3 * p1)];
  const double uy = solver.displacement()[static_cast<std::size_t>(3 * p1 + 1)];
  CHECK(std::abs(ux - uy) < 1e-8);
  CHECK(std::abs(uy - uz) < 1e-8);

  // reactions on the support planes vanish
  const auto rx = solver.reaction_sum("xmin");
  CHECK(std::abs(rx[0]) < 1e-8);
}

TEST_CASE("solver: constrained single element matches the homogeneous oracle") {
  BCSchedule bcs = free_block_bcs();
  bcs.entries.push_back({"zmax", 2, HoldRamp::constant(0.0)});
  QuasiStaticSolver solver(build_block_mesh(1, 1, 1, 1, 1, 1), bcs, growth_material(kRow2),
                           SolveConfig{1.0, 5});
  for (int k = 0; k < 5; ++k) {
    const StepResult r = solver.advance_step();
    CHECK(r.iterations <= 6);
  }
  // reaction on the held face equals S_zz * reference area (P = F S, F_zz = 1)
  const auto rec = solver.gp_record(0, 0);
  const Tensor2 c = transpose(rec.f) * rec.f;
  const auto& state = std::get<GrowthState>(solver.store().states[0][0]);
  const Tensor2 ug_inv = voigt_unpack(state.ug_inv);
  const Tensor2 s = pk2_stress(c, invert(ug_inv * ug_inv), kRow2);
  const auto r_top = solver.reaction_sum("zmax");
  CHECK(r_top[2] == doctest::Approx(s(2, 2)).epsilon(1e-6));

  // superlinear tail: once the residual has dropped three decades, the next
  // correction must contract much faster than a fixed-rate iteration
  QuasiStaticSolver s2(build_block_mesh(1, 1, 1, 1, 1, 1), bcs, growth_material(kRow2),
                       SolveConfig{1.0, 1});
  const StepResult r1 = s2.advance_step();
  bool tail_checked = false;
  for (std::size_t i = 1; i + 1 < r1.residual_history.size(); ++i) {
    if (r1.residual_history[i] < 1e-3 * r1.residual_history[0]) {
      CHECK(r1.residual_history[i + 1] < 0.05 * r1.residual_history[i]);
      tail_checked = true;
      break;
    }
  }
  CHECK(tail_checked);
}

TEST_CASE("solver: rejected step leaves states and displacements untouched") {
  // a hopeless instantaneous stretch with no bisection budget
  BCSchedule bcs = free_block_bcs();
  bcs.entries.push_back({"zmax", 2, HoldRamp{{{1, 40.0}}}});
  SolveConfig cfg{1.0, 1};
  cfg.max_newton_iter = 4;
  cfg.max_bisections = 0;
  QuasiStaticSolver solver(build_block_mesh(2, 2, 2, 1, 1, 1), bcs, growth_material(kRow1), cfg);
  const auto u_before = solver.displacement();
  const auto states_before = solver.store().states;
  CHECK_THROWS_AS(solver.advance_step(), StepFailure);
  CHECK(solver.current_step() == 0);
  const auto& u_after = solver.displacement();
  for (std::size_t i = 0; i < u_before.size(); ++i) CHECK(u_before[i] == u_after[i]);
  for (std::size_t e = 0; e < states_before.size(); ++e)
    for (int q = 0; q < 8; ++q) {
      const auto& a = std::get<GrowthState>(states_before[e][static_cast<std::size_t>(q)]);
      const auto& b = std::get<GrowthState>(solver.store().states[e][static_cast<std::size_t>(q)]);
      for (int i = 0; i < 6; ++i) CHECK(a.ug_inv[i] == b.ug_inv[i]);
      CHECK(a.lambda_acc == b.lambda_acc);
    }
}

TEST_CASE("solver: bisection rescues a harsh but feasible step") {
  BCSchedule bcs = free_block_bcs();
  bcs.entries.push_back({"zmax", 2, HoldRamp{{{1, 0.9}}}});
  SolveConfig cfg{1.0, 1};
  cfg.max_newton_iter = 5;  // too few for the full jump in one go
  QuasiStaticSolver solver(build_block_mesh(1, 1, 1, 1, 1, 1), bcs, growth_material(kRow1), cfg);
  const StepResult r = solver.advance_step();
  CHECK(r.substeps >= 1);
  const int p1 = solver.mesh().node_set("P1")[0];
  CHECK(solver.displacement()[static_cast<std::size_t>(3 * p1 + 2)] == doctest::Approx(0.9));
}

TEST_CASE("solver: conflicting Dirichlet data is rejected") {
  BCSchedule bcs = free_block_bcs();
  bcs.entries.push_back({"zmin", 2, HoldRamp::constant(0.5)});  // clashes with zmin@0
  QuasiStaticSolver solver(build_block_mesh(1, 1, 1, 1, 1, 1), bcs, growth_material(kRow1),
                           SolveConfig{1.0, 1});
  CHECK_THROWS_AS(solver.advance_step(), std::invalid_argument);
}

TEST_CASE("vtk writer: structure of the emitted snapshot") {
  const Mesh m = build_block_mesh(1, 1, 1, 1, 1, 1);
  std::vector<double> u(static_cast<std::size_t>(m.num_dofs()), 0.0);
  u[2] = -0.25;
  const auto path = std::filesystem::temp_directory_path() / "growsim_vtk_test.vtk";
  write_vtk(path.string(), m, u, {{"sigma_zz", std::vector<double>{1.5}}});
  std::ifstream is(path);
  std::string line;
  std::getline(is, line);
  CHECK(line == "# vtk DataFile Version 3.0");
  std::getline(is, line);
  std::getline(is, line);
  CHECK(line == "ASCII");
  std::getline(is, line);
  CHECK(line == "DATASET UNSTRUCTURED_GRID");
  std::getline(is, line);
  CHECK(line == "POINTS 8 double");
  std::filesystem::remove(path);
}

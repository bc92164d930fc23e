#include "growsim/scenario.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "growsim/vtk_writer.hpp"

namespace growsim {

namespace {

using nlohmann::json;

constexpr const char* kScenarios[3] = {"free-block", "constrained-block", "clamped-stripe"};

void check_known_keys(const json& obj, std::initializer_list<const char*> allowed,
                      const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

GrowthParams table_growth(const std::string& scenario) {
  if (scenario == "free-block") return GrowthParams{40.0, 400.0, 150.0, 1.2, 70.0, 20.0, 1.0};
  if (scenario == "constrained-block")
    return GrowthParams{40.0, 400.0, 250.0, 1.2, 200.0, 100.0, 1.0};
  return GrowthParams{100.0, 800.0, 150.0, 2.0, 250.0, 100.0, 1.0};
}

IsoParams table_iso() {
  // stripe comparison set: row-3 elastic constants, iso law constants
  return IsoParams{100.0, 800.0, 80.0, 0.1, 0.1, 2.0, 0.25, 2.0, 3.0};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json growth_to_json(const GrowthParams& p) {
  return json{{"mu", p.mu},     {"lambda", p.lambda},   {"kappa_g", p.kappa_g}, {"m", p.m},
              {"sigma_g", p.sigma_g}, {"eta", p.eta},   {"nu", p.nu}};
}

json iso_to_json(const IsoParams& p) {
  return json{{"mu", p.mu},
              {"lambda", p.lambda},
              {"m_crit", p.m_crit},
              {"k_plus", p.k_plus},
              {"k_minus", p.k_minus},
              {"theta_plus", p.theta_plus},
              {"theta_minus", p.theta_minus},
              {"gamma_plus", p.gamma_plus},
              {"gamma_minus", p.gamma_minus}};
}

void growth_from_json(const json& j, GrowthParams& p) {
  check_known_keys(j, {"mu", "lambda", "kappa_g", "m", "sigma_g", "eta", "nu"}, "params");
  p.mu = j.value("mu", p.mu);
  p.lambda = j.value("lambda", p.lambda);
  p.kappa_g = j.value("kappa_g", p.kappa_g);
  p.m = j.value("m", p.m);
  p.sigma_g = j.value("sigma_g", p.sigma_g);
  p.eta = j.value("eta", p.eta);
  p.nu = j.value("nu", p.nu);
}

void iso_from_json(const json& j, IsoParams& p) {
  check_known_keys(j,
                   {"mu", "lambda", "m_crit", "k_plus", "k_minus", "theta_plus", "theta_minus",
                    "gamma_plus", "gamma_minus"},
                   "params");
  p.mu = j.value("mu", p.mu);
  p.lambda = j.value("lambda", p.lambda);
  p.m_crit = j.value("m_crit", p.m_crit);
  p.k_plus = j.value("k_plus", p.k_plus);
  p.k_minus = j.value("k_minus", p.k_minus);
  p.theta_plus = j.value("theta_plus", p.theta_plus);
  p.theta_minus = j.value("theta_minus", p.theta_minus);
  p.gamma_plus = j.value("gamma_plus", p.gamma_plus);
  p.gamma_minus = j.value("gamma_minus", p.gamma_minus);
}

}  // namespace

ScenarioConfig default_config(const std::string& scenario, const std::string& material) {
  bool known = false;
  for (const char* s : kScenarios) known = known || scenario == s;
  if (!known) throw ConfigError("unknown scenario '" + scenario + "'");
  if (material != "potential" && material != "isotropic")
    throw ConfigError("unknown material '" + material + "'");
  if (material == "isotropic" && scenario != "clamped-stripe")
    throw ConfigError("the isotropic comparison law is defined for the clamped-stripe scenario");

  ScenarioConfig cfg;
  cfg.scenario = scenario;
  cfg.material = material;
  cfg.growth = table_growth(scenario);
  cfg.iso = table_iso();
  cfg.dt = 1.0;
  if (scenario == "free-block") {
    cfg.steps = 500;
    cfg.out_dir = "out/free-block";
  } else if (scenario == "constrained-block") {
    cfg.steps = 1000;
    cfg.out_dir = "out/constrained-block";
  } else {
    cfg.steps = 250;
    cfg.out_dir = "out/clamped-stripe";
  }
  return cfg;
}

ScenarioConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  check_known_keys(
      j, {"scenario", "material", "params", "mesh", "dt", "steps", "out_dir", "vtk_every", "probe"},
      "config");
  if (!j.contains("scenario")) throw ConfigError("missing required key 'scenario'");

  const std::string scenario = j["scenario"].get<std::string>();
  const std::string material = j.value("material", std::string("potential"));
  ScenarioConfig cfg = default_config(scenario, material);

  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigError("'params' must be an object");
    if (material == "potential")
      growth_from_json(j["params"], cfg.growth);
    else
      iso_from_json(j["params"], cfg.iso);
  }
  if (j.contains("mesh")) {
    const json& m = j["mesh"];
    if (!m.is_object()) throw ConfigError("'mesh' must be an object");
    if (scenario == "clamped-stripe") {
      check_known_keys(m, {"level"}, "mesh");
      cfg.level = m.value("level", cfg.level);
      if (cfg.level < 0 || cfg.level > 4) throw ConfigError("mesh level must be in 0..4");
    } else {
      check_known_keys(m, {"divisions"}, "mesh");
      if (m.contains("divisions")) {
        const auto d = m["divisions"].get<std::vector<int>>();
        if (d.size() != 3) throw ConfigError("mesh divisions must have three entries");
        cfg.divisions = {d[0], d[1], d[2]};
      }
    }
  }
  cfg.dt = j.value("dt", cfg.dt);
  cfg.steps = j.value("steps", cfg.steps);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.vtk_every = j.value("vtk_every", cfg.vtk_every);
  cfg.probe = j.value("probe", cfg.probe);

  if (!(cfg.dt > 0.0)) throw ConfigError("dt must be > 0");
  if (cfg.steps < 1) throw ConfigError("steps must be >= 1");
  if (cfg.vtk_every < 0) throw ConfigError("vtk_every must be >= 0");
  try {
    if (material == "potential")
      cfg.growth.validate();
    else
      cfg.iso.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

std::string config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["scenario"] = cfg.scenario;
  j["material"] = cfg.material;
  j["params"] = cfg.material == "potential" ? growth_to_json(cfg.growth) : iso_to_json(cfg.iso);
  if (cfg.scenario == "clamped-stripe") {
    j["mesh"] = json{{"level", cfg.level}};
  } else {
    j["mesh"] = json{{"divisions", {cfg.divisions[0], cfg.divisions[1], cfg.divisions[2]}}};
  }
  j["dt"] = cfg.dt;
  j["steps"] = cfg.steps;
  j["out_dir"] = cfg.out_dir;
  j["vtk_every"] = cfg.vtk_every;
  j["probe"] = cfg.probe;
  return j.dump(2) + "\n";
}

std::string resolve_out_dir(const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::path p(out_dir);
  if (p.is_absolute()) return out_dir;
  if (const char* root = std::getenv("GROWSIM_OUT_ROOT")) {
    return (fs::path(root) / p).string();
  }
  return out_dir;
}

QuasiStaticSolver make_scenario_solver(const ScenarioConfig& cfg) {
  Mesh mesh;
  BCSchedule bcs;
  if (cfg.scenario == "clamped-stripe") {
    mesh = build_stripe_mesh(cfg.level);
    bcs.entries = {{"clamp", 0, HoldRamp::constant(0.0)},
                   {"clamp", 1, HoldRamp::constant(0.0)},
                   {"clamp", 2, HoldRamp::constant(0.0)},
                   {"symy", 1, HoldRamp::constant(0.0)},
                   {"symz", 2, HoldRamp::constant(0.0)},
                   {"xfix", 0, HoldRamp::constant(0.0)}};
  } else {
    mesh = build_block_mesh(cfg.divisions[0], cfg.divisions[1], cfg.divisions[2], 1.0, 1.0, 1.0);
    bcs.entries = {{"xmin", 0, HoldRamp::constant(0.0)},
                   {"ymin", 1, HoldRamp::constant(0.0)},
                   {"zmin", 2, HoldRamp::constant(0.0)}};
    if (cfg.scenario == "constrained-block") {
      bcs.entries.push_back({"zmax", 2, HoldRamp{{{1, 0.0}, {251, 0.3}, {451, -0.1}, {701, 0.0}}}});
    }
  }
  Material mat;
  if (cfg.material == "potential")
    mat.law = cfg.growth;
  else
    mat.law = cfg.iso;
  SolveConfig solve;
  solve.dt = cfg.dt;
  solve.steps = cfg.steps;
  return QuasiStaticSolver(std::move(mesh), std::move(bcs), mat, solve);
}

namespace {

struct ProbeContext {
  int node = 0;
  int elem = 0;
  int gp = 0;
};

ProbeContext locate_probe(const QuasiStaticSolver& solver, const std::string& probe_set) {
  ProbeContext ctx;
  ctx.node = solver.mesh().node_set(probe_set).at(0);
  const auto& x = solver.mesh().nodes[static_cast<std::size_t>(ctx.node)];
  const auto [e, q] = solver.nearest_gauss_point(x);
  ctx.elem = e;
  ctx.gp = q;
  return ctx;
}

StepRecord make_record(const QuasiStaticSolver& solver, const ProbeContext& probe,
                       const StepResult& step, const std::string& scenario) {
  StepRecord rec;
  rec.step = step.step;
  rec.time = step.time;
  const auto& u = solver.displacement();
  rec.ux_p1 = u[static_cast<std::size_t>(3 * probe.node)];
  rec.uy_p1 = u[static_cast<std::size_t>(3 * probe.node + 1)];
  rec.uz_p1 = u[static_cast<std::size_t>(3 * probe.node + 2)];
  const auto gp = solver.gp_record(probe.elem, probe.gp);
  rec.szz_p1 = gp.cauchy[2];
  rec.dlam = gp.aux;
  rec.phi = gp.phi;
  rec.diss = gp.diss;
  if (scenario == "clamped-stripe") {
    const auto r = solver.reaction_sum("clamp");
    rec.rx = r[0];
    rec.ry = r[1];
    rec.rz = r[2];
  } else {
    rec.rx = solver.reaction_sum("xmin")[0];
    rec.ry = solver.reaction_sum("ymin")[1];
    rec.rz = scenario == "constrained-block" ? solver.reaction_sum("zmax")[2]
                                             : solver.reaction_sum("zmin")[2];
  }
  return rec;
}

void write_record(std::ofstream& os, const StepRecord& r) {
  os << r.step << ',' << fmt(r.time) << ',' << fmt(r.ux_p1) << ',' << fmt(r.uy_p1) << ','
     << fmt(r.uz_p1) << ',' << fmt(r.szz_p1) << ',' << fmt(r.dlam) << ',' << fmt(r.phi) << ','
     << fmt(r.rx) << ',' << fmt(r.ry) << ',' << fmt(r.rz) << ',' << fmt(r.diss) << '\n';
}

void write_snapshot(const std::string& dir, const QuasiStaticSolver& solver, int step) {
  const Mesh& mesh = solver.mesh();
  std::map<std::string, std::vector<double>> cells;
  static const char* names[6] = {"cauchy_xx", "cauchy_yy", "cauchy_zz",
                                 "cauchy_xy", "cauchy_xz", "cauchy_yz"};
  for (const char* n : names) cells[n].resize(static_cast<std::size_t>(mesh.num_elements()));
  const char* aux_name = solver.material().is_growth() ? "dlam" : "theta";
  cells["phi"].resize(static_cast<std::size_t>(mesh.num_elements()));
  cells[aux_name].resize(static_cast<std::size_t>(mesh.num_elements()));
  for (int e = 0; e < mesh.num_elements(); ++e) {
    SymVoigt6 avg{};
    double phi = 0.0, aux = 0.0;
    for (int q = 0; q < 8; ++q) {
      const auto rec = solver.gp_record(e, q);
      for (int i = 0; i < 6; ++i) avg[i] += rec.cauchy[i] / 8.0;
      phi += rec.phi / 8.0;
      aux += rec.aux / 8.0;
    }
    for (int i = 0; i < 6; ++i) cells[names[i]][static_cast<std::size_t>(e)] = avg[i];
    cells["phi"][static_cast<std::size_t>(e)] = phi;
    cells[aux_name][static_cast<std::size_t>(e)] = aux;
  }
  char name[64];
  std::snprintf(name, sizeof(name), "snap_%06d.vtk", step);
  write_vtk((std::filesystem::path(dir) / name).string(), mesh, solver.displacement(), cells);
}

}  // namespace

int run_scenario(const ScenarioConfig& cfg, std::vector<StepRecord>* series_out,
                 const StepObserver& observer) {
  namespace fs = std::filesystem;
  const std::string out = resolve_out_dir(cfg.out_dir);
  fs::create_directories(out);
  {
    std::ofstream meta(fs::path(out) / "run_meta.json");
    meta << config_to_json(cfg);
  }

  QuasiStaticSolver solver = make_scenario_solver(cfg);
  const ProbeContext probe = locate_probe(solver, cfg.probe);
  std::optional<ProbeContext> probe2;
  if (solver.mesh().node_sets.count("P2") && cfg.probe != "P2") {
    probe2 = locate_probe(solver, "P2");
  }

  std::ofstream series(fs::path(out) / "series.csv");
  series << kSeriesHeader << '\n';
  std::ofstream series2;
  if (probe2) {
    series2.open(fs::path(out) / "probe_p2.csv");
    series2 << kSeriesHeader << '\n';
  }

  for (int k = 0; k < cfg.steps; ++k) {
    StepResult step;
    try {
      step = solver.advance_step();
    } catch (const StepFailure&) {
      series.flush();
      return 2;
    }
    const StepRecord rec = make_record(solver, probe, step, cfg.scenario);
    write_record(series, rec);
    if (probe2) write_record(series2, make_record(solver, *probe2, step, cfg.scenario));
    if (series_out) series_out->push_back(rec);
    if (observer) observer(rec, solver);
    if (cfg.vtk_every > 0 && (step.step % cfg.vtk_every == 0 || step.step == cfg.steps)) {
      write_snapshot(out, solver, step.step);
    }
  }
  return 0;
}

void apply_override(ScenarioConfig& cfg, const std::string& param, double value) {
  const auto set_growth = [&](double GrowthParams::* field) {
    if (cfg.material != "potential") throw ConfigError("parameter '" + param + "' needs the potential material");
    cfg.growth.*field = value;
  };
  const auto set_iso = [&](double IsoParams::* field) {
    if (cfg.material != "isotropic") throw ConfigError("parameter '" + param + "' needs the isotropic material");
    cfg.iso.*field = value;
  };
  if (param == "mu") {
    (cfg.material == "potential" ? cfg.growth.mu : cfg.iso.mu) = value;
  } else if (param == "lambda") {
    (cfg.material == "potential" ? cfg.growth.lambda : cfg.iso.lambda) = value;
  } else if (param == "kappa_g") {
    set_growth(&GrowthParams::kappa_g);
  } else if (param == "m") {
    set_growth(&GrowthParams::m);
  } else if (param == "sigma_g") {
    set_growth(&GrowthParams::sigma_g);
  } else if (param == "eta") {
    set_growth(&GrowthParams::eta);
  } else if (param == "nu") {
    set_growth(&GrowthParams::nu);
  } else if (param == "m_crit") {
    set_iso(&IsoParams::m_crit);
  } else if (param == "k_plus") {
    set_iso(&IsoParams::k_plus);
  } else if (param == "k_minus") {
    set_iso(&IsoParams::k_minus);
  } else if (param == "theta_plus") {
    set_iso(&IsoParams::theta_plus);
  } else if (param == "theta_minus") {
    set_iso(&IsoParams::theta_minus);
  } else if (param == "gamma_plus") {
    set_iso(&IsoParams::gamma_plus);
  } else if (param == "gamma_minus") {
    set_iso(&IsoParams::gamma_minus);
  } else if (param == "dt") {
    cfg.dt = value;
  } else if (param == "steps") {
    cfg.steps = static_cast<int>(value);
  } else if (param == "level") {
    cfg.level = static_cast<int>(value);
  } else {
    throw ConfigError("unknown sweep parameter '" + param + "'");
  }
}

std::vector<SweepResult> sweep(const ScenarioConfig& base, const std::string& param,
                               const std::vector<double>& values) {
  namespace fs = std::filesystem;
  std::vector<SweepResult> results;
  const std::string root = resolve_out_dir(base.out_dir);
  fs::create_directories(root);
  for (double v : values) {
    ScenarioConfig cfg = base;
    apply_override(cfg, param, v);
    char sub[64];
    std::snprintf(sub, sizeof(sub), "%s_%.6g", param.c_str(), v);
    cfg.out_dir = (fs::path(base.out_dir) / sub).string();
    SweepResult r;
    r.value = v;
    std::vector<StepRecord> series;
    try {
      if (cfg.material == "potential")
        cfg.growth.validate();
      else
        cfg.iso.validate();
      r.status = run_scenario(cfg, &series);
    } catch (const std::exception&) {
      r.status = 1;
    }
    if (!series.empty()) r.final_uz = series.back().uz_p1;
    results.push_back(r);
  }
  std::ofstream summary(fs::path(root) / "sweep_summary.csv");
  summary << "param,value,status,final_uz_p1\n";
  for (const auto& r : results) {
    summary << param << ',' << fmt(r.value) << ',' << r.status << ',' << fmt(r.final_uz) << '\n';
  }
  return results;
}

}  // namespace growsim

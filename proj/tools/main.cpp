#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "growsim/scenario.hpp"
#include "growsim/verify.hpp"

namespace {

constexpr const char* kVersion = "growsim 1.0.0";

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw growsim::ConfigError("cannot open config file '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty()) throw growsim::ConfigError("empty --values list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stress-driven volumetric growth simulation toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(0, 1);

  std::string config_path, out_dir, param, values_csv, report_path;
  bool full = false;

  auto* run_cmd = app.add_subcommand("run", "run one scenario from a JSON config");
  run_cmd->add_option("--config", config_path, "scenario config file")->required();
  run_cmd->add_option("--out", out_dir, "override the output directory");

  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
  sweep_cmd->add_option("--config", config_path, "base scenario config file")->required();
  sweep_cmd->add_option("--param", param, "parameter name to sweep")->required();
  sweep_cmd->add_option("--values", values_csv, "comma-separated values")->required();

  auto* verify_cmd = app.add_subcommand("verify", "run the numerical property suites");
  verify_cmd->add_flag("--full", full, "1000+ draws instead of 100");
  verify_cmd->add_option("--out", report_path, "also write the JSON report to a file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      growsim::ScenarioConfig cfg = growsim::parse_config_json(read_file(config_path));
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      const int status = growsim::run_scenario(cfg);
      if (status != 0) std::cerr << "run: step failure, partial outputs kept\n";
      return status;
    }
    if (sweep_cmd->parsed()) {
      const growsim::ScenarioConfig base = growsim::parse_config_json(read_file(config_path));
      const auto results = growsim::sweep(base, param, parse_values(values_csv));
      int failures = 0;
      for (const auto& r : results) {
        std::cout << param << " = " << r.value << ": "
                  << (r.status == 0 ? "ok" : "failed") << ", final uz = " << r.final_uz << "\n";
        if (r.status != 0) ++failures;
      }
      return failures == 0 ? 0 : 2;
    }
    if (verify_cmd->parsed()) {
      growsim::VerifyOptions opts;
      opts.draws = full ? 1000 : 100;
      const growsim::VerifyReport rep = growsim::run_verification(opts);
      const std::string json = growsim::report_to_json(rep);
      std::cout << json;
      if (!report_path.empty()) {
        std::ofstream os(report_path);
        os << json;
      }
      return rep.all_pass ? 0 : 1;
    }
  } catch (const growsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cout << app.help();
  return 0;
}

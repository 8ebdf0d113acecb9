// kerrosc: scenario runner for the driven Kerr oscillator.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kerrosc/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw kerrosc::config_error("--config", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven parametric oscillator in a Kerr medium: simulations and figure data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(KERROSC_VERSION));

  std::string config_path, out_dir, format;
  double tol = 0.0;
  int trunc = 0;
  for (const auto& [name, cmd] : kerrosc::subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "YAML scenario file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--tol", tol, "integrator tolerance (overrides numerics.tol)");
    sub->add_option("--trunc", trunc, "Fock truncation (overrides numerics.trunc)");
    sub->add_option("--format", format, "csv or json (overrides output.format)")->check(CLI::IsMember({"csv", "json"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const auto* chosen = app.get_subcommands().front();
  kerrosc::Subcommand cmd{};
  for (const auto& [name, c] : kerrosc::subcommands()) {
    if (name == chosen->get_name()) cmd = c;
  }

  kerrosc::ScenarioConfig cfg;
  try {
    cfg = kerrosc::parse_config(read_file(config_path));
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (chosen->count("--tol")) cfg.tol = tol;
    if (chosen->count("--trunc")) cfg.trunc = trunc;
    if (!format.empty()) cfg.format = format;
    kerrosc::validate(cfg);
  } catch (const kerrosc::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    for (const auto& path : kerrosc::run_scenario(cfg, cmd)) std::cout << path.string() << "\n";
  } catch (const kerrosc::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const kerrosc::numerical_error& e) {
    std::cerr << "numerical failure in " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlqg/cli/config.hpp"
#include "nlqg/cli/run.hpp"

namespace {

using namespace nlqg::cli;

/// Maps `cosmo <verb>` to the matching experiment name.
std::vector<std::string> normalize_args(int argc, char** argv) {
  static const std::map<std::string, std::string> cosmo_verbs = {
      {"integrate", "cosmo-integrate"},
      {"reconstruct-b", "cosmo-reconstruct-b"},
      {"energy-check", "energy-check"},
  };
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.size() >= 2 && args[0] == "cosmo")
    if (auto it = cosmo_verbs.find(args[1]); it != cosmo_verbs.end()) {
      args.erase(args.begin());
      args[0] = it->second;
    }
  std::reverse(args.begin(), args.end());
  return args;
}

int run_subcommand(const std::string& name, const std::string& config_path,
                   const std::optional<std::string>& out, const std::vector<std::string>& overrides) {
  Config config = config_path.empty() ? Config::defaults_for(name) : parse_config(config_path, name);
  if (config.experiment() != name)
    throw ConfigError("config names experiment '" + config.experiment() + "' but the subcommand is '" +
                      name + "'");
  for (const auto& o : overrides) apply_override(config, o);
  const auto dir = output_dir(out, name);
  const RunOutcome r =
      run(config, dir, config_path.empty() ? std::nullopt : std::optional<fs::path>(config_path));
  if (r.exit_code == exit_ok)
    std::cout << name << ": ok, outputs in " << dir.string() << "\n";
  else
    std::cerr << name << ": " << status_name(r.exit_code) << ": " << r.message << "\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear quantum dynamics and phantom cosmology experiments", "nlqg"};
  app.set_version_flag("--version", NLQG_VERSION);
  bool list = false;
  std::string print_defaults;
  app.add_flag("--list-experiments", list, "List registered experiments");
  app.add_option("--print-defaults", print_defaults, "Print the resolved default config of an experiment");
  app.require_subcommand(0, 1);
  app.footer("Subcommands also accept the form `cosmo integrate|reconstruct-b|energy-check`.\n"
             "Without --out, results go to $NLQG_OUT/<experiment> (or nlqg-out/<experiment>).");

  std::string config_path;
  std::optional<std::string> out;
  std::vector<std::string> overrides;
  for (const auto& e : experiments()) {
    auto* sub = app.add_subcommand(e.name, e.description);
    sub->add_option("--config", config_path, "Config file (INI sections)")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--override", overrides, "key=value override (repeatable)")->take_all();
  }

  try {
    app.parse(normalize_args(argc, argv));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_validation;
  }

  try {
    if (list) {
      for (const auto& e : experiments()) std::cout << e.name << "\t" << e.description << "\n";
      return exit_ok;
    }
    if (!print_defaults.empty()) {
      std::cout << Config::defaults_for(print_defaults).to_text();
      return exit_ok;
    }
    const auto subs = app.get_subcommands();
    if (subs.empty()) {
      std::cerr << app.help();
      return exit_validation;
    }
    return run_subcommand(subs.front()->get_name(), config_path, out, overrides);
  } catch (const nlqg::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
}

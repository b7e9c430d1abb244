#include <exception>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace enc::cli;

namespace {

struct Sub {
  CLI::App* app;
  std::set<std::string> keys;
  int (*run)(const RunConfig&, bool);
  std::map<std::string, std::optional<std::string>> flags;
  std::string config_file;
  bool force = false;
};

void add_sub(CLI::App& root, Sub& s, const char* name, const char* help) {
  s.app = root.add_subcommand(name, help);
  s.app->set_help_flag("--help", "print this help message and exit");
  s.app->add_option("--config", s.config_file, "key=value configuration file");
  s.app->add_flag("--force", s.force, "overwrite existing output files");
  for (const auto& key : s.keys) {
    s.app->add_option("--" + key, s.flags[key], "overrides config key " + key);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App root{"Forecast encompassing tests for VaR and ES"};
  root.set_version_flag("--version", kVersion);
  root.require_subcommand(1);

  Sub subs[] = {
      {nullptr, encompass_keys(), cmd_encompass, {}, {}, false},
      {nullptr, mc_keys(), cmd_mc, {}, {}, false},
      {nullptr, backtest_keys(), cmd_backtest, {}, {}, false},
      {nullptr, simulate_keys(), cmd_simulate, {}, {}, false},
  };
  add_sub(root, subs[0], "encompass", "run both encompassing directions on a forecast panel");
  add_sub(root, subs[1], "mc", "Monte Carlo size and power study");
  add_sub(root, subs[2], "backtest", "violation ratio, ES ratio, UC and CC tests");
  add_sub(root, subs[3], "simulate", "write a simulated forecast panel");

  try {
    root.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = root.exit(e);
    return rc == 0 ? 0 : usage;
  }

  for (auto& s : subs) {
    if (!s.app->parsed()) continue;
    try {
      RunConfig config(s.keys);
      if (!s.config_file.empty()) config.load_file(s.config_file);
      for (const auto& [key, value] : s.flags) {
        if (value) config.set(key, *value);
      }
      return s.run(config, s.force);
    } catch (const enc::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return exit_code_for(e.code());
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return numerical;
    }
  }
  return usage;
}

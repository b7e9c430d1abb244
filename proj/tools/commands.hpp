#pragma once

#include <set>
#include <string>

#include "cli_support.hpp"

namespace enc::cli {

std::set<std::string> encompass_keys();
std::set<std::string> mc_keys();
std::set<std::string> backtest_keys();
std::set<std::string> simulate_keys();

int cmd_encompass(const RunConfig& config, bool force);
int cmd_mc(const RunConfig& config, bool force);
int cmd_backtest(const RunConfig& config, bool force);
int cmd_simulate(const RunConfig& config, bool force);

}  // namespace enc::cli

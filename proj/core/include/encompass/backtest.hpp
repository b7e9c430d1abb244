#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace enc {

struct BacktestRatios {
  double violation_ratio = 0.0;
  std::optional<double> es_ratio;  // empty when there is no violation
  std::size_t n_violations = 0;
};

/// Violations are y < q (strict).
BacktestRatios backtest_ratios(std::span<const double> y, std::span<const double> q,
                               std::span<const double> e, double alpha);

double kupiec_lr(std::size_t n_violations, std::size_t T, double alpha);
double kupiec_uc(std::size_t n_violations, std::size_t T, double alpha);

/// Markov independence likelihood ratio of a 0/1 hit sequence.
double independence_lr(std::span<const int> hits);
double christoffersen_lr(std::span<const int> hits, double alpha);
double christoffersen_cc(std::span<const int> hits, double alpha);

std::vector<int> violations(std::span<const double> y, std::span<const double> q);

struct BacktestReport {
  std::size_t T = 0;
  double alpha = 0.0;
  double violation_ratio = 0.0;
  std::optional<double> es_ratio;
  std::size_t n_violations = 0;
  double uc_pvalue = 1.0;
  double cc_pvalue = 1.0;
};

BacktestReport run_backtest(std::span<const double> y, std::span<const double> q,
                            std::span<const double> e, double alpha);

}  // namespace enc

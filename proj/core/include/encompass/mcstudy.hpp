#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "encompass/dgp.hpp"
#include "encompass/enctest.hpp"

namespace enc {

/// Runs body(i) for i in [0, n) on up to `threads` workers (0: hardware
/// concurrency). Exceptions from body are rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

std::vector<double> default_pi_grid();

struct ExperimentDesign {
  PanelDesign dgp;  // pi and T are taken from the grids
  std::vector<double> pi_grid = default_pi_grid();
  std::vector<std::size_t> T_grid{1000};
  std::vector<LinkKind> links{LinkKind::convex};
  std::vector<TestMode> modes{TestMode::joint};
  std::vector<Direction> directions{Direction::one_encompasses_two,
                                    Direction::two_encompasses_one};
  std::size_t n_reps = 500;
  double level = 0.05;
  std::optional<CovVariant> cov_variant;
  std::size_t n_draws = 10000;
  FitOptions fit;
  std::uint64_t master_seed = 1;
  unsigned threads = 0;

  void validate() const;
  /// Reliability warnings for short samples at long horizons.
  std::vector<std::string> warnings() const;
};

struct CellKey {
  std::size_t T = 0;
  LinkKind link = LinkKind::convex;
  TestMode mode = TestMode::joint;
  Direction direction = Direction::one_encompasses_two;
  std::size_t pi_index = 0;
  double pi = 0.0;
};

struct Cell {
  CellKey key;
  std::vector<double> pvalues;  // per replication; NaN where the replication failed
  std::size_t n_ok = 0;
  std::size_t failures = 0;
  double rejection = 0.0;
  double stderr_ = 0.0;
  std::vector<std::string> failure_messages;  // first few only

  std::vector<double> valid_pvalues() const;
};

struct RejectionTable {
  ExperimentDesign design;
  std::vector<Cell> cells;

  const Cell* find(std::size_t T, LinkKind link, TestMode mode, Direction direction,
                   std::size_t pi_index) const;
  /// Cell holding the null of `direction`: pi = 0 for forecast 1, pi = 1 for forecast 2.
  const Cell* null_cell(std::size_t T, LinkKind link, TestMode mode, Direction direction) const;
};

RejectionTable size_power_experiment(const ExperimentDesign& design);

struct AdjustedPower {
  double power = 0.0;
  double critical_pvalue = 0.0;
  /// False when ties in the null p-values at the cut make the nominal level unattainable.
  bool exact = true;
};

AdjustedPower size_adjusted_power(const std::vector<double>& null_pvals,
                                  const std::vector<double>& alt_pvals, double level);

void write_size_csv(std::ostream& out, const RejectionTable& table);
void write_power_csv(std::ostream& out, const RejectionTable& table);
void write_adjusted_power_csv(std::ostream& out, const RejectionTable& table);

}  // namespace enc

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "encompass/boundary.hpp"
#include "encompass/covariance.hpp"
#include "encompass/estimation.hpp"

namespace enc {

struct TestOptions {
  double alpha = 0.025;
  /// Unset: sclsp for one-step panels, hac_sclsp for h > 1.
  std::optional<CovVariant> cov_variant;
  std::optional<double> c_T;
  std::optional<int> m_T;
  std::optional<double> box_bound;
  FitOptions fit;
  std::size_t n_draws = 10000;
  std::uint64_t seed = 1;
  std::vector<double> levels{0.10, 0.05, 0.01};
};

struct TestReport {
  LinkKind link;
  TestMode mode;
  Direction direction;
  std::size_t T = 0;
  int horizon = 1;
  double alpha = 0.0;
  Vector theta_hat;
  Vector beta1_star;
  double objective = 0.0;
  double W = 0.0;
  double pvalue = 1.0;
  std::map<double, double> crit;  // level -> critical value
  CovVariant cov_variant = CovVariant::sclsp;
  double c_T = 0.0;
  int m_T = 0;
  std::size_t n_draws = 0;
  std::uint64_t seed = 0;
  int cone_rows = 0;
  int cone_plugin_rows = 0;
  double point_mass_at_zero = 0.0;
  double bread_condition = 0.0;
  bool fit_converged = false;
  bool fit_flat = false;
  std::vector<std::string> warnings;
};

double wald_stat(const Vector& theta_hat, const HypothesisSpec& hyp, const Matrix& V,
                 std::size_t T);

/// Default covariance for a horizon: sclsp at h = 1, hac_sclsp otherwise.
CovVariant default_cov_variant(int horizon);

TestReport run_encompassing_test(const ForecastPanel& panel, LinkKind kind, TestMode mode,
                                 Direction direction, const TestOptions& options = {});

enum class PairOutcome { encompassing, encompassed, combination, inconclusive };
const char* to_string(PairOutcome outcome);

struct PairClassification {
  PairOutcome outcome;
  double p1;  // H0: forecast 1 encompasses forecast 2
  double p2;  // H0: forecast 2 encompasses forecast 1
  double level;
  std::string note;
};

PairClassification classify_pair(const TestReport& forecast1, const TestReport& forecast2,
                                 double level);

}  // namespace enc

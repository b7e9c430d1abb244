#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "encompass/types.hpp"

namespace enc {

/// Standardized (mean 0, variance 1) innovation law.
struct Innovation {
  enum class Kind { normal, skew_t };
  Kind kind = Kind::normal;
  double skew = 1.0;  // Fernandez-Steel xi; 1 is symmetric
  double dof = 0.0;

  static Innovation normal() { return {}; }
  static Innovation skew_t(double skew, double dof);

  void validate() const;
  double draw(std::mt19937_64& rng) const;
  double cdf(double z) const;
  double quantile(double p) const;
  /// E[Z | Z <= quantile(p)].
  double tail_mean(double p) const;
  double prob_nonpositive() const { return cdf(0.0); }
};

/// Draws from the standardized Fernandez-Steel skewed t.
std::vector<double> sample_skew_t(double skew, double dof, std::size_t n, std::uint64_t seed);

/// (alpha-quantile, alpha-ES) of the innovation scaled by sigma.
std::pair<double, double> onestep_var_es(const Innovation& innovation, double alpha, double sigma);

struct GarchSpec {
  double omega = 0.04;
  double arch = 0.1;
  double leverage = 0.0;  // GJR term on r_t <= 0
  double garch = 0.85;
  Innovation innovation;

  /// Sigma^2 recursion of the reference GARCH(1,1): (0.04, 0.1, 0.85).
  static GarchSpec reference_garch(Innovation innov = Innovation::normal());
  /// Reference GJR-GARCH(1,1): (0.04, 0.05, 0.1, 0.8).
  static GarchSpec reference_gjr(Innovation innov = Innovation::normal());

  double persistence() const;
  double unconditional_variance() const;
  void validate() const;
  double next_variance(double variance, double ret) const {
    return omega + (arch + (ret <= 0.0 ? leverage : 0.0)) * ret * ret + garch * variance;
  }
};

/// returns[t] = sigmas[t] * u[t]; sigmas[t] is known one step earlier.
/// next_sigma is the conditional sd of the return after the last one.
struct VolPath {
  std::vector<double> returns;
  std::vector<double> sigmas;
  double next_sigma = 0.0;
};

VolPath simulate_garch(const GarchSpec& spec, std::size_t n, std::size_t burn, std::uint64_t seed);

/// GARCH recursion driven by given standardized innovations; the first
/// `burn` entries of u are consumed as burn-in.
VolPath simulate_garch_with(const GarchSpec& spec, std::span<const double> u, std::size_t burn);

struct GasSpec {
  enum class Kind { gas_t, gas_1f, gas_2f };
  Kind kind = Kind::gas_1f;
  // gas_t: state (mu, sigma^2, nu) = kappa + B state + A scaled score
  Vector kappa, a_diag, b_diag;
  // gas_1f: kappa_t = persistence kappa + (loading / e) (r/alpha 1{r<=q} - e)
  double q_scale = -1.164, e_scale = -1.757, persistence = 0.995, loading = 0.007;
  // gas_2f: (q, e) = w + B (q, e) + A lambda
  Vector w;
  Matrix b_mat, a_mat;
  double alpha = 0.025;

  static GasSpec gas_t();
  static GasSpec gas_1f();
  static GasSpec gas_2f();
};

/// returns[t] with q[t], e[t] its conditional VaR and ES.
struct GasPath {
  std::vector<double> returns, q, e;
};

GasPath simulate_gas(const GasSpec& spec, std::size_t n, std::size_t burn, std::uint64_t seed);

/// One update of the two-factor recursion from (q, e) after return r.
std::pair<double, double> gas_2f_step(const GasSpec& spec, double q, double e, double r);

/// Multi-step (q, e) by Monte Carlo over R paths of a GARCH model started
/// from next-step variance `variance`: empirical lower quantile at order
/// statistic ceil(alpha R) and mean of draws at or below it.
std::pair<double, double> wong_so_forecast(const GarchSpec& model, double variance, int h,
                                           ForecastKind kind, int R, double alpha,
                                           std::uint64_t seed);

struct MixtureSpec {
  enum class Mode { variance_convex, bernoulli };
  Mode mode = Mode::variance_convex;
  double pi = 0.0;
};

struct CombinedPath {
  std::vector<double> y;
  VolPath model1, model2;
};

/// Both GARCH models are driven by one innovation sequence. variance_convex
/// mixes volatilities, bernoulli selects one model's return per step.
CombinedPath make_combined_returns(const MixtureSpec& mix, const GarchSpec& model1,
                                   const GarchSpec& model2, std::size_t n, std::size_t burn,
                                   std::uint64_t seed);

/// y[t] = (1 - b_t) y1[t] + b_t y2[t] with b_t ~ Bernoulli(pi).
std::vector<double> bernoulli_mix(std::span<const double> y1, std::span<const double> y2,
                                  double pi, std::uint64_t seed);

/// Simulation designs used by the Monte Carlo harness and `simulate`.
enum class DesignKind { garch_normal, garch_skewt, gas_t, gas_factor };
const char* to_string(DesignKind kind);
DesignKind design_kind_from_string(std::string_view token);

struct PanelDesign {
  DesignKind kind = DesignKind::garch_normal;
  double pi = 0.0;
  std::size_t T = 1000;
  int h = 1;
  ForecastKind forecast_kind = ForecastKind::ahead;
  int paths = 10000;  // Wong-So paths for h > 1
  double alpha = 0.025;
  std::size_t burn = 1000;
};

ForecastPanel simulate_panel(const PanelDesign& design, std::uint64_t seed);

}  // namespace enc

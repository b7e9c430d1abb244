#include "encompass/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include "encompass/error.hpp"
#include "encompass/rng.hpp"

namespace enc {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Standardized Student t: unit variance, dof > 2.
struct StdT {
  double dof;
  double k;  // sqrt(dof / (dof - 2)); z = t / k
  boost::math::students_t_distribution<double> dist;

  explicit StdT(double nu) : dof(nu), k(std::sqrt(nu / (nu - 2.0))), dist(nu) {}

  double cdf(double u) const { return boost::math::cdf(dist, k * u); }
  double quantile(double p) const { return boost::math::quantile(dist, p) / k; }
  // integral of u g(u) over (-inf, c]
  double partial_mean(double c) const {
    const double v = k * c;
    return -(dof + v * v) / (dof - 1.0) * boost::math::pdf(dist, v) / k;
  }
};

// Mean and sd of the unstandardized Fernandez-Steel variable.
struct SkewMoments {
  double m, s;
};

SkewMoments skew_moments(double xi, double nu) {
  const double m1 = std::exp(std::lgamma((nu - 1.0) / 2.0) - std::lgamma(nu / 2.0)) *
                    std::sqrt(nu - 2.0) / std::sqrt(kPi);
  const double m = m1 * (xi - 1.0 / xi);
  const double s2 = (xi * xi + 1.0 / (xi * xi) - 1.0) - m * m;
  return {m, std::sqrt(s2)};
}

}  // namespace

Innovation Innovation::skew_t(double skew, double dof) {
  Innovation in;
  in.kind = Kind::skew_t;
  in.skew = skew;
  in.dof = dof;
  in.validate();
  return in;
}

void Innovation::validate() const {
  if (kind == Kind::skew_t && (!(dof > 2.0) || !(skew > 0.0))) {
    throw Error(ErrorCode::InvalidShape, "skewed t needs dof > 2 and skew > 0");
  }
}

double Innovation::draw(std::mt19937_64& rng) const {
  if (kind == Kind::normal) {
    std::normal_distribution<double> n(0.0, 1.0);
    return n(rng);
  }
  std::student_t_distribution<double> t(dof);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a = std::abs(t(rng)) * std::sqrt((dof - 2.0) / dof);
  const double x = u(rng) < skew * skew / (1.0 + skew * skew) ? a * skew : -a / skew;
  const auto mo = skew_moments(skew, dof);
  return (x - mo.m) / mo.s;
}

double Innovation::cdf(double z) const {
  if (kind == Kind::normal) return boost::math::cdf(boost::math::normal_distribution<>(), z);
  const auto mo = skew_moments(skew, dof);
  const StdT g(dof);
  const double x = mo.m + mo.s * z;
  const double xi2 = skew * skew;
  if (x < 0.0) return 2.0 / (1.0 + xi2) * g.cdf(x * skew);
  return 1.0 - 2.0 * xi2 / (1.0 + xi2) * (1.0 - g.cdf(x / skew));
}

double Innovation::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "quantile level not in (0,1)");
  if (kind == Kind::normal) return boost::math::quantile(boost::math::normal_distribution<>(), p);
  const auto mo = skew_moments(skew, dof);
  const StdT g(dof);
  const double xi2 = skew * skew;
  double x;
  if (p < 1.0 / (1.0 + xi2)) {
    x = g.quantile(p * (1.0 + xi2) / 2.0) / skew;
  } else {
    x = skew * g.quantile(1.0 - (1.0 - p) * (1.0 + xi2) / (2.0 * xi2));
  }
  return (x - mo.m) / mo.s;
}

double Innovation::tail_mean(double p) const {
  if (kind == Kind::normal) {
    const boost::math::normal_distribution<> n;
    return -boost::math::pdf(n, boost::math::quantile(n, p)) / p;
  }
  const auto mo = skew_moments(skew, dof);
  const StdT g(dof);
  const double xi2 = skew * skew;
  const double x = mo.m + mo.s * quantile(p);
  double partial;  // E[X 1{X <= x}] of the unstandardized variable
  if (x < 0.0) {
    partial = 2.0 / (skew * (1.0 + xi2)) * g.partial_mean(x * skew);
  } else {
    partial = mo.m + 2.0 * skew * xi2 / (1.0 + xi2) * g.partial_mean(x / skew);
  }
  return (partial / p - mo.m) / mo.s;
}

std::vector<double> sample_skew_t(double skew, double dof, std::size_t n, std::uint64_t seed) {
  const auto in = Innovation::skew_t(skew, dof);
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = in.draw(rng);
  return out;
}

std::pair<double, double> onestep_var_es(const Innovation& innovation, double alpha, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  return {innovation.quantile(alpha) * sigma, innovation.tail_mean(alpha) * sigma};
}

GarchSpec GarchSpec::reference_garch(Innovation innov) { return {0.04, 0.1, 0.0, 0.85, innov}; }
GarchSpec GarchSpec::reference_gjr(Innovation innov) { return {0.04, 0.05, 0.1, 0.8, innov}; }

double GarchSpec::persistence() const {
  return arch + leverage * innovation.prob_nonpositive() + garch;
}

double GarchSpec::unconditional_variance() const { return omega / (1.0 - persistence()); }

void GarchSpec::validate() const {
  innovation.validate();
  if (!(omega > 0.0) || arch < 0.0 || garch < 0.0 || leverage < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "GARCH needs omega > 0 and nonnegative loadings");
  }
  if (!(persistence() < 1.0)) {
    throw Error(ErrorCode::NonStationary,
                "GARCH persistence " + std::to_string(persistence()) + " is not below 1");
  }
}

VolPath simulate_garch_with(const GarchSpec& spec, std::span<const double> u, std::size_t burn) {
  spec.validate();
  if (u.size() < burn) throw Error(ErrorCode::SeriesTooShort, "fewer innovations than burn-in");
  VolPath path;
  const std::size_t n = u.size() - burn;
  path.returns.resize(n);
  path.sigmas.resize(n);
  double var = spec.unconditional_variance();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double sigma = std::sqrt(var);
    const double r = sigma * u[i];
    if (i >= burn) {
      path.returns[i - burn] = r;
      path.sigmas[i - burn] = sigma;
    }
    var = spec.next_variance(var, r);
  }
  path.next_sigma = std::sqrt(var);
  return path;
}

VolPath simulate_garch(const GarchSpec& spec, std::size_t n, std::size_t burn, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  std::vector<double> u(n + burn);
  for (auto& v : u) v = spec.innovation.draw(rng);
  return simulate_garch_with(spec, u, burn);
}

GasSpec GasSpec::gas_t() {
  GasSpec s;
  s.kind = Kind::gas_t;
  // Location and scale recursions as calibrated; the degrees of freedom are
  // held at 5 (see README).
  s.kappa = Vector(3);
  s.kappa << 0.0659, 0.00599, 5.0;
  s.a_diag = Vector(3);
  s.a_diag << 0.0, 0.146, 0.0;
  s.b_diag = Vector(3);
  s.b_diag << 0.0, 0.994, 0.0;
  return s;
}

GasSpec GasSpec::gas_1f() {
  GasSpec s;
  s.kind = Kind::gas_1f;
  return s;
}

GasSpec GasSpec::gas_2f() {
  GasSpec s;
  s.kind = Kind::gas_2f;
  s.w = Vector(2);
  s.w << -0.009, -0.010;
  s.b_mat = Matrix(2, 2);
  s.b_mat << 0.993, 0.0, 0.0, 0.994;
  s.a_mat = Matrix(2, 2);
  // printed loadings read column-wise; the row-wise reading diverges at once
  s.a_mat << -0.358, -0.003, -0.351, -0.003;
  return s;
}

std::pair<double, double> gas_2f_step(const GasSpec& spec, double q, double e, double r) {
  const double hit = r <= q ? 1.0 : 0.0;
  Vector lambda(2);
  lambda << q * (spec.alpha - hit), hit * r / spec.alpha - e;
  Vector prev(2);
  prev << q, e;
  const Vector next = spec.w + spec.b_mat * prev + spec.a_mat * lambda;
  return {next(0), next(1)};
}

namespace {

void check_state(double v) {
  if (!std::isfinite(v) || std::abs(v) > 1e6) {
    throw Error(ErrorCode::Divergence, "GAS state left the range |x| <= 1e6");
  }
}

// Normal law matched to a (q, e) pair.
double matched_normal_draw(double q, double e, double z_alpha, double xi_alpha, double u) {
  const double sigma = (e - q) / (xi_alpha - z_alpha);
  if (!(sigma > 0.0)) throw Error(ErrorCode::Divergence, "GAS state has ES at or above VaR");
  const double mu = q - z_alpha * sigma;
  return mu + sigma * u;
}

}  // namespace

GasPath simulate_gas(const GasSpec& spec, std::size_t n, std::size_t burn, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto normal = Innovation::normal();
  const double z_a = normal.quantile(spec.alpha), xi_a = normal.tail_mean(spec.alpha);
  GasPath path;
  path.returns.reserve(n);
  path.q.reserve(n);
  path.e.reserve(n);

  switch (spec.kind) {
    case GasSpec::Kind::gas_1f: {
      double kappa = 0.0;
      for (std::size_t i = 0; i < n + burn; ++i) {
        const double q = spec.q_scale * std::exp(kappa), e = spec.e_scale * std::exp(kappa);
        const double r = matched_normal_draw(q, e, z_a, xi_a, gauss(rng));
        if (i >= burn) {
          path.returns.push_back(r);
          path.q.push_back(q);
          path.e.push_back(e);
        }
        const double hit = r <= q ? 1.0 : 0.0;
        kappa = spec.persistence * kappa + spec.loading / e * (r / spec.alpha * hit - e);
        check_state(kappa);
      }
      break;
    }
    case GasSpec::Kind::gas_2f: {
      // start at the fixed point of the unforced recursion
      double q = spec.w(0) / (1.0 - spec.b_mat(0, 0));
      double e = spec.w(1) / (1.0 - spec.b_mat(1, 1));
      for (std::size_t i = 0; i < n + burn; ++i) {
        const double r = matched_normal_draw(q, e, z_a, xi_a, gauss(rng));
        if (i >= burn) {
          path.returns.push_back(r);
          path.q.push_back(q);
          path.e.push_back(e);
        }
        std::tie(q, e) = gas_2f_step(spec, q, e, r);
        check_state(q);
        check_state(e);
      }
      break;
    }
    case GasSpec::Kind::gas_t: {
      if (spec.kappa.size() != 3 || spec.a_diag.size() != 3 || spec.b_diag.size() != 3) {
        throw Error(ErrorCode::DimensionMismatch, "gas_t needs 3-vectors kappa, A, B");
      }
      Vector f(3);
      for (int j = 0; j < 3; ++j) {
        f(j) = spec.b_diag(j) < 1.0 ? spec.kappa(j) / (1.0 - spec.b_diag(j)) : spec.kappa(j);
      }
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (std::size_t i = 0; i < n + burn; ++i) {
        const double mu = f(0), s2 = std::max(f(1), 1e-8), nu = std::max(f(2), 2.1);
        const double sd = std::sqrt(s2);
        const boost::math::students_t_distribution<double> td(nu);
        const double tq = boost::math::quantile(td, spec.alpha);
        const double tes = -(nu + tq * tq) / (nu - 1.0) * boost::math::pdf(td, tq) / spec.alpha;
        std::student_t_distribution<double> draw(nu);
        const double r = mu + sd * draw(rng);
        if (i >= burn) {
          path.returns.push_back(r);
          path.q.push_back(mu + sd * tq);
          path.e.push_back(mu + sd * tes);
        }
        // inverse-information scaled scores for location and scale,
        // unit-scaled score for the degrees of freedom
        const double z = (r - mu) / sd;
        const double w = nu + z * z;
        Vector score(3);
        score(0) = (nu + 3.0) * sd * z / w;
        score(1) = s2 * (nu + 3.0) / nu * ((nu + 1.0) * z * z / w - 1.0);
        score(2) = 0.5 * (boost::math::digamma((nu + 1.0) / 2.0) - boost::math::digamma(nu / 2.0) -
                          1.0 / nu - std::log1p(z * z / nu) + (nu + 1.0) * z * z / (nu * w));
        f = spec.kappa + spec.b_diag.cwiseProduct(f) + spec.a_diag.cwiseProduct(score);
        for (int j = 0; j < 3; ++j) check_state(f(j));
      }
      break;
    }
  }
  return path;
}

std::pair<double, double> wong_so_forecast(const GarchSpec& model, double variance, int h,
                                           ForecastKind kind, int R, double alpha,
                                           std::uint64_t seed) {
  if (R < 1000) throw Error(ErrorCode::InsufficientPaths, "Wong-So forecasts need R >= 1000");
  if (h < 1) throw Error(ErrorCode::InvalidHorizon, "h must be >= 1");
  if (!(variance > 0.0)) throw Error(ErrorCode::InvalidArgument, "variance must be positive");
  std::mt19937_64 rng(seed);
  std::vector<double> draws(static_cast<std::size_t>(R));
  for (auto& d : draws) {
    double var = variance, sum = 0.0, r = 0.0;
    for (int s = 0; s < h; ++s) {
      r = std::sqrt(var) * model.innovation.draw(rng);
      sum += r;
      var = model.next_variance(var, r);
    }
    d = kind == ForecastKind::aggregate ? sum : r;
  }
  const auto idx = static_cast<std::size_t>(std::ceil(alpha * R)) - 1;
  std::nth_element(draws.begin(), draws.begin() + static_cast<std::ptrdiff_t>(idx), draws.end());
  const double q = draws[idx];
  double tail = 0.0;
  std::size_t count = 0;
  for (double d : draws) {
    if (d <= q) {
      tail += d;
      ++count;
    }
  }
  return {q, tail / static_cast<double>(count)};
}

std::vector<double> bernoulli_mix(std::span<const double> y1, std::span<const double> y2,
                                  double pi, std::uint64_t seed) {
  if (y1.size() != y2.size()) throw Error(ErrorCode::IncompatibleModels, "paths differ in length");
  if (!(pi >= 0.0 && pi <= 1.0)) throw Error(ErrorCode::InvalidArgument, "pi must lie in [0,1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> out(y1.size());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = u(rng) < pi ? y2[t] : y1[t];
  return out;
}

CombinedPath make_combined_returns(const MixtureSpec& mix, const GarchSpec& model1,
                                   const GarchSpec& model2, std::size_t n, std::size_t burn,
                                   std::uint64_t seed) {
  if (!(mix.pi >= 0.0 && mix.pi <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "pi must lie in [0,1]");
  }
  if (model1.innovation.kind != model2.innovation.kind ||
      model1.innovation.skew != model2.innovation.skew ||
      model1.innovation.dof != model2.innovation.dof) {
    throw Error(ErrorCode::IncompatibleModels, "models must share the innovation law");
  }
  std::mt19937_64 rng(seed);
  std::vector<double> u(n + burn);
  for (auto& v : u) v = model1.innovation.draw(rng);
  CombinedPath out{{}, simulate_garch_with(model1, u, burn), simulate_garch_with(model2, u, burn)};
  if (mix.mode == MixtureSpec::Mode::variance_convex) {
    out.y.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      out.y[t] = ((1.0 - mix.pi) * out.model1.sigmas[t] + mix.pi * out.model2.sigmas[t]) * u[t + burn];
    }
  } else {
    out.y = bernoulli_mix(out.model1.returns, out.model2.returns, mix.pi,
                          derive_seed(seed, {0xB0u}));
  }
  return out;
}

const char* to_string(DesignKind kind) {
  switch (kind) {
    case DesignKind::garch_normal: return "garch_normal";
    case DesignKind::garch_skewt: return "garch_skewt";
    case DesignKind::gas_t: return "gas_t";
    case DesignKind::gas_factor: return "gas_factor";
  }
  return "?";
}

DesignKind design_kind_from_string(std::string_view token) {
  if (token == "garch_normal") return DesignKind::garch_normal;
  if (token == "garch_skewt") return DesignKind::garch_skewt;
  if (token == "gas_t") return DesignKind::gas_t;
  if (token == "gas_factor") return DesignKind::gas_factor;
  throw Error(ErrorCode::InvalidArgument, "unknown design '" + std::string(token) + "'");
}

namespace {

ForecastPanel garch_onestep_panel(const PanelDesign& d, const Innovation& innov,
                                  std::uint64_t seed) {
  const auto m1 = GarchSpec::reference_garch(innov), m2 = GarchSpec::reference_gjr(innov);
  const auto path = make_combined_returns({MixtureSpec::Mode::variance_convex, d.pi}, m1, m2, d.T,
                                          d.burn, seed);
  const double z = innov.quantile(d.alpha), xi = innov.tail_mean(d.alpha);
  std::vector<double> q1(d.T), e1(d.T), q2(d.T), e2(d.T);
  for (std::size_t t = 0; t < d.T; ++t) {
    q1[t] = z * path.model1.sigmas[t];
    e1[t] = xi * path.model1.sigmas[t];
    q2[t] = z * path.model2.sigmas[t];
    e2[t] = xi * path.model2.sigmas[t];
  }
  return ForecastPanel(path.y, std::move(q1), std::move(e1), std::move(q2), std::move(e2), 1,
                       ForecastKind::ahead);
}

ForecastPanel garch_multistep_panel(const PanelDesign& d, const Innovation& innov,
                                    std::uint64_t seed) {
  const auto m1 = GarchSpec::reference_garch(innov), m2 = GarchSpec::reference_gjr(innov);
  const std::size_t n = d.T + static_cast<std::size_t>(d.h) - 1;
  const auto path =
      make_combined_returns({MixtureSpec::Mode::bernoulli, 0.0}, m1, m2, n, d.burn, seed);
  auto target = [&](const VolPath& p) {
    if (d.forecast_kind == ForecastKind::aggregate) return aggregate_returns(p.returns, d.h);
    return std::vector<double>(p.returns.begin() + (d.h - 1), p.returns.end());
  };
  const auto y1 = target(path.model1), y2 = target(path.model2);
  std::vector<double> q1(d.T), e1(d.T), q2(d.T), e2(d.T);
  for (std::size_t t = 0; t < d.T; ++t) {
    const double v1 = path.model1.sigmas[t] * path.model1.sigmas[t];
    const double v2 = path.model2.sigmas[t] * path.model2.sigmas[t];
    std::tie(q1[t], e1[t]) =
        wong_so_forecast(m1, v1, d.h, d.forecast_kind, d.paths, d.alpha, derive_seed(seed, {1, t}));
    std::tie(q2[t], e2[t]) =
        wong_so_forecast(m2, v2, d.h, d.forecast_kind, d.paths, d.alpha, derive_seed(seed, {2, t}));
  }
  auto y = bernoulli_mix(y1, y2, d.pi, derive_seed(seed, {3}));
  return ForecastPanel(std::move(y), std::move(q1), std::move(e1), std::move(q2), std::move(e2),
                       d.h, d.forecast_kind);
}

}  // namespace

ForecastPanel simulate_panel(const PanelDesign& d, std::uint64_t seed) {
  if (!(d.pi >= 0.0 && d.pi <= 1.0)) throw Error(ErrorCode::InvalidArgument, "pi not in [0,1]");
  if (d.h < 1) throw Error(ErrorCode::InvalidHorizon, "h must be >= 1");
  switch (d.kind) {
    case DesignKind::garch_normal:
    case DesignKind::garch_skewt: {
      const auto innov = d.kind == DesignKind::garch_normal ? Innovation::normal()
                                                            : Innovation::skew_t(0.8, 5.0);
      return d.h == 1 ? garch_onestep_panel(d, innov, seed)
                      : garch_multistep_panel(d, innov, seed);
    }
    case DesignKind::gas_t:
    case DesignKind::gas_factor: {
      if (d.h != 1) throw Error(ErrorCode::InvalidHorizon, "GAS designs are one-step only");
      std::vector<double> r1, q1, e1, r2, q2, e2;
      if (d.kind == DesignKind::gas_t) {
        const auto m1 = GarchSpec::reference_garch();
        const auto p1 = simulate_garch(m1, d.T, d.burn, derive_seed(seed, {1}));
        r1 = p1.returns;
        for (double s : p1.sigmas) {
          const auto [q, e] = onestep_var_es(m1.innovation, d.alpha, s);
          q1.push_back(q);
          e1.push_back(e);
        }
        auto spec = GasSpec::gas_t();
        spec.alpha = d.alpha;
        auto p2 = simulate_gas(spec, d.T, d.burn, derive_seed(seed, {2}));
        r2 = std::move(p2.returns);
        q2 = std::move(p2.q);
        e2 = std::move(p2.e);
      } else {
        auto s1 = GasSpec::gas_1f();
        auto s2 = GasSpec::gas_2f();
        s1.alpha = s2.alpha = d.alpha;
        auto p1 = simulate_gas(s1, d.T, d.burn, derive_seed(seed, {1}));
        auto p2 = simulate_gas(s2, d.T, d.burn, derive_seed(seed, {2}));
        r1 = std::move(p1.returns);
        q1 = std::move(p1.q);
        e1 = std::move(p1.e);
        r2 = std::move(p2.returns);
        q2 = std::move(p2.q);
        e2 = std::move(p2.e);
      }
      auto y = bernoulli_mix(r1, r2, d.pi, derive_seed(seed, {3}));
      return ForecastPanel(std::move(y), std::move(q1), std::move(e1), std::move(q2),
                           std::move(e2), 1, ForecastKind::ahead);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown design");
}

}  // namespace enc

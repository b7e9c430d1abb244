#include "encompass/backtest.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "encompass/error.hpp"

namespace enc {

namespace {

// x log p with the 0 log 0 = 0 convention
double xlogy(double x, double p) { return x == 0.0 ? 0.0 : x * std::log(p); }

double chi2_sf(double x, double dof) {
  if (!(x > 0.0)) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<>(dof), x));
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha not in (0,1)");
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) throw Error(ErrorCode::LengthMismatch, "series lengths differ");
}

}  // namespace

std::vector<int> violations(std::span<const double> y, std::span<const double> q) {
  check_lengths(y.size(), q.size());
  std::vector<int> hits(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) hits[t] = y[t] < q[t] ? 1 : 0;
  return hits;
}

BacktestRatios backtest_ratios(std::span<const double> y, std::span<const double> q,
                               std::span<const double> e, double alpha) {
  check_alpha(alpha);
  check_lengths(y.size(), e.size());
  if (y.empty()) throw Error(ErrorCode::EmptyInput, "empty series");
  const auto hits = violations(y, q);
  BacktestRatios out;
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (hits[t] == 0) continue;
    ++out.n_violations;
    num += y[t];
    den += e[t];
  }
  out.violation_ratio =
      static_cast<double>(out.n_violations) / static_cast<double>(y.size()) / alpha;
  if (out.n_violations > 0 && den != 0.0) out.es_ratio = num / den;
  return out;
}

double kupiec_lr(std::size_t n_violations, std::size_t T, double alpha) {
  check_alpha(alpha);
  if (n_violations > T || T == 0) throw Error(ErrorCode::InvalidArgument, "need 0 <= x <= T, T > 0");
  const double x = static_cast<double>(n_violations), n = static_cast<double>(T);
  const double p = x / n;
  const double null_ll = xlogy(x, alpha) + xlogy(n - x, 1.0 - alpha);
  const double alt_ll = xlogy(x, p) + xlogy(n - x, 1.0 - p);
  return std::max(0.0, -2.0 * (null_ll - alt_ll));
}

double kupiec_uc(std::size_t n_violations, std::size_t T, double alpha) {
  return chi2_sf(kupiec_lr(n_violations, T, alpha), 1.0);
}

double independence_lr(std::span<const int> hits) {
  if (hits.size() < 2) throw Error(ErrorCode::SeriesTooShort, "need at least two observations");
  double n[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t t = 1; t < hits.size(); ++t) n[hits[t - 1] != 0][hits[t] != 0] += 1.0;
  const double n0 = n[0][0] + n[0][1], n1 = n[1][0] + n[1][1];
  const double p01 = n0 > 0 ? n[0][1] / n0 : 0.0;
  const double p11 = n1 > 0 ? n[1][1] / n1 : 0.0;
  const double p = (n[0][1] + n[1][1]) / (n0 + n1);
  const double markov = xlogy(n[0][0], 1.0 - p01) + xlogy(n[0][1], p01) +
                        xlogy(n[1][0], 1.0 - p11) + xlogy(n[1][1], p11);
  const double iid = xlogy(n[0][0] + n[1][0], 1.0 - p) + xlogy(n[0][1] + n[1][1], p);
  return std::max(0.0, -2.0 * (iid - markov));
}

double christoffersen_lr(std::span<const int> hits, double alpha) {
  std::size_t x = 0;
  for (int h : hits) x += h != 0 ? 1 : 0;
  return kupiec_lr(x, hits.size(), alpha) + independence_lr(hits);
}

double christoffersen_cc(std::span<const int> hits, double alpha) {
  return chi2_sf(christoffersen_lr(hits, alpha), 2.0);
}

BacktestReport run_backtest(std::span<const double> y, std::span<const double> q,
                            std::span<const double> e, double alpha) {
  const auto ratios = backtest_ratios(y, q, e, alpha);
  const auto hits = violations(y, q);
  BacktestReport r;
  r.T = y.size();
  r.alpha = alpha;
  r.violation_ratio = ratios.violation_ratio;
  r.es_ratio = ratios.es_ratio;
  r.n_violations = ratios.n_violations;
  r.uc_pvalue = kupiec_uc(r.n_violations, r.T, alpha);
  r.cc_pvalue = r.T >= 2 ? christoffersen_cc(hits, alpha) : r.uc_pvalue;
  return r;
}

}  // namespace enc

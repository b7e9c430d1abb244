#include "encompass/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace enc {

const char* to_string(CovVariant variant) {
  switch (variant) {
    case CovVariant::op: return "op";
    case CovVariant::sclsp: return "sclsp";
    case CovVariant::hac_op: return "hac_op";
    case CovVariant::hac_sclsp: return "hac_sclsp";
  }
  return "?";
}

CovVariant cov_variant_from_string(std::string_view token) {
  if (token == "op") return CovVariant::op;
  if (token == "sclsp") return CovVariant::sclsp;
  if (token == "hac_op") return CovVariant::hac_op;
  if (token == "hac_sclsp") return CovVariant::hac_sclsp;
  throw Error(ErrorCode::InvalidArgument, "unknown covariance variant '" + std::string(token) + "'");
}

bool uses_lags(CovVariant variant) {
  return variant == CovVariant::hac_op || variant == CovVariant::hac_sclsp;
}

Matrix score_matrix(const LinkDesign& design, const LossSpec& loss, std::span<const double> y,
                    const Vector& theta, double alpha) {
  const Eigen::Index n = design.size();
  const Vector gq = design.gq(theta), ge = design.ge(theta);
  Matrix s(n, theta.size());
  for (Eigen::Index t = 0; t < n; ++t) {
    s.row(t) = psi(loss, y[t], gq(t), ge(t), design.xq.row(t).transpose(),
                   design.xe.row(t).transpose(), alpha)
                   .transpose();
  }
  return s;
}

double default_bandwidth(const LinkDesign& design, std::span<const double> y, const Vector& theta) {
  const Vector gq = design.gq(theta);
  const Eigen::Index n = gq.size();
  if (n < 2) return 1.0;
  double mean = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) mean += y[t] - gq(t);
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double d = y[t] - gq(t) - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return std::max(sd, 1e-12) * std::pow(static_cast<double>(n), -1.0 / 3.0);
}

int default_lag_bound(std::size_t T, int horizon) {
  const double t = static_cast<double>(T);
  const int newey_west = static_cast<int>(std::floor(4.0 * std::pow(t / 100.0, 2.0 / 9.0)));
  const int cap = static_cast<int>(std::floor(std::pow(t, 0.25))) - 1;
  int m = std::min(std::max(horizon - 1, newey_west), cap);
  m = std::min(m, static_cast<int>(T) - 1);
  return std::max(m, 0);
}

double bartlett_weight(int j, int m) { return 1.0 - static_cast<double>(j) / (m + 1.0); }

double condition_number(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  const double lo = ev.minCoeff(), hi = ev.cwiseAbs().maxCoeff();
  if (lo <= 0.0 || hi == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

Matrix estimate_bread(const ForecastPanel& panel, const LinkSpec& link, const LossSpec& loss,
                      const Vector& theta_hat, double alpha, double c_T, bool check) {
  if (!(c_T > 0.0)) throw Error(ErrorCode::InvalidArgument, "bandwidth c_T must be > 0");
  const LinkDesign d = make_design(link, panel);
  const Vector gq = d.gq(theta_hat), ge = d.ge(theta_hat);
  const auto y = panel.y();
  const Eigen::Index n = d.size(), k = link.k;
  Matrix b = Matrix::Zero(k, k);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double dphi = loss.dphi(ge(t)), d2phi = loss.d2phi(ge(t));
    if (!std::isfinite(dphi) || !std::isfinite(d2phi)) {
      throw Error(ErrorCode::DomainError, "phi derivatives not finite at combined ES");
    }
    if (std::abs(y[t] - gq(t)) <= c_T) {
      const double w = (loss.dg(gq(t)) + dphi / alpha) / (2.0 * c_T);
      b.noalias() += w * d.xq.row(t).transpose() * d.xq.row(t);
    }
    b.noalias() += d2phi * d.xe.row(t).transpose() * d.xe.row(t);
  }
  b /= static_cast<double>(n);
  b = 0.5 * (b + b.transpose());
  if (check) {
    const double cond = condition_number(leading_block(b, link.layout.gamma_dim()));
    if (!(cond <= 1e12)) {
      throw Error(ErrorCode::SingularBread,
                  "bread matrix is numerically singular (condition " + std::to_string(cond) + ")");
    }
  }
  return b;
}

Matrix estimate_meat_op(const Matrix& scores, int lag, bool* empty) {
  const Eigen::Index n = scores.rows(), k = scores.cols();
  if (lag < 0) throw Error(ErrorCode::InvalidArgument, "lag must be >= 0");
  if (lag >= n) {
    if (empty) *empty = true;
    return Matrix::Zero(k, k);
  }
  if (empty) *empty = false;
  const Eigen::Index m = n - lag;
  return scores.bottomRows(m).transpose() * scores.topRows(m) / static_cast<double>(n);
}

Matrix estimate_meat_sclsp(const ForecastPanel& panel, const LinkSpec& link, const LossSpec& loss,
                           const Vector& theta_hat, double alpha, bool* fell_back) {
  const LinkDesign d = make_design(link, panel);
  const Vector gq = d.gq(theta_hat), ge = d.ge(theta_hat);
  const auto y = panel.y();
  const Eigen::Index n = d.size(), k = link.k;
  if (fell_back) *fell_back = false;

  auto fallback = [&] {
    if (fell_back) *fell_back = true;
    return estimate_meat_op(score_matrix(d, loss, y, theta_hat, alpha), 0);
  };

  // Standardized quantile residuals with scale proxy gq - ge.
  double m1 = 0.0, m2 = 0.0;
  Eigen::Index n_tail = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double s = gq(t) - ge(t);
    if (!(s > 1e-10)) return fallback();
    const double eps = (y[t] - gq(t)) / s;
    if (eps <= 0.0) {
      m1 += eps;
      m2 += eps * eps;
      ++n_tail;
    }
  }
  if (n_tail < 2) return fallback();
  m1 /= static_cast<double>(n_tail);
  m2 /= static_cast<double>(n_tail);
  const double trunc_var = std::max(m2 - m1 * m1, 0.0);

  // Conditional moments of psi psi^T with E[1{Y<=q}] = alpha,
  // E[(q - Y) 1{Y<=q}] = alpha s and E[(q - Y)^2 1{Y<=q}] = alpha s^2 (v + 1).
  Matrix omega = Matrix::Zero(k, k);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double s = gq(t) - ge(t);
    const double a = loss.dg(gq(t)) + loss.dphi(ge(t)) / alpha;
    const double b = loss.d2phi(ge(t));
    const double qq = a * a * alpha * (1.0 - alpha);
    const double ee = b * b * s * s * ((trunc_var + 1.0) / alpha - 1.0);
    const double qe = a * b * (1.0 - alpha) * s;
    const auto xq = d.xq.row(t), xe = d.xe.row(t);
    omega.noalias() += qq * xq.transpose() * xq + ee * xe.transpose() * xe;
    omega.noalias() += qe * (xq.transpose() * xe + xe.transpose() * xq);
  }
  omega /= static_cast<double>(n);
  return 0.5 * (omega + omega.transpose());
}

Matrix hac(const ForecastPanel& panel, const LinkSpec& link, const LossSpec& loss,
           const Vector& theta_hat, double alpha, CovVariant variant, int m_T,
           std::vector<std::string>* warnings) {
  const auto T = static_cast<int>(panel.size());
  if (m_T < 0 || m_T >= T) {
    throw Error(ErrorCode::InvalidArgument, "lag bound m_T must satisfy 0 <= m_T < T");
  }
  const LinkDesign d = make_design(link, panel);
  const Matrix scores = score_matrix(d, loss, panel.y(), theta_hat, alpha);
  Matrix meat;
  if (variant == CovVariant::sclsp || variant == CovVariant::hac_sclsp) {
    bool fell_back = false;
    meat = estimate_meat_sclsp(panel, link, loss, theta_hat, alpha, &fell_back);
    if (fell_back && warnings) {
      warnings->push_back("sclsp: non-positive scale gq - ge; used outer-product estimator");
    }
  } else {
    meat = estimate_meat_op(scores, 0);
  }
  const int lags = uses_lags(variant) ? m_T : 0;
  for (int j = 1; j <= lags; ++j) {
    const Matrix omega = estimate_meat_op(scores, j);
    meat += bartlett_weight(j, lags) * (omega + omega.transpose());
  }
  return nearest_psd(meat);
}

Matrix nearest_psd(const Matrix& m) {
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  Vector ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  if (top <= 0.0) return Matrix::Zero(m.rows(), m.cols());
  const double floor = 1e-12 * top;
  if (ev.minCoeff() >= floor) return sym;
  ev = ev.cwiseMax(floor);
  const Matrix& u = es.eigenvectors();
  Matrix out = u * ev.asDiagonal() * u.transpose();
  return 0.5 * (out + out.transpose());
}

CovEstimates estimate_covariance(const ForecastPanel& panel, const LinkSpec& link,
                                 const LossSpec& loss, const Vector& theta_hat, double alpha,
                                 const CovOptions& options) {
  CovEstimates est;
  est.variant = options.variant;
  const LinkDesign d = make_design(link, panel);
  est.c_T = options.c_T ? *options.c_T : default_bandwidth(d, panel.y(), theta_hat);
  est.m_T = uses_lags(options.variant)
                ? (options.m_T ? *options.m_T : default_lag_bound(panel.size(), panel.horizon()))
                : 0;
  est.bread = estimate_bread(panel, link, loss, theta_hat, alpha, est.c_T);
  est.meat = hac(panel, link, loss, theta_hat, alpha, options.variant, est.m_T, &est.warnings);

  const auto g = link.layout.gamma_dim();
  const Matrix bread_g = leading_block(est.bread, g);
  est.bread_condition = condition_number(bread_g);
  const Eigen::LDLT<Matrix> ldlt(bread_g);
  const Matrix inv = ldlt.solve(Matrix::Identity(g, g));
  const Matrix sandwich = inv * leading_block(est.meat, g) * inv;
  est.V = leading_block(0.5 * (sandwich + sandwich.transpose()), link.layout.p1);
  return est;
}

}  // namespace enc

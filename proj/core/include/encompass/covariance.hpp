#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "encompass/links.hpp"
#include "encompass/loss.hpp"

namespace enc {

/// Meat-matrix estimators: outer product or location-scale closed form for
/// the contemporaneous term, each with or without Bartlett-weighted lags.
enum class CovVariant { op, sclsp, hac_op, hac_sclsp };

const char* to_string(CovVariant variant);
CovVariant cov_variant_from_string(std::string_view token);
bool uses_lags(CovVariant variant);

/// T x k matrix whose row t is the score psi_t(theta).
Matrix score_matrix(const LinkDesign& design, const LossSpec& loss, std::span<const double> y,
                    const Vector& theta, double alpha);

/// sigma_u * T^(-1/3), sigma_u the sample sd of y - gq(theta).
double default_bandwidth(const LinkDesign& design, std::span<const double> y, const Vector& theta);

/// max(h - 1, floor(4 (T/100)^(2/9))), capped at floor(T^(1/4)) - 1 and T - 1.
int default_lag_bound(std::size_t T, int horizon);

double bartlett_weight(int j, int m);

/// Smallest/largest eigenvalue ratio check on a symmetric matrix.
double condition_number(const Matrix& m);

/// Kernel-density bread estimate. Throws SingularBread when the
/// (beta, delta) block has condition number above 1e12 and check is set.
Matrix estimate_bread(const ForecastPanel& panel, const LinkSpec& link, const LossSpec& loss,
                      const Vector& theta_hat, double alpha, double c_T, bool check = true);

/// Lag-j autocovariance (1/T) sum_{t>=j} psi_t psi_{t-j}^T. Lags at or
/// beyond T give the zero matrix and set `empty` when provided.
Matrix estimate_meat_op(const Matrix& scores, int lag, bool* empty = nullptr);

/// Contemporaneous score covariance under a location-scale model for the
/// quantile residuals. Falls back to the outer product (and reports it)
/// when the implied scale gq - ge is not positive on every row.
Matrix estimate_meat_sclsp(const ForecastPanel& panel, const LinkSpec& link, const LossSpec& loss,
                           const Vector& theta_hat, double alpha, bool* fell_back = nullptr);

Matrix hac(const ForecastPanel& panel, const LinkSpec& link, const LossSpec& loss,
           const Vector& theta_hat, double alpha, CovVariant variant, int m_T,
           std::vector<std::string>* warnings = nullptr);

/// Eigenvalues clipped at max(lambda, 1e-12 * lambda_max) after symmetrizing.
Matrix nearest_psd(const Matrix& m);

struct CovEstimates {
  Matrix bread;
  Matrix meat;
  CovVariant variant;
  double c_T;
  int m_T;
  Matrix V;  // p1 x p1 sandwich block of the tested coordinates
  double bread_condition;
  std::vector<std::string> warnings;
};

struct CovOptions {
  CovVariant variant = CovVariant::sclsp;
  std::optional<double> c_T;
  std::optional<int> m_T;
};

CovEstimates estimate_covariance(const ForecastPanel& panel, const LinkSpec& link,
                                 const LossSpec& loss, const Vector& theta_hat, double alpha,
                                 const CovOptions& options);

}  // namespace enc

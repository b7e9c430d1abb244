#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "encompass/error.hpp"

namespace enc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Upper-left n x n block.
inline Matrix leading_block(const Matrix& m, Eigen::Index n) { return m.topLeftCorner(n, n); }

/// Tail probability level of the VaR/ES pair, restricted to the lower tail.
class ProbabilityLevel {
 public:
  explicit ProbabilityLevel(double alpha);
  double value() const noexcept { return alpha_; }
  operator double() const noexcept { return alpha_; }

 private:
  double alpha_;
};

enum class ForecastKind { ahead, aggregate };

const char* to_string(ForecastKind kind);
ForecastKind forecast_kind_from_string(std::string_view token);

/// Realizations aligned with two competing (VaR, ES) forecast sequences.
/// Position t of every forecast vector predicts y[t].
class ForecastPanel {
 public:
  ForecastPanel(std::vector<double> y, std::vector<double> q1, std::vector<double> e1,
                std::vector<double> q2, std::vector<double> e2, int horizon, ForecastKind kind);

  std::size_t size() const noexcept { return y_.size(); }
  int horizon() const noexcept { return horizon_; }
  ForecastKind kind() const noexcept { return kind_; }

  std::span<const double> y() const noexcept { return y_; }
  std::span<const double> q1() const noexcept { return q1_; }
  std::span<const double> e1() const noexcept { return e1_; }
  std::span<const double> q2() const noexcept { return q2_; }
  std::span<const double> e2() const noexcept { return e2_; }

  /// Rows where e1 > q1 or e2 > q2 (ES above VaR). Counted once per row.
  std::size_t crossing_warnings() const noexcept { return crossings_; }

  /// Copy with forecast pairs 1 and 2 interchanged.
  ForecastPanel swapped() const;

  /// Panel concatenated with itself `times` times (used for additivity checks).
  ForecastPanel repeated(std::size_t times) const;

 private:
  std::vector<double> y_, q1_, e1_, q2_, e2_;
  int horizon_;
  ForecastKind kind_;
  std::size_t crossings_ = 0;
};

ForecastPanel build_panel(std::vector<double> y, std::vector<double> q1, std::vector<double> e1,
                          std::vector<double> q2, std::vector<double> e2, int horizon = 1,
                          ForecastKind kind = ForecastKind::ahead);

/// Overlapping h-period sums: out[t] = r[t] + ... + r[t+h-1], length n-h+1.
std::vector<double> aggregate_returns(std::span<const double> returns, int h);

/// Polyhedral parameter space {theta : gamma * theta <= r}.
class ParamSpace {
 public:
  ParamSpace(Matrix gamma, Vector r);

  Eigen::Index dim() const noexcept { return gamma_.cols(); }
  Eigen::Index rows() const noexcept { return gamma_.rows(); }
  const Matrix& gamma() const noexcept { return gamma_; }
  const Vector& r() const noexcept { return r_; }

  bool contains(const Vector& theta, double tol = 1e-8) const;

  /// Indices of rows with |gamma_i theta - r_i| <= tol.
  std::vector<Eigen::Index> binding_rows(const Vector& theta, double tol = 1e-9) const;

  /// Coordinate-wise bounds implied by the single-coordinate rows.
  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }

  /// True when every row constrains a single coordinate.
  bool is_box() const noexcept { return is_box_; }

 private:
  Matrix gamma_;
  Vector r_;
  Vector lower_, upper_;
  bool is_box_ = true;
};

/// Ordering (beta1, beta2, delta, psi) of the parameter vector.
struct SubvectorLayout {
  int p1 = 0;
  int p2 = 0;
  int q = 0;
  int s = 0;

  int p() const noexcept { return p1 + p2; }
  int gamma_dim() const noexcept { return p1 + p2 + q; }
  int k() const noexcept { return p1 + p2 + q + s; }
  bool operator==(const SubvectorLayout&) const = default;
};

}  // namespace enc

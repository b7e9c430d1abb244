#include "encompass/types.hpp"

#include <cmath>
#include <string>

namespace enc {

ProbabilityLevel::ProbabilityLevel(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw Error(ErrorCode::InvalidArgument,
                "probability level must lie in (0, 0.5), got " + std::to_string(alpha));
  }
}

const char* to_string(ForecastKind kind) {
  return kind == ForecastKind::ahead ? "ahead" : "aggregate";
}

ForecastKind forecast_kind_from_string(std::string_view token) {
  if (token == "ahead") return ForecastKind::ahead;
  if (token == "aggregate") return ForecastKind::aggregate;
  throw Error(ErrorCode::InvalidArgument, "unknown forecast kind '" + std::string(token) + "'");
}

namespace {

void check_finite(const std::vector<double>& v, const char* name) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw Error(ErrorCode::NonFiniteValue,
                  std::string(name) + "[" + std::to_string(i) + "] is not finite");
    }
  }
}

}  // namespace

ForecastPanel::ForecastPanel(std::vector<double> y, std::vector<double> q1, std::vector<double> e1,
                             std::vector<double> q2, std::vector<double> e2, int horizon,
                             ForecastKind kind)
    : y_(std::move(y)),
      q1_(std::move(q1)),
      e1_(std::move(e1)),
      q2_(std::move(q2)),
      e2_(std::move(e2)),
      horizon_(horizon),
      kind_(kind) {
  if (horizon_ < 1) {
    throw Error(ErrorCode::InvalidHorizon, "horizon must be >= 1, got " + std::to_string(horizon_));
  }
  const std::size_t n = y_.size();
  if (n == 0) throw Error(ErrorCode::LengthMismatch, "panel is empty");
  if (q1_.size() != n || e1_.size() != n || q2_.size() != n || e2_.size() != n) {
    throw Error(ErrorCode::LengthMismatch, "y, q1, e1, q2, e2 must share one length");
  }
  check_finite(y_, "y");
  check_finite(q1_, "q1");
  check_finite(e1_, "e1");
  check_finite(q2_, "q2");
  check_finite(e2_, "e2");
  for (std::size_t t = 0; t < n; ++t) {
    if (e1_[t] > q1_[t] || e2_[t] > q2_[t]) ++crossings_;
  }
}

ForecastPanel ForecastPanel::swapped() const {
  return ForecastPanel(y_, q2_, e2_, q1_, e1_, horizon_, kind_);
}

ForecastPanel ForecastPanel::repeated(std::size_t times) const {
  auto rep = [times](const std::vector<double>& v) {
    std::vector<double> out;
    out.reserve(v.size() * times);
    for (std::size_t i = 0; i < times; ++i) out.insert(out.end(), v.begin(), v.end());
    return out;
  };
  return ForecastPanel(rep(y_), rep(q1_), rep(e1_), rep(q2_), rep(e2_), horizon_, kind_);
}

ForecastPanel build_panel(std::vector<double> y, std::vector<double> q1, std::vector<double> e1,
                          std::vector<double> q2, std::vector<double> e2, int horizon,
                          ForecastKind kind) {
  return ForecastPanel(std::move(y), std::move(q1), std::move(e1), std::move(q2), std::move(e2),
                       horizon, kind);
}

std::vector<double> aggregate_returns(std::span<const double> returns, int h) {
  if (h < 1) throw Error(ErrorCode::InvalidHorizon, "h must be >= 1");
  const auto n = returns.size();
  if (n < static_cast<std::size_t>(h)) {
    throw Error(ErrorCode::SeriesTooShort, "series of length " + std::to_string(n) +
                                               " is shorter than h=" + std::to_string(h));
  }
  std::vector<double> out(n - h + 1);
  for (std::size_t t = 0; t < out.size(); ++t) {
    double s = 0.0;
    for (int j = 0; j < h; ++j) s += returns[t + j];
    out[t] = s;
  }
  return out;
}

ParamSpace::ParamSpace(Matrix gamma, Vector r) : gamma_(std::move(gamma)), r_(std::move(r)) {
  if (gamma_.rows() != r_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "gamma rows must match length of r");
  }
  const auto k = gamma_.cols();
  lower_ = Vector::Constant(k, -std::numeric_limits<double>::infinity());
  upper_ = Vector::Constant(k, std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < gamma_.rows(); ++i) {
    Eigen::Index nz = 0, col = -1;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (gamma_(i, j) != 0.0) {
        ++nz;
        col = j;
      }
    }
    if (nz != 1) {
      is_box_ = false;
      continue;
    }
    const double bound = r_(i) / gamma_(i, col);
    if (gamma_(i, col) > 0) {
      upper_(col) = std::min(upper_(col), bound);
    } else {
      lower_(col) = std::max(lower_(col), bound);
    }
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!std::isfinite(lower_(j)) || !std::isfinite(upper_(j))) {
      throw Error(ErrorCode::InvalidArgument,
                  "parameter space is unbounded in coordinate " + std::to_string(j));
    }
    if (lower_(j) > upper_(j)) {
      throw Error(ErrorCode::InvalidArgument,
                  "parameter space is empty in coordinate " + std::to_string(j));
    }
  }
}

bool ParamSpace::contains(const Vector& theta, double tol) const {
  if (theta.size() != dim()) return false;
  return ((gamma_ * theta - r_).array() <= tol).all();
}

std::vector<Eigen::Index> ParamSpace::binding_rows(const Vector& theta, double tol) const {
  std::vector<Eigen::Index> rows;
  const Vector slack = gamma_ * theta - r_;
  for (Eigen::Index i = 0; i < slack.size(); ++i) {
    if (std::abs(slack(i)) <= tol) rows.push_back(i);
  }
  return rows;
}

}  // namespace enc

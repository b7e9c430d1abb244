#include "encompass/loss.hpp"

#include <cmath>
#include <limits>

namespace enc {

namespace {

constexpr double kEsCeiling = -1e-10;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(ErrorCode::DomainError, std::string(what) + " is not finite");
}

}  // namespace

LossSpec LossSpec::fz0() {
  LossSpec s;
  s.tag = Tag::fz0;
  s.g = [](double) { return 0.0; };
  s.dg = [](double) { return 0.0; };
  s.phi = [](double z) { return -std::log(-z); };
  s.dphi = [](double z) { return -1.0 / z; };
  s.d2phi = [](double z) { return 1.0 / (z * z); };
  return s;
}

LossSpec LossSpec::custom(std::function<double(double)> g, std::function<double(double)> dg,
                          std::function<double(double)> phi, std::function<double(double)> dphi,
                          std::function<double(double)> d2phi) {
  LossSpec s;
  s.tag = Tag::custom;
  s.g = std::move(g);
  s.dg = std::move(dg);
  s.phi = std::move(phi);
  s.dphi = std::move(dphi);
  s.d2phi = std::move(d2phi);
  return s;
}

bool LossSpec::check_shape(double lo, double hi, int points) const {
  double prev_g = g(lo);
  for (int i = 1; i < points; ++i) {
    const double z = lo + (hi - lo) * i / (points - 1);
    const double gz = g(z);
    if (gz < prev_g) return false;
    if (!(dphi(z) > 0.0) || !(d2phi(z) > 0.0)) return false;
    prev_g = gz;
  }
  return dphi(lo) > 0.0 && d2phi(lo) > 0.0;
}

double rho(const LossSpec& spec, double y, double q, double e, double alpha) {
  const double hit = y <= q ? 1.0 : 0.0;
  if (spec.is_fz0()) {
    if (!(e < 0.0)) throw Error(ErrorCode::DomainError, "FZ0 loss requires e < 0");
    return -(e - q + (q - y) * hit / alpha) / e + std::log(-e);
  }
  const double dphi = spec.dphi(e);
  const double phi = spec.phi(e);
  require_finite(dphi, "phi'(e)");
  require_finite(phi, "phi(e)");
  return (hit - alpha) * spec.g(q) - hit * spec.g(y) + dphi * (e - q + (q - y) * hit / alpha) -
         phi;
}

Vector psi(const LossSpec& spec, double y, double gq, double ge, const Vector& grad_q,
           const Vector& grad_e, double alpha) {
  if (grad_q.size() != grad_e.size()) {
    throw Error(ErrorCode::DimensionMismatch, "gradient vectors differ in length");
  }
  if (spec.is_fz0() && !(ge < 0.0)) throw Error(ErrorCode::DomainError, "FZ0 score requires e < 0");
  const double hit = y <= gq ? 1.0 : 0.0;
  const double dphi = spec.dphi(ge);
  const double d2phi = spec.d2phi(ge);
  require_finite(dphi, "phi'(e)");
  require_finite(d2phi, "phi''(e)");
  const double wq = (spec.dg(gq) + dphi / alpha) * (hit - alpha);
  const double we = d2phi * (ge - gq + (gq - y) * hit / alpha);
  return grad_q * wq + grad_e * we;
}

double design_objective(const LinkDesign& design, const LossSpec& spec, std::span<const double> y,
                        const Vector& theta, double alpha) {
  const Eigen::Index n = design.size();
  double total = 0.0;
  if (spec.is_fz0()) {
    for (Eigen::Index t = 0; t < n; ++t) {
      const double q = design.cq(t) + design.xq.row(t).dot(theta);
      const double e = design.ce(t) + design.xe.row(t).dot(theta);
      if (e >= kEsCeiling) return std::numeric_limits<double>::infinity();
      const double hit = y[t] <= q ? 1.0 : 0.0;
      total += -(e - q + (q - y[t]) * hit / alpha) / e + std::log(-e);
    }
    return total;
  }
  for (Eigen::Index t = 0; t < n; ++t) {
    const double q = design.cq(t) + design.xq.row(t).dot(theta);
    const double e = design.ce(t) + design.xe.row(t).dot(theta);
    total += rho(spec, y[t], q, e, alpha);
  }
  return total;
}

double sample_objective(const LinkSpec& link, const LossSpec& spec, const ForecastPanel& panel,
                        const Vector& theta, double alpha) {
  if (theta.size() != link.k) throw Error(ErrorCode::DimensionMismatch, "theta length != k");
  if (!link.space.contains(theta, 1e-8)) {
    throw Error(ErrorCode::OutOfSpace, "theta lies outside the link parameter space");
  }
  return design_objective(make_design(link, panel), spec, panel.y(), theta, alpha);
}

}  // namespace enc

#include "encompass/links.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace enc {

const char* to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::linear: return "linear";
    case LinkKind::convex: return "convex";
    case LinkKind::nocross: return "nocross";
  }
  return "?";
}

const char* to_string(TestMode mode) { return mode == TestMode::joint ? "joint" : "aux"; }

const char* to_string(Direction direction) {
  return direction == Direction::one_encompasses_two ? "forecast1" : "forecast2";
}

LinkKind link_kind_from_string(std::string_view token) {
  if (token == "linear") return LinkKind::linear;
  if (token == "convex") return LinkKind::convex;
  if (token == "nocross") return LinkKind::nocross;
  throw Error(ErrorCode::InvalidArgument, "unknown link kind '" + std::string(token) + "'");
}

TestMode test_mode_from_string(std::string_view token) {
  if (token == "joint") return TestMode::joint;
  if (token == "aux") return TestMode::aux;
  throw Error(ErrorCode::InvalidArgument, "unknown test mode '" + std::string(token) + "'");
}

Direction direction_from_string(std::string_view token) {
  if (token == "forecast1" || token == "1") return Direction::one_encompasses_two;
  if (token == "forecast2" || token == "2") return Direction::two_encompasses_one;
  throw Error(ErrorCode::InvalidArgument, "unknown direction '" + std::string(token) + "'");
}

int link_dimension(LinkKind kind) {
  switch (kind) {
    case LinkKind::linear: return 6;
    case LinkKind::convex: return 4;
    case LinkKind::nocross: return 3;
  }
  return 0;
}

double default_box_bound(const ForecastPanel& panel) {
  double m = 0.0;
  for (auto s : {panel.q1(), panel.e1(), panel.q2(), panel.e2()}) {
    for (double v : s) m = std::max(m, std::abs(v));
  }
  return m > 0.0 ? 100.0 * m : 100.0;
}

ParamSpace link_constraints(LinkKind kind, double box_bound) {
  if (!(box_bound > 0.0)) throw Error(ErrorCode::InvalidArgument, "box bound C must be > 0");
  const int k = link_dimension(kind);
  const int n_unit = kind == LinkKind::linear ? 0 : 2;  // leading [0,1] coordinates
  Matrix gamma = Matrix::Zero(2 * k, k);
  Vector r(2 * k);
  for (int i = 0; i < k; ++i) {
    const double hi = i < n_unit ? 1.0 : box_bound;
    const double lo = i < n_unit ? 0.0 : -box_bound;
    gamma(2 * i, i) = 1.0;
    r(2 * i) = hi;
    gamma(2 * i + 1, i) = -1.0;
    r(2 * i + 1) = -lo;
  }
  return ParamSpace(std::move(gamma), std::move(r));
}

SubvectorLayout link_layout(LinkKind kind, TestMode mode) {
  switch (kind) {
    case LinkKind::linear:
      return mode == TestMode::joint ? SubvectorLayout{4, 0, 2, 0} : SubvectorLayout{2, 0, 4, 0};
    case LinkKind::convex:
      return mode == TestMode::joint ? SubvectorLayout{2, 0, 2, 0} : SubvectorLayout{1, 1, 2, 0};
    case LinkKind::nocross:
      return mode == TestMode::joint ? SubvectorLayout{2, 0, 1, 0} : SubvectorLayout{1, 1, 1, 0};
  }
  return {};
}

LinkSpec make_link(LinkKind kind, double box_bound, TestMode mode) {
  const int k = link_dimension(kind);
  Vector star = Vector::Zero(k);
  switch (kind) {
    case LinkKind::linear:
      star << 1, 0, 1, 0, 0, 0;
      break;
    case LinkKind::convex:
      star << 1, 1, 0, 0;
      break;
    case LinkKind::nocross:
      star << 1, 1, 0;
      break;
  }
  return LinkSpec{kind, k, box_bound, link_constraints(kind, box_bound), link_layout(kind, mode),
                  std::move(star)};
}

LinkValue eval_link(const LinkSpec& spec, const Vector& theta, double q1, double q2, double e1,
                    double e2) {
  if (theta.size() != spec.k) {
    throw Error(ErrorCode::DimensionMismatch, "theta has length " + std::to_string(theta.size()) +
                                                  ", link expects " + std::to_string(spec.k));
  }
  LinkValue v{0.0, 0.0, Vector::Zero(spec.k), Vector::Zero(spec.k)};
  switch (spec.kind) {
    case LinkKind::linear:
      // gq = t6 + t3 q1 + t4 q2,  ge = t5 + t1 e1 + t2 e2
      v.gq = theta(5) + theta(2) * q1 + theta(3) * q2;
      v.ge = theta(4) + theta(0) * e1 + theta(1) * e2;
      v.grad_q << 0, 0, q1, q2, 0, 1;
      v.grad_e << e1, e2, 0, 0, 1, 0;
      break;
    case LinkKind::convex:
      // gq = t4 + t2 q1 + (1-t2) q2,  ge = t3 + t1 e1 + (1-t1) e2
      v.gq = theta(3) + theta(1) * q1 + (1.0 - theta(1)) * q2;
      v.ge = theta(2) + theta(0) * e1 + (1.0 - theta(0)) * e2;
      v.grad_q << 0, q1 - q2, 0, 1;
      v.grad_e << e1 - e2, 0, 1, 0;
      break;
    case LinkKind::nocross: {
      // ge = t3 + t1 e1 + (1-t1) e2,  gq = ge + t2 (q1-e1) + (1-t2) (q2-e2)
      v.ge = theta(2) + theta(0) * e1 + (1.0 - theta(0)) * e2;
      v.gq = v.ge + theta(1) * (q1 - e1) + (1.0 - theta(1)) * (q2 - e2);
      v.grad_e << e1 - e2, 0, 1;
      v.grad_q << e1 - e2, (q1 - e1) - (q2 - e2), 1;
      break;
    }
  }
  return v;
}

LinkDesign make_design(const LinkSpec& spec, const ForecastPanel& panel) {
  const auto n = static_cast<Eigen::Index>(panel.size());
  LinkDesign d{Vector(n), Vector(n), Matrix(n, spec.k), Matrix(n, spec.k)};
  const Vector zero = Vector::Zero(spec.k);
  const auto q1 = panel.q1(), q2 = panel.q2(), e1 = panel.e1(), e2 = panel.e2();
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto v = eval_link(spec, zero, q1[t], q2[t], e1[t], e2[t]);
    d.cq(t) = v.gq;
    d.ce(t) = v.ge;
    d.xq.row(t) = v.grad_q.transpose();
    d.xe.row(t) = v.grad_e.transpose();
  }
  return d;
}

HypothesisSpec hypothesis(LinkKind kind, TestMode mode, Direction direction) {
  HypothesisSpec h{mode, direction, {}, {}};
  const auto layout = link_layout(kind, mode);
  h.tested_indices.resize(layout.p1);
  for (int i = 0; i < layout.p1; ++i) h.tested_indices[i] = i;
  h.beta1_star.resize(layout.p1);
  switch (kind) {
    case LinkKind::linear:
      if (mode == TestMode::joint) {
        h.beta1_star << 1, 0, 1, 0;
      } else {
        h.beta1_star << 1, 0;
      }
      break;
    case LinkKind::convex:
    case LinkKind::nocross:
      if (mode == TestMode::joint) {
        h.beta1_star << 1, 1;
      } else {
        h.beta1_star << 1;
      }
      break;
  }
  return h;
}

}  // namespace enc

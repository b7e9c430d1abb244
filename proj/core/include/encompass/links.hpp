#pragma once

#include <string_view>
#include <vector>

#include "encompass/types.hpp"

namespace enc {

enum class LinkKind { linear, convex, nocross };
enum class TestMode { joint, aux };
enum class Direction { one_encompasses_two, two_encompasses_one };

const char* to_string(LinkKind kind);
const char* to_string(TestMode mode);
const char* to_string(Direction direction);
LinkKind link_kind_from_string(std::string_view token);
TestMode test_mode_from_string(std::string_view token);
Direction direction_from_string(std::string_view token);

/// Number of link parameters: linear 6, convex 4, nocross 3.
int link_dimension(LinkKind kind);

/// Box half-width used for the "essentially unrestricted" coordinates when
/// none is given: 100 times the largest absolute forecast value.
double default_box_bound(const ForecastPanel& panel);

/// Parameter space of a link family; coordinates with no natural range are
/// restricted to [-C, C].
ParamSpace link_constraints(LinkKind kind, double box_bound);

/// (beta1, beta2, delta, psi) split for a link family and test mode.
SubvectorLayout link_layout(LinkKind kind, TestMode mode);

struct LinkSpec {
  LinkKind kind;
  int k;
  double box_bound;
  ParamSpace space;
  SubvectorLayout layout;
  Vector theta_star;  // reproduces forecast pair 1
};

LinkSpec make_link(LinkKind kind, double box_bound, TestMode mode = TestMode::joint);

struct LinkValue {
  double gq;
  double ge;
  Vector grad_q;
  Vector grad_e;
};

LinkValue eval_link(const LinkSpec& spec, const Vector& theta, double q1, double q2, double e1,
                    double e2);

/// All shipped links are affine in theta, so a panel reduces to
/// gq = cq + Xq * theta and ge = ce + Xe * theta with one row per time point.
struct LinkDesign {
  Vector cq, ce;
  Matrix xq, xe;

  Eigen::Index size() const noexcept { return cq.size(); }
  Vector gq(const Vector& theta) const { return cq + xq * theta; }
  Vector ge(const Vector& theta) const { return ce + xe * theta; }
};

LinkDesign make_design(const LinkSpec& spec, const ForecastPanel& panel);

struct HypothesisSpec {
  TestMode mode;
  Direction direction;
  std::vector<int> tested_indices;  // zero-based positions of beta1 in theta
  Vector beta1_star;
};

/// Null configuration for "forecast pair 1 encompasses pair 2". The reverse
/// direction uses the same restrictions on a panel with the pairs swapped.
HypothesisSpec hypothesis(LinkKind kind, TestMode mode, Direction direction);

}  // namespace enc

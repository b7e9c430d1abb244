#include <gtest/gtest.h>

#include <random>

#include "encompass/links.hpp"

using namespace enc;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST(EvalLink, ConvexMidpoint) {
  const auto s = make_link(LinkKind::convex, 100);
  const auto v = eval_link(s, vec({0.5, 0.5, 0, 0}), -2, -4, -3, -5);
  EXPECT_DOUBLE_EQ(v.gq, -3);
  EXPECT_DOUBLE_EQ(v.ge, -4);
}

TEST(EvalLink, ThetaStarReproducesForecastOne) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5, -0.1);
  for (auto kind : {LinkKind::linear, LinkKind::convex, LinkKind::nocross}) {
    for (auto mode : {TestMode::joint, TestMode::aux}) {
      const auto s = make_link(kind, 100, mode);
      EXPECT_TRUE(s.space.contains(s.theta_star));
      for (int i = 0; i < 100; ++i) {
        const double q1 = u(rng), q2 = u(rng), e1 = q1 - 1, e2 = q2 - 0.5;
        const auto v = eval_link(s, s.theta_star, q1, q2, e1, e2);
        EXPECT_DOUBLE_EQ(v.gq, q1);
        EXPECT_DOUBLE_EQ(v.ge, e1);
      }
    }
  }
}

TEST(EvalLink, NocrossHandValue) {
  const auto s = make_link(LinkKind::nocross, 100);
  const auto v = eval_link(s, vec({1, 0, 0}), -2, -4, -3, -5);
  EXPECT_DOUBLE_EQ(v.ge, -3);
  EXPECT_DOUBLE_EQ(v.gq, -2);
}

TEST(EvalLink, LinearCoordinates) {
  const auto s = make_link(LinkKind::linear, 100);
  const auto v = eval_link(s, vec({0.1, 0.2, 0.3, 0.4, 0.5, 0.6}), -2, -4, -3, -5);
  EXPECT_DOUBLE_EQ(v.ge, 0.5 + 0.1 * -3 + 0.2 * -5);
  EXPECT_DOUBLE_EQ(v.gq, 0.6 + 0.3 * -2 + 0.4 * -4);
}

TEST(EvalLink, DimensionMismatch) {
  const auto s = make_link(LinkKind::convex, 100);
  try {
    eval_link(s, Vector::Zero(3), -2, -4, -3, -5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(EvalLink, GradientsMatchDifferences) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (auto kind : {LinkKind::linear, LinkKind::convex, LinkKind::nocross}) {
    const auto s = make_link(kind, 100);
    for (int i = 0; i < 50; ++i) {
      Vector th(s.k);
      for (int j = 0; j < s.k; ++j) th(j) = u(rng);
      const double q1 = -1 - u(rng), q2 = -1 - u(rng), e1 = q1 - u(rng), e2 = q2 - u(rng);
      const auto v = eval_link(s, th, q1, q2, e1, e2);
      for (int j = 0; j < s.k; ++j) {
        Vector hi = th, lo = th;
        hi(j) += 1e-5;
        lo(j) -= 1e-5;
        const auto a = eval_link(s, hi, q1, q2, e1, e2), b = eval_link(s, lo, q1, q2, e1, e2);
        EXPECT_NEAR((a.gq - b.gq) / 2e-5, v.grad_q(j), 1e-8);
        EXPECT_NEAR((a.ge - b.ge) / 2e-5, v.grad_e(j), 1e-8);
      }
    }
  }
}

TEST(EvalLink, NoCrossingGuarantee) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1), f(-6, 2);
  const auto s = make_link(LinkKind::nocross, 50);
  for (int i = 0; i < 10000; ++i) {
    const Vector th = vec({u(rng), u(rng), (u(rng) - 0.5) * 100});
    const double q1 = f(rng), q2 = f(rng);
    const double e1 = q1 - 3 * u(rng), e2 = q2 - 3 * u(rng);
    const auto v = eval_link(s, th, q1, q2, e1, e2);
    EXPECT_GE(v.gq - v.ge, 0.0);
  }
}

TEST(EvalLink, ThetaStarUniqueOnGrid) {
  const auto s = make_link(LinkKind::convex, 100);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-4, -1);
  std::vector<std::array<double, 4>> rows;
  for (int i = 0; i < 10; ++i) {
    const double q1 = u(rng), q2 = u(rng);
    rows.push_back({q1, q2, q1 - 0.7, q2 - 0.3});
  }
  int matches = 0;
  for (double a = 0; a <= 1.0001; a += 0.1) {
    for (double b = 0; b <= 1.0001; b += 0.1) {
      for (double c = -1; c <= 1.0001; c += 0.25) {
        for (double d = -1; d <= 1.0001; d += 0.25) {
          bool all = true;
          for (const auto& r : rows) {
            const auto v = eval_link(s, vec({a, b, c, d}), r[0], r[1], r[2], r[3]);
            all = all && std::abs(v.gq - r[0]) < 1e-9 && std::abs(v.ge - r[2]) < 1e-9;
          }
          matches += all ? 1 : 0;
        }
      }
    }
  }
  EXPECT_EQ(matches, 1);
}

TEST(LinkConstraints, RowCounts) {
  const auto c = link_constraints(LinkKind::convex, 10);
  EXPECT_EQ(c.rows(), 8);
  bool found = false;
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    if (c.gamma().row(i) == vec({1, 0, 0, 0}).transpose()) {
      EXPECT_DOUBLE_EQ(c.r()(i), 1.0);
      found = true;
    }
  }
  EXPECT_TRUE(found);
  const auto l = link_constraints(LinkKind::linear, 50);
  EXPECT_EQ(l.rows(), 12);
  EXPECT_TRUE(l.is_box());
  EXPECT_DOUBLE_EQ(l.upper()(3), 50);
  EXPECT_EQ(link_constraints(LinkKind::nocross, 10).rows(), 6);
  EXPECT_DOUBLE_EQ(link_constraints(LinkKind::nocross, 10).lower()(1), 0.0);
}

TEST(LinkLayout, PerKindAndMode) {
  EXPECT_EQ(link_layout(LinkKind::linear, TestMode::joint), (SubvectorLayout{4, 0, 2, 0}));
  EXPECT_EQ(link_layout(LinkKind::linear, TestMode::aux), (SubvectorLayout{2, 0, 4, 0}));
  EXPECT_EQ(link_layout(LinkKind::convex, TestMode::joint), (SubvectorLayout{2, 0, 2, 0}));
  EXPECT_EQ(link_layout(LinkKind::convex, TestMode::aux), (SubvectorLayout{1, 1, 2, 0}));
  EXPECT_EQ(link_layout(LinkKind::nocross, TestMode::joint), (SubvectorLayout{2, 0, 1, 0}));
  EXPECT_EQ(link_layout(LinkKind::nocross, TestMode::aux), (SubvectorLayout{1, 1, 1, 0}));
}

TEST(Hypothesis, NullValues) {
  const auto cj = hypothesis(LinkKind::convex, TestMode::joint, Direction::one_encompasses_two);
  EXPECT_EQ(cj.tested_indices, (std::vector<int>{0, 1}));
  EXPECT_EQ(cj.beta1_star, vec({1, 1}));
  const auto la = hypothesis(LinkKind::linear, TestMode::aux, Direction::one_encompasses_two);
  EXPECT_EQ(la.tested_indices, (std::vector<int>{0, 1}));
  EXPECT_EQ(la.beta1_star, vec({1, 0}));
  const auto lj = hypothesis(LinkKind::linear, TestMode::joint, Direction::one_encompasses_two);
  EXPECT_EQ(lj.beta1_star, vec({1, 0, 1, 0}));
  const auto n1 = hypothesis(LinkKind::nocross, TestMode::aux, Direction::one_encompasses_two);
  const auto n2 = hypothesis(LinkKind::nocross, TestMode::aux, Direction::two_encompasses_one);
  EXPECT_EQ(n1.tested_indices, n2.tested_indices);
  EXPECT_EQ(n1.beta1_star, n2.beta1_star);
  EXPECT_EQ(n2.beta1_star, vec({1}));
  EXPECT_EQ(n2.direction, Direction::two_encompasses_one);
}

TEST(LinkTokens, RoundTrip) {
  for (auto k : {LinkKind::linear, LinkKind::convex, LinkKind::nocross}) {
    EXPECT_EQ(link_kind_from_string(to_string(k)), k);
  }
  for (auto d : {Direction::one_encompasses_two, Direction::two_encompasses_one}) {
    EXPECT_EQ(direction_from_string(to_string(d)), d);
  }
  EXPECT_THROW(link_kind_from_string("cubic"), Error);
}

TEST(MakeDesign, MatchesEvalLink) {
  const auto p = build_panel({-1, 0.5, -2}, {-2, -2.1, -1.9}, {-2.5, -2.6, -2.4},
                             {-1.5, -1.7, -1.6}, {-2.0, -2.2, -2.1});
  for (auto kind : {LinkKind::linear, LinkKind::convex, LinkKind::nocross}) {
    const auto s = make_link(kind, 100);
    Vector th = Vector::Constant(s.k, 0.3);
    const auto d = make_design(s, p);
    for (std::size_t t = 0; t < p.size(); ++t) {
      const auto v = eval_link(s, th, p.q1()[t], p.q2()[t], p.e1()[t], p.e2()[t]);
      EXPECT_NEAR(d.gq(th)(static_cast<Eigen::Index>(t)), v.gq, 1e-14);
      EXPECT_NEAR(d.ge(th)(static_cast<Eigen::Index>(t)), v.ge, 1e-14);
    }
  }
}

TEST(DefaultBoxBound, ScalesWithData) {
  const auto p = build_panel({-1}, {-2}, {-2.5}, {-1.9}, {-3.4});
  EXPECT_DOUBLE_EQ(default_box_bound(p), 340.0);
}

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "encompass/types.hpp"

using namespace enc;

TEST(ProbabilityLevel, AcceptsLowerTail) {
  EXPECT_DOUBLE_EQ(ProbabilityLevel(0.025).value(), 0.025);
  EXPECT_THROW(ProbabilityLevel(0.5), Error);
  EXPECT_THROW(ProbabilityLevel(0.0), Error);
  EXPECT_THROW(ProbabilityLevel(0.7), Error);
}

TEST(BuildPanel, SingleValidRow) {
  const auto p = build_panel({-1}, {-2}, {-2.5}, {-1.9}, {-2.4}, 1);
  EXPECT_EQ(p.size(), 1u);
  EXPECT_EQ(p.crossing_warnings(), 0u);
  EXPECT_EQ(p.horizon(), 1);
}

TEST(BuildPanel, CountsCrossings) {
  const auto p = build_panel({-1}, {-2}, {-1.5}, {-1.9}, {-2.4}, 1);
  EXPECT_EQ(p.crossing_warnings(), 1u);
  const auto both = build_panel({-1, 0}, {-2, -2}, {-1.5, -3}, {-1.9, -1}, {-1.0, -0.5});
  EXPECT_EQ(both.crossing_warnings(), 2u);
}

TEST(BuildPanel, RejectsLengthMismatch) {
  try {
    build_panel({1, 2, 3, 4, 5}, {1, 2, 3, 4}, {1, 2, 3, 4, 5}, {1, 2, 3, 4, 5}, {1, 2, 3, 4, 5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
}

TEST(BuildPanel, RejectsNonFiniteAndBadHorizon) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    build_panel({nan}, {-2}, {-2.5}, {-1.9}, {-2.4});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteValue);
  }
  try {
    build_panel({-1}, {-2}, {-2.5}, {-1.9}, {-2.4}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidHorizon);
  }
  EXPECT_THROW(build_panel({}, {}, {}, {}, {}), Error);
}

TEST(ForecastPanel, SwapAndRepeat) {
  const auto p = build_panel({-1, 1}, {-2, -2.1}, {-2.5, -2.6}, {-1.9, -1.8}, {-2.4, -2.3});
  const auto s = p.swapped();
  EXPECT_EQ(s.q1()[1], -1.8);
  EXPECT_EQ(s.e2()[0], -2.5);
  const auto r = p.repeated(3);
  EXPECT_EQ(r.size(), 6u);
  EXPECT_EQ(r.y()[4], -1.0);
}

TEST(AggregateReturns, Examples) {
  const std::vector<double> a{1, 2, 3, 4};
  EXPECT_EQ(aggregate_returns(a, 2), (std::vector<double>{3, 5, 7}));
  const std::vector<double> b{1, 2, 3};
  EXPECT_EQ(aggregate_returns(b, 1), b);
  const std::vector<double> c{0.5, -0.5, 0.5, -0.5};
  EXPECT_EQ(aggregate_returns(c, 4), (std::vector<double>{0.0}));
}

TEST(AggregateReturns, TooShort) {
  const std::vector<double> a{1, 2};
  try {
    aggregate_returns(a, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SeriesTooShort);
  }
}

TEST(AggregateReturns, OverlapDifference) {
  std::vector<double> r;
  for (int i = 0; i < 40; ++i) r.push_back(std::sin(0.7 * i) + 0.1 * i);
  const int h = 5;
  const auto out = aggregate_returns(r, h);
  for (std::size_t t = 0; t + 1 < out.size(); ++t) {
    EXPECT_NEAR(out[t + 1] - out[t], r[t + h] - r[t], 1e-12);
  }
}

TEST(ParamSpace, BindingRowsAndBounds) {
  Matrix G(4, 2);
  G << 1, 0, -1, 0, 0, 1, 0, -1;
  Vector r(4);
  r << 1, 0, 2, 2;
  const ParamSpace s(G, r);
  EXPECT_TRUE(s.is_box());
  EXPECT_DOUBLE_EQ(s.upper()(0), 1.0);
  EXPECT_DOUBLE_EQ(s.lower()(1), -2.0);
  Vector th(2);
  th << 1.0, 0.5;
  EXPECT_TRUE(s.contains(th));
  const auto rows = s.binding_rows(th);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0], 0);
  th(0) = 1.1;
  EXPECT_FALSE(s.contains(th));
}

TEST(ParamSpace, RejectsUnbounded) {
  Matrix G(1, 2);
  G << 1, 0;
  Vector r(1);
  r << 1;
  EXPECT_THROW(ParamSpace(G, r), Error);
}

TEST(SubvectorLayout, Dimensions) {
  const SubvectorLayout l{1, 1, 2, 0};
  EXPECT_EQ(l.p(), 2);
  EXPECT_EQ(l.gamma_dim(), 4);
  EXPECT_EQ(l.k(), 4);
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "encompass/enctest.hpp"
#include "oracles.hpp"

using namespace enc;

namespace {

constexpr double kQ = -1.959963984540054;
constexpr double kE = -2.337802279424906;

// y is drawn from forecast 1's conditional law; forecast 2 uses a wrong, slowly varying scale.
ForecastPanel null_panel(std::size_t T, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0, 1);
  std::vector<double> y(T), q1(T), e1(T), q2(T), e2(T);
  for (std::size_t t = 0; t < T; ++t) {
    const double s1 = 1.0 + 0.5 * std::sin(0.013 * static_cast<double>(t));
    const double s2 = 1.0 + 0.4 * std::cos(0.007 * static_cast<double>(t));
    y[t] = s1 * n(rng);
    q1[t] = s1 * kQ;
    e1[t] = s1 * kE;
    q2[t] = s2 * kQ;
    e2[t] = s2 * kE;
  }
  return build_panel(y, q1, e1, q2, e2);
}

TestReport stub(Direction d, double p) {
  TestReport r;
  r.link = LinkKind::convex;
  r.mode = TestMode::joint;
  r.direction = d;
  r.T = 100;
  r.pvalue = p;
  return r;
}

}  // namespace

TEST(WaldStat, Examples) {
  const auto hyp = hypothesis(LinkKind::nocross, TestMode::aux, Direction::one_encompasses_two);
  Vector th(3);
  th << 1.1, 0.5, 0;
  const Matrix V = Matrix::Identity(1, 1);
  EXPECT_NEAR(wald_stat(th, hyp, V, 100), 1.0, 1e-12);
  EXPECT_NEAR(wald_stat(th, hyp, V, 200), 2.0 * wald_stat(th, hyp, V, 100), 1e-12);
  th(0) = 1.0;
  EXPECT_DOUBLE_EQ(wald_stat(th, hyp, V, 100), 0.0);
}

TEST(ClassifyPair, Outcomes) {
  const auto one = Direction::one_encompasses_two, two = Direction::two_encompasses_one;
  EXPECT_EQ(classify_pair(stub(one, 0.5), stub(two, 0.01), 0.05).outcome, PairOutcome::encompassing);
  EXPECT_EQ(classify_pair(stub(one, 0.01), stub(two, 0.5), 0.05).outcome, PairOutcome::encompassed);
  EXPECT_EQ(classify_pair(stub(one, 0.01), stub(two, 0.01), 0.05).outcome, PairOutcome::combination);
  EXPECT_EQ(classify_pair(stub(one, 0.5), stub(two, 0.5), 0.05).outcome, PairOutcome::inconclusive);
  try {
    classify_pair(stub(two, 0.5), stub(one, 0.5), 0.05);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MismatchedReports);
  }
}

TEST(DefaultCov, ByHorizon) {
  EXPECT_EQ(default_cov_variant(1), CovVariant::sclsp);
  EXPECT_EQ(default_cov_variant(5), CovVariant::hac_sclsp);
}

TEST(RunTest, DirectionSymmetry) {
  const auto p = null_panel(1500, 3);
  TestOptions o;
  o.n_draws = 2000;
  o.seed = 77;
  o.fit.seed = 5;
  const auto a = run_encompassing_test(p, LinkKind::convex, TestMode::joint,
                                       Direction::two_encompasses_one, o);
  const auto b = run_encompassing_test(p.swapped(), LinkKind::convex, TestMode::joint,
                                       Direction::one_encompasses_two, o);
  EXPECT_EQ(a.direction, Direction::two_encompasses_one);
  EXPECT_EQ(a.theta_hat, b.theta_hat);
  EXPECT_EQ(a.W, b.W);
  EXPECT_EQ(a.pvalue, b.pvalue);
  EXPECT_EQ(a.crit, b.crit);
}

TEST(RunTest, DeterministicAndWellFormed) {
  const auto p = null_panel(1200, 4);
  TestOptions o;
  o.n_draws = 3000;
  const auto a = run_encompassing_test(p, LinkKind::nocross, TestMode::aux,
                                       Direction::one_encompasses_two, o);
  const auto b = run_encompassing_test(p, LinkKind::nocross, TestMode::aux,
                                       Direction::one_encompasses_two, o);
  EXPECT_EQ(a.theta_hat, b.theta_hat);
  EXPECT_EQ(a.W, b.W);
  EXPECT_EQ(a.pvalue, b.pvalue);
  EXPECT_GE(a.W, 0.0);
  EXPECT_GT(a.pvalue, 0.0);
  EXPECT_LE(a.pvalue, 1.0);
  // Smaller level, larger critical value.
  EXPECT_GE(a.crit.at(0.01), a.crit.at(0.05));
  EXPECT_GE(a.crit.at(0.05), a.crit.at(0.10));
  EXPECT_EQ(a.cov_variant, CovVariant::sclsp);
}

TEST(RunTest, HacAtHorizonOneRecordsSmallLag) {
  const auto p = null_panel(2000, 5);
  TestOptions o;
  o.n_draws = 1000;
  o.cov_variant = CovVariant::hac_sclsp;
  const auto r = run_encompassing_test(p, LinkKind::convex, TestMode::joint,
                                       Direction::one_encompasses_two, o);
  EXPECT_EQ(r.cov_variant, CovVariant::hac_sclsp);
  EXPECT_EQ(r.m_T, default_lag_bound(2000, 1));
  EXPECT_LE(r.m_T, 5);
}

TEST(RunTest, InteriorNullMatchesChiSquare) {
  TestOptions o;
  o.n_draws = 100000;
  for (int rep = 0; rep < 100; ++rep) {
    const auto p = null_panel(1000, 1000 + rep);
    o.seed = 500 + rep;
    const auto r = run_encompassing_test(p, LinkKind::linear, TestMode::joint,
                                         Direction::one_encompasses_two, o);
    ASSERT_EQ(r.cone_rows, 0);
    const double closed = 1.0 - oracle::chi2_cdf(r.W, 4);
    EXPECT_NEAR(r.pvalue, closed, 0.01) << "rep " << rep;
  }
}

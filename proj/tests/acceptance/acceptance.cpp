#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <boost/math/distributions/normal.hpp>

#include "encompass/backtest.hpp"
#include "encompass/boundary.hpp"
#include "encompass/covariance.hpp"
#include "encompass/dgp.hpp"
#include "encompass/enctest.hpp"
#include "encompass/estimation.hpp"
#include "encompass/loss.hpp"
#include "encompass/mcstudy.hpp"
#include "oracles.hpp"

using namespace enc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

constexpr double kQ = -1.959963984540054;
constexpr double kE = -2.337802279424906;

Outcome boundary_mixture() {
  const SubvectorLayout l{1, 0, 0, 0};
  Matrix g(1, 1);
  g << 1;
  const auto d = sample_wald_null(Matrix::Identity(1, 1), Matrix::Identity(1, 1), l, Cone{g, 0},
                                  Matrix::Identity(1, 1), 1000000, 1);
  const double c = d.critical_value(0.05);
  return {std::abs(c - 2.7055) <= 0.05, fmt("95%% critical value %.4f (target 2.7055 +- 0.05)", c)};
}

Outcome interior_reduction() {
  PanelDesign pd;
  pd.T = 2000;
  const auto panel = simulate_panel(pd, 42);
  std::string detail;
  bool pass = true;
  for (auto mode : {TestMode::joint, TestMode::aux}) {
    const auto link = make_link(LinkKind::linear, default_box_bound(panel), mode);
    const auto hyp = hypothesis(LinkKind::linear, mode, Direction::one_encompasses_two);
    const auto loss = LossSpec::fz0();
    const auto f = fit(link, loss, panel, 0.025);
    const auto cov = estimate_covariance(panel, link, loss, f.theta_hat, 0.025, {});
    const Cone cone = binding_cone(link, hyp, f.theta_hat, panel.size());
    const int g = link.layout.gamma_dim();
    const auto dist = sample_wald_null(leading_block(cov.bread, g), leading_block(cov.meat, g),
                                       link.layout, cone, cov.V, 100000, 7);
    const int dof = link.layout.p1;
    const double ks = oracle::ks_distance(dist.samples, [dof](double x) {
      return oracle::chi2_cdf(x, dof);
    });
    pass = pass && cone.rows() == 0 && ks < 0.01;
    detail += std::string(to_string(mode)) + " KS vs chi2(" + std::to_string(dof) +
              ") = " + fmt("%.4f", ks) + "; ";
  }
  return {pass, detail + "limit 0.01"};
}

Outcome qp_enumeration() {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0, 1);
  double worst = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int p = std::uniform_int_distribution<int>(1, 4)(rng);
    const int b = std::uniform_int_distribution<int>(1, 4)(rng);
    Matrix m(p, p), G(b, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) m(i, j) = n(rng);
    const Matrix A = m * m.transpose() + 0.1 * Matrix::Identity(p, p);
    for (int i = 0; i < b; ++i)
      for (int j = 0; j < p; ++j) G(i, j) = n(rng);
    Vector z(p);
    for (int j = 0; j < p; ++j) z(j) = 2 * n(rng);
    const Vector x = solve_cone_qp(A, z, Cone{G, 0});
    const Vector ref = oracle::cone_qp_enumerate(A, z, G);
    worst = std::max(worst, (x - ref).lpNorm<Eigen::Infinity>() / (1 + z.norm()));
  }
  return {worst < 1e-9, fmt("max deviation from enumeration %.2e over 1000 instances", worst)};
}

Outcome score_consistency() {
  const auto L = LossSpec::fz0();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  const double h = 1e-6;
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const double a = 0.01 + 0.2 * u(rng);
    const double q = -0.5 - 3 * u(rng), e = q - 0.05 - 2 * u(rng);
    double y = q + (u(rng) - 0.5) * 6;
    if (std::abs(y - q) < 1e-3) y = q - 1;
    Vector gq(2), ge(2);
    gq << 1, 0;
    ge << 0, 1;
    const Vector s = psi(L, y, q, e, gq, ge, a);
    const double dq = oracle::central_difference([&](double x) { return rho(L, y, x, e, a); }, q, h);
    const double de = oracle::central_difference([&](double x) { return rho(L, y, q, x, a); }, e, h);
    worst = std::max(worst, std::abs(s(0) - dq) / std::max(1.0, std::abs(dq)));
    worst = std::max(worst, std::abs(s(1) - de) / std::max(1.0, std::abs(de)));
  }
  return {worst < 1e-5, fmt("max relative error %.2e over 1000 points", worst)};
}

ExperimentDesign study_design() {
  ExperimentDesign d;
  d.dgp.kind = DesignKind::garch_normal;
  d.T_grid = {2000};
  d.n_reps = 500;
  d.level = 0.05;
  d.cov_variant = CovVariant::sclsp;
  d.master_seed = 1;
  d.threads = 0;
  return d;
}

Outcome empirical_size() {
  auto d = study_design();
  d.pi_grid = {0.0, 1.0};
  d.links = {LinkKind::convex};
  const auto t = size_power_experiment(d);
  bool pass = true;
  std::string detail;
  for (auto dir : {Direction::one_encompasses_two, Direction::two_encompasses_one}) {
    const Cell* c = t.null_cell(2000, LinkKind::convex, TestMode::joint, dir);
    if (c == nullptr) return {false, "missing null cell"};
    pass = pass && c->rejection >= 0.025 && c->rejection <= 0.09;
    detail += std::string(to_string(dir)) + " size " + fmt("%.3f", c->rejection) + " (se " +
              fmt("%.3f", c->stderr_) + ", failures " + std::to_string(c->failures) + "); ";
  }
  return {pass, detail + "band [0.025, 0.09]"};
}

Outcome power_shape() {
  auto d = study_design();
  d.pi_grid = {0.0, 0.3, 0.5, 0.7};
  d.links = {LinkKind::linear, LinkKind::convex, LinkKind::nocross};
  d.directions = {Direction::one_encompasses_two};
  const auto t = size_power_experiment(d);
  auto cell = [&](LinkKind k, std::size_t i) {
    return t.find(2000, k, TestMode::joint, Direction::one_encompasses_two, i);
  };
  auto adjusted = [&](LinkKind k, std::size_t i) {
    return size_adjusted_power(cell(k, 0)->valid_pvalues(), cell(k, i)->valid_pvalues(), 0.05);
  };
  bool pass = true;
  std::ostringstream detail;
  const double size0 = cell(LinkKind::convex, 0)->rejection;
  const double adj5 = adjusted(LinkKind::convex, 2).power;
  pass = pass && adj5 - size0 >= 0.20;
  detail << "convex adjusted power(0.5) " << fmt("%.3f", adj5) << " vs size " << fmt("%.3f", size0)
         << "; ";
  for (std::size_t i = 1; i <= 3; ++i) {
    const auto n_lin = static_cast<double>(cell(LinkKind::linear, i)->n_ok);
    const double lin = adjusted(LinkKind::linear, i).power;
    detail << "pi=" << d.pi_grid[i] << " linear " << fmt("%.3f", lin);
    for (auto k : {LinkKind::convex, LinkKind::nocross}) {
      const double p = adjusted(k, i).power;
      const auto n = static_cast<double>(cell(k, i)->n_ok);
      const double se = std::sqrt(p * (1 - p) / n + lin * (1 - lin) / n_lin);
      pass = pass && p >= lin - 2 * se;
      detail << ' ' << to_string(k) << ' ' << fmt("%.3f", p);
    }
    detail << "; ";
  }
  return {pass, detail.str()};
}

Outcome wong_so() {
  const auto g = GarchSpec::reference_garch();
  const double var = 0.9;
  const auto [aq, ae] = onestep_var_es(Innovation::normal(), 0.025, std::sqrt(var));
  std::vector<double> qs, es;
  for (int rep = 0; rep < 30; ++rep) {
    const auto [q, e] = wong_so_forecast(g, var, 1, ForecastKind::ahead, 100000, 0.025, 1000 + rep);
    qs.push_back(q);
    es.push_back(e);
  }
  const double sq = std::sqrt(oracle::variance(qs)), se = std::sqrt(oracle::variance(es));
  const auto [q, e] = wong_so_forecast(g, var, 1, ForecastKind::ahead, 100000, 0.025, 1);
  const double zq = std::abs(q - aq) / sq, ze = std::abs(e - ae) / se;
  return {zq < 3 && ze < 3,
          fmt("VaR off by %.2f se, ", zq) + fmt("ES off by %.2f se (limit 3)", ze)};
}

Outcome hac_properties() {
  const auto loss = LossSpec::fz0();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> n(0, 1);
  // PSD on fuzz inputs.
  bool psd = true;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t T = 100 + static_cast<std::size_t>(u(rng) * 400);
    std::vector<double> y(T), q1(T), e1(T), q2(T), e2(T);
    for (std::size_t t = 0; t < T; ++t) {
      y[t] = n(rng) * (0.5 + u(rng));
      q1[t] = -0.5 - 2 * u(rng);
      e1[t] = q1[t] - 0.1 - u(rng);
      q2[t] = -0.5 - 2 * u(rng);
      e2[t] = q2[t] - 0.1 - u(rng);
    }
    const auto p = build_panel(y, q1, e1, q2, e2);
    for (auto kind : {LinkKind::linear, LinkKind::convex, LinkKind::nocross}) {
      const auto link = make_link(kind, 100);
      Vector th = link.theta_star;
      th(0) = u(rng);
      for (auto v : {CovVariant::op, CovVariant::sclsp, CovVariant::hac_op, CovVariant::hac_sclsp}) {
        const Matrix I = hac(p, link, loss, th, 0.025, v, static_cast<int>(u(rng) * 10));
        Eigen::SelfAdjointEigenSolver<Matrix> es(I);
        psd = psd && es.eigenvalues().minCoeff() >= 0.0 && I.isApprox(I.transpose());
      }
    }
  }

  // Lag-1 autocovariance of the ES-intercept score for two-day overlapping sums. One panel
  // gives ~10% relative noise at T = 10^5, so the estimator is averaged over 20 panels.
  const std::size_t T = 100000;
  const double s = std::sqrt(2.0), a = 0.025;
  const auto link = make_link(LinkKind::convex, 100);
  boost::math::normal std_n;
  const double corr = 0.5, sd = std::sqrt(1 - corr * corr);
  double m12 = 0;
  const int N = 20000;
  const double lo = -10.0, step = (kQ - lo) / N;
  for (int i = 0; i < N; ++i) {
    const double z1 = lo + (i + 0.5) * step;
    const double k = (kQ - corr * z1) / sd;
    m12 += (kQ - z1) *
           ((kQ - corr * z1) * boost::math::cdf(std_n, k) + sd * boost::math::pdf(std_n, k)) *
           boost::math::pdf(std_n, z1) * step;
  }
  const double m1 = a * (kQ - kE), w = 1.0 / (s * kE * s * kE * a);
  const double analytic = w * w * 2.0 * (m12 - m1 * m1);
  const int m = 5, reps = 20;
  double lag1 = 0, captured = 0;
  for (int rep = 0; rep < reps; ++rep) {
    std::vector<double> r(T + 1);
    for (auto& v : r) v = n(rng);
    const auto y = aggregate_returns(r, 2);
    std::vector<double> q1(T, s * kQ), e1(T, s * kE), q2(T, 1.3 * s * kQ), e2(T, 1.3 * s * kE);
    const auto p = build_panel(y, q1, e1, q2, e2, 2, ForecastKind::aggregate);
    const auto S = score_matrix(make_design(link, p), loss, p.y(), link.theta_star, a);
    lag1 += estimate_meat_op(S, 1)(2, 2) / reps;
    const Matrix I = hac(p, link, loss, link.theta_star, a, CovVariant::hac_op, m);
    captured += (I(2, 2) - estimate_meat_op(S, 0)(2, 2)) / reps;
  }
  const double lag_err = std::abs(lag1 - analytic) / analytic;
  const double expected_lags = 2 * bartlett_weight(1, m) * analytic;
  const double hac_err = std::abs(captured - expected_lags) / expected_lags;

  // scl-sp against the outer product under a location-scale panel.
  std::vector<double> ys(T), a1(T), b1(T), a2(T), b2(T);
  for (std::size_t t = 0; t < T; ++t) {
    const double sc = 1.0 + 0.5 * std::sin(0.01 * static_cast<double>(t));
    ys[t] = sc * n(rng);
    a1[t] = sc * kQ;
    b1[t] = sc * kE;
    a2[t] = 1.4 * sc * kQ;
    b2[t] = 1.4 * sc * kE;
  }
  const auto ls = build_panel(ys, a1, b1, a2, b2);
  const auto Sl = score_matrix(make_design(link, ls), loss, ls.y(), link.theta_star, a);
  const Matrix op = estimate_meat_op(Sl, 0);
  const Matrix sc = estimate_meat_sclsp(ls, link, loss, link.theta_star, a);
  const double frob = (sc - op).norm() / op.norm();

  return {psd && lag_err < 0.10 && hac_err < 0.10 && frob < 0.05,
          std::string(psd ? "PSD on all fuzz inputs" : "non-PSD output found") +
              fmt("; lag-1 relative error %.3f", lag_err) +
              fmt(", HAC lag terms relative error %.3f (limit 0.10)", hac_err) +
              fmt("; scl-sp Frobenius gap %.3f (limit 0.05)", frob)};
}

Outcome no_crossing() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1), f(-6, 2);
  const auto s = make_link(LinkKind::nocross, 50);
  int bad = 0;
  for (int i = 0; i < 10000; ++i) {
    Vector th(3);
    th << u(rng), u(rng), (u(rng) - 0.5) * 100;
    const double q1 = f(rng), q2 = f(rng);
    const double e1 = q1 - 3 * u(rng), e2 = q2 - 3 * u(rng);
    const auto v = eval_link(s, th, q1, q2, e1, e2);
    bad += v.gq >= v.ge ? 0 : 1;
  }
  return {bad == 0, std::to_string(bad) + " crossings in 10000 draws"};
}

Outcome dgp_calibration() {
  const auto g = simulate_garch(GarchSpec::reference_garch(), 1000000, 1000, 10);
  const auto j = simulate_garch(GarchSpec::reference_gjr(), 1000000, 1000, 11);
  const auto x = sample_skew_t(0.8, 5, 1000000, 12);
  const double vg = oracle::variance(g.returns), vj = oracle::variance(j.returns);
  const double mx = oracle::mean(x), vx = oracle::variance(x);
  const double se = std::sqrt(vx / static_cast<double>(x.size()));
  const bool pass = std::abs(vg / 0.8 - 1) < 0.03 && std::abs(vj / 0.4 - 1) < 0.03 &&
                    std::abs(mx) < 3 * se && std::abs(vx - 1) < 0.01;
  return {pass, fmt("GARCH-N var %.4f (0.8)", vg) + fmt(", GJR-N var %.4f (0.4)", vj) +
                    fmt(", skew-t mean %.5f", mx) + fmt(" var %.4f", vx)};
}

Outcome backtest_calibration() {
  std::mt19937_64 rng(13);
  std::bernoulli_distribution b(0.025);
  int uc = 0, cc = 0;
  std::vector<int> h(10000);
  for (int r = 0; r < 1000; ++r) {
    for (auto& v : h) v = b(rng) ? 1 : 0;
    const auto x = static_cast<std::size_t>(std::count(h.begin(), h.end(), 1));
    uc += kupiec_uc(x, h.size(), 0.025) < 0.05 ? 1 : 0;
    cc += christoffersen_cc(h, 0.025) < 0.05 ? 1 : 0;
  }
  const double ru = uc / 1000.0, rc = cc / 1000.0;
  return {ru >= 0.03 && ru <= 0.07 && rc >= 0.03 && rc <= 0.07,
          fmt("UC rejection %.3f", ru) + fmt(", CC rejection %.3f (band [0.03, 0.07])", rc)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_in(const fs::path& dir, const std::string& args) {
  const std::string cmd =
      "cd '" + dir.string() + "' && '" ENCOMPASS_CLI_PATH "' " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("encompass_accept_" + std::to_string(::getpid()));
  fs::remove_all(root);
  bool pass = true;
  std::string detail;
  for (const char* run : {"a", "b"}) {
    const fs::path dir = root / run;
    fs::create_directories(dir);
    pass = pass && run_in(dir, "simulate --T 1500 --pi 0.4 --seed 5 --output panel.csv") == 0;
    pass = pass && run_in(dir,
                          "encompass --input panel.csv --output report.json --fitted fitted.csv "
                          "--n_draws 2000 --seed 17") == 0;
    pass = pass && run_in(dir,
                          "mc --pi_grid 0,0.5,1 --T_grid 300 --links convex,nocross --n_reps 3 "
                          "--n_draws 500 --ils_rounds 3 --seed 23 --out_dir mc") == 0;
  }
  if (!pass) {
    fs::remove_all(root);
    return {false, "a command failed"};
  }
  int compared = 0, differing = 0;
  for (const char* f : {"panel.csv", "report.json", "fitted.csv", "mc/size.csv", "mc/power.csv",
                        "mc/adjusted_power.csv", "mc/manifest.json"}) {
    const std::string a = slurp(root / "a" / f), b = slurp(root / "b" / f);
    ++compared;
    if (a.empty() || a != b) {
      ++differing;
      detail += std::string(f) + " differs; ";
    }
  }
  fs::remove_all(root);
  return {differing == 0,
          detail + std::to_string(compared - differing) + "/" + std::to_string(compared) +
              " output files byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "boundary null law", 60, boundary_mixture},
      {2, "interior reduction to chi-square", 60, interior_reduction},
      {3, "QP solver vs enumeration", 10, qp_enumeration},
      {4, "score vs finite differences", 5, score_consistency},
      {5, "empirical size", 1800, empirical_size},
      {6, "power shape", 3600, power_shape},
      {7, "Wong-So one-step equivalence", 60, wong_so},
      {8, "HAC properties", 300, hac_properties},
      {9, "no-crossing invariant", 1, no_crossing},
      {10, "DGP calibration", 60, dgp_calibration},
      {11, "backtest calibration", 60, backtest_calibration},
      {12, "end-to-end determinism", 600, determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && only.count(c.id) == 0) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.time_limit_s;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::cout << (pass ? "PASS" : "FAIL") << "  #" << c.id << ' ' << c.name << ": " << o.detail
              << fmt(" [%.1fs", secs) << fmt(", limit %.0fs]", c.time_limit_s)
              << (in_time ? "" : " over time limit") << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

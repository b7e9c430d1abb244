#include <benchmark/benchmark.h>

#include <random>

#include "encompass/boundary.hpp"
#include "encompass/covariance.hpp"
#include "encompass/dgp.hpp"
#include "encompass/estimation.hpp"
#include "encompass/loss.hpp"

using namespace enc;

namespace {

ForecastPanel panel(std::size_t T) {
  PanelDesign d;
  d.T = T;
  d.pi = 0.3;
  return simulate_panel(d, 1);
}

}  // namespace

static void BM_SampleObjective(benchmark::State& state) {
  const auto p = panel(static_cast<std::size_t>(state.range(0)));
  const auto link = make_link(LinkKind::convex, default_box_bound(p));
  const auto loss = LossSpec::fz0();
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_objective(link, loss, p, link.theta_star, 0.025));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleObjective)->Arg(1000)->Arg(5000);

static void BM_Fit(benchmark::State& state) {
  const auto p = panel(2000);
  const auto kind = static_cast<LinkKind>(state.range(0));
  const auto link = make_link(kind, default_box_bound(p));
  const auto loss = LossSpec::fz0();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit(link, loss, p, 0.025).objective);
  }
  state.SetLabel(to_string(kind));
}
BENCHMARK(BM_Fit)
    ->Arg(static_cast<int>(LinkKind::linear))
    ->Arg(static_cast<int>(LinkKind::convex))
    ->Arg(static_cast<int>(LinkKind::nocross))
    ->Unit(benchmark::kMillisecond);

static void BM_Covariance(benchmark::State& state) {
  const auto p = panel(2000);
  const auto link = make_link(LinkKind::convex, default_box_bound(p));
  const auto loss = LossSpec::fz0();
  CovOptions o;
  o.variant = static_cast<CovVariant>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_covariance(p, link, loss, link.theta_star, 0.025, o).V);
  }
  state.SetLabel(to_string(o.variant));
}
BENCHMARK(BM_Covariance)
    ->Arg(static_cast<int>(CovVariant::op))
    ->Arg(static_cast<int>(CovVariant::sclsp))
    ->Arg(static_cast<int>(CovVariant::hac_sclsp));

static void BM_ConeQp(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0, 1);
  const int p = static_cast<int>(state.range(0));
  Matrix m(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) m(i, j) = n(rng);
  const Matrix A = m * m.transpose() + Matrix::Identity(p, p);
  const Cone cone{Matrix::Identity(p, p), 0};
  std::vector<Vector> zs(256, Vector(p));
  for (auto& z : zs)
    for (int j = 0; j < p; ++j) z(j) = n(rng);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_cone_qp(A, zs[i++ % zs.size()], cone));
  }
}
BENCHMARK(BM_ConeQp)->Arg(1)->Arg(2)->Arg(4);

static void BM_WaldNull(benchmark::State& state) {
  const SubvectorLayout l{2, 0, 2, 0};
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0, 1);
  Matrix m(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = n(rng);
  const Matrix B = m * m.transpose() + Matrix::Identity(4, 4);
  const Matrix Bi = B.inverse();
  const Matrix V = (Bi * B * Bi).topLeftCorner(2, 2);
  const Cone cone{Matrix::Identity(2, 2), 0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sample_wald_null(B, B, l, cone, V, static_cast<std::size_t>(state.range(0)), 4).samples);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WaldNull)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

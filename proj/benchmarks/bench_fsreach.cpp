#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "fsreach/occupancy.hpp"
#include "fsreach/occupyset.hpp"
#include "fsreach/oracle.hpp"
#include "fsreach/scenario.hpp"

namespace {

using namespace fsreach;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

dyn::DpvModel planar_model() {
  dyn::DpvModel m;
  m.n = 2;
  m.m = 0;
  m.p = 2;
  m.horizon = 1;
  m.A = [](const VectorXd&) { return MatrixXd::Identity(2, 2); };
  m.F = [](const VectorXd&) { return MatrixXd::Identity(2, 2); };
  MatrixXd cov(2, 2);
  cov << 11.62, 0.59, 0.59, 3.75;
  m.disturbance = {VectorXd::Zero(2), cov};
  return m;
}

fsr::GaussianState planar_state() {
  return fsr::fsr_gaussian_dpv(planar_model(), dyn::constant_trajectory(1), 1,
                               Vector2d(2, 2));
}

const geom::ConvexShape kBox{geom::Box{VectorXd::Zero(2), Vector2d(20, 20)}};
const geom::ConvexShape kBall{geom::Ball{VectorXd::Zero(2), 0.2}};

void BM_phi_box(benchmark::State& state) {
  const auto g = planar_state();
  const VectorXd y = Vector2d(5, 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(occupancy::phi_point(g, kBox, y, 1e-6).value);
}
BENCHMARK(BM_phi_box);

void BM_phi_ball(benchmark::State& state) {
  const auto g = planar_state();
  const VectorXd y = Vector2d(3, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(occupancy::phi_point(g, kBall, y, 1e-6).value);
}
BENCHMARK(BM_phi_ball);

void BM_phi_max_triangle(benchmark::State& state) {
  const auto g = planar_state();
  MatrixXd tri(2, 3);
  tri << 0, 4, 1, 0, 1, 3;
  const geom::ConvexShape skew{geom::VPolytope{tri}};
  for (auto _ : state)
    benchmark::DoNotOptimize(occupancy::phi_max(g, skew, 1e-6).value.value);
}
BENCHMARK(BM_phi_max_triangle);

void BM_occupyset_projection(benchmark::State& state) {
  const auto g = planar_state();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        occupyset::occupyset_projection(g, kBox, 0.001, 1).inner.V.cols());
}
BENCHMARK(BM_occupyset_projection)->Unit(benchmark::kMillisecond);

void BM_occupyset_minkowski(benchmark::State& state) {
  const auto g = planar_state();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        occupyset::occupyset_minkowski(g, kBox, 0.001, 1).outer.b.size());
}
BENCHMARK(BM_occupyset_minkowski)->Unit(benchmark::kMillisecond);

void BM_dmsp_cover(benchmark::State& state) {
  const char* chain = state.range(0) == 0 ? "uniform" : "forward-biased";
  const auto sc = scenario::builtin_unicycle_scenario(chain);
  const dyn::DmspModel model = scenario::build_dmsp(sc.model);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        occupyset::dmsp_cover(model, kBall, 0.01, 15, Vector2d(10, 10),
                              "minkowski")
            .pieces.size());
}
BENCHMARK(BM_dmsp_cover)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_oracle_sampling(benchmark::State& state) {
  const auto m = planar_model();
  const auto traj = dyn::constant_trajectory(1);
  const int Ns = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        oracle::sample_trajectories_dpv(m, traj, 1, Vector2d(2, 2), Ns, 1)
            .points.sum());
  state.SetItemsProcessed(state.iterations() * Ns);
}
BENCHMARK(BM_oracle_sampling)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_oracle_grid(benchmark::State& state) {
  const auto m = planar_model();
  const auto traj = dyn::constant_trajectory(1);
  const auto g = planar_state();
  const int Ns = static_cast<int>(state.range(0));
  const auto samples =
      oracle::sample_trajectories_dpv(m, traj, 1, Vector2d(2, 2), Ns, 1);
  Vector2d lo, hi;
  oracle::default_grid_extent({g}, kBox, lo, hi);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        oracle::estimate_phi_grid(samples, kBox, lo, hi, 200, 200)
            .phi_hat.sum());
  state.SetItemsProcessed(state.iterations() * Ns);
}
BENCHMARK(BM_oracle_grid)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

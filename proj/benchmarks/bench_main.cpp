#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include <nscbf/controller.hpp>
#include <nscbf/optimizer.hpp>
#include <nscbf/safety.hpp>
#include <nscbf/simulation.hpp>

namespace {

using namespace nscbf;

SafeController example_controller() {
  Mat a(2, 2);
  a << 0, 1, -1, -1;
  const RectangleObstacleSpec spec{make_vec({2, -1}),
                                   {make_vec({1, -1}), make_vec({3, -1}), make_vec({2, -2}),
                                    make_vec({2, 0})},
                                   0.5};
  return SafeController(from_rectangle(spec).barrier, LinearInclusion(a, Mat::Identity(2, 2)),
                        SmoothingParams{});
}

std::vector<Vec> states_near_obstacle(int count) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> x1(-0.5, 4.5), x2(-3.5, 1.5);
  std::vector<Vec> out;
  for (int k = 0; k < count; ++k) out.push_back(make_vec({x1(rng), x2(rng)}));
  return out;
}

void BM_SolveQp(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ur(-1.0, 1.0);
  std::vector<QuadraticProgram> qps;
  for (int t = 0; t < 64; ++t) {
    ConstraintSystem c(Box::symmetric(2, 5.0));
    for (int k = 0; k < state.range(0); ++k) c.add_row(make_vec({ur(rng), ur(rng)}), 1.0 + ur(rng));
    qps.emplace_back(Mat::Identity(2, 2), make_vec({10 * ur(rng), 10 * ur(rng)}), c);
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_qp(qps[i++ % qps.size()]).objective);
  }
}
BENCHMARK(BM_SolveQp)->Arg(0)->Arg(4)->Arg(8);

void BM_KappaStar(benchmark::State& state) {
  const SafeController ctrl = example_controller();
  const std::vector<Vec> xs = states_near_obstacle(256);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kappa_star(ctrl, xs[i++ % xs.size()]));
  }
}
BENCHMARK(BM_KappaStar);

void BM_GEval(benchmark::State& state) {
  const SafeController ctrl = example_controller();
  const std::vector<Vec> xs = states_near_obstacle(256);
  const Vec u = make_vec({0.3, -0.7});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(g_eval(ctrl.barrier(), ctrl.system(), xs[i++ % xs.size()], u));
  }
}
BENCHMARK(BM_GEval);

void BM_SimulateOneSecond(benchmark::State& state) {
  const SafeController ctrl = example_controller();
  const IntegratorConfig cfg{1e-3, 1.0, Scheme::kRk4};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        simulate(ctrl, DisturbancePolicy::none(), make_vec({-1.0, 0.5}), cfg).size());
  }
}
BENCHMARK(BM_SimulateOneSecond)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

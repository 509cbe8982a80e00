#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "oulab/mc.hpp"
#include "oulab/rng.hpp"
#include "oulab/solver.hpp"
#include "oulab/spectral_gaussian.hpp"

namespace {

void bm_counter_normal(benchmark::State& state) {
  const oulab::rng::CounterStream stream{42};
  std::uint64_t step = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stream.normal(7, step++, 0));
  }
}
BENCHMARK(bm_counter_normal);

void bm_ou_step(benchmark::State& state) {
  const auto measure = oulab::SpectralGaussian::inverse_pi_sq(static_cast<int>(state.range(0)));
  std::vector<double> x(static_cast<size_t>(state.range(0)), 0.1);
  std::vector<double> noise(x.size(), 0.3);
  for (auto _ : state) {
    oulab::ou_step(measure, x, 1e-3, noise);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_ou_step)->Arg(1)->Arg(6)->Arg(50);

void bm_gauss_hermite(benchmark::State& state) {
  std::vector<double> nodes, weights;
  for (auto _ : state) {
    oulab::gauss_hermite(static_cast<int>(state.range(0)), nodes, weights);
    benchmark::DoNotOptimize(nodes.data());
  }
}
BENCHMARK(bm_gauss_hermite)->Arg(8)->Arg(32);

void bm_solve_interval(benchmark::State& state) {
  const auto measure = oulab::SpectralGaussian::make({1.0});
  const auto domain = oulab::LevelSetDomain::sphere({0.0}, 1.0, 0.5);
  oulab::GridSpec spec;
  spec.resolution = static_cast<int>(state.range(0));
  auto grid = std::make_shared<const oulab::GridDomain>(oulab::discretize(measure, domain, spec));
  const std::vector<double> f(grid->size(), 1.0);
  for (auto _ : state) {
    auto sol = oulab::solve_dirichlet(measure, grid, f, 1.0);
    benchmark::DoNotOptimize(sol.u.data());
  }
}
BENCHMARK(bm_solve_interval)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void bm_resolvent_mc(benchmark::State& state) {
  const auto measure = oulab::SpectralGaussian::make({1.0});
  const auto domain = oulab::LevelSetDomain::sphere({0.0}, 1.0, 0.5);
  oulab::PathConfig cfg;
  cfg.paths = state.range(0);
  cfg.step = 1e-2;
  cfg.t_max = 6.0;
  cfg.seed = 9;
  const std::vector<double> x0{0.0};
  const auto one = [](std::span<const double>) { return 1.0; };
  for (auto _ : state) {
    auto est = oulab::resolvent_mc(measure, domain, one, 1.0, x0, cfg);
    benchmark::DoNotOptimize(est.estimate);
  }
}
BENCHMARK(bm_resolvent_mc)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

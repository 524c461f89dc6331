// Serial reference vs OpenMP kernels on simulated walks.

#include <benchmark/benchmark.h>

#include <map>

#include "pdr/dual.hpp"
#include "pdr/sim.hpp"
#include "pdr/zvd.hpp"

namespace {

using namespace pdr;

const SimResult& walk(double length) {
  static std::map<double, SimResult> cache;
  auto it = cache.find(length);
  if (it == cache.end()) {
    GaitSpec spec;
    spec.route = straight_route(length);
    spec.noise = {0.02, 0.002, 0.05, 0.003};
    spec.mount_yaw2 = 0.3;
    it = cache.emplace(length, generate(spec)).first;
  }
  return it->second;
}

template <auto Kernel>
void statistics(benchmark::State& state) {
  const ImuLog& log = walk(static_cast<double>(state.range(0))).log1;
  const ZuptDetector det;
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(log, det));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(log.size()));
}

std::vector<Vec3> head(const Trajectory& t, std::size_t n) {
  return {t.points.begin(), t.points.begin() + static_cast<std::ptrdiff_t>(std::min(n, t.size()))};
}

template <auto Kernel>
void yaw_search(benchmark::State& state) {
  const SimResult& sim = walk(60.0);
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::vector<Vec3> a = head(sim.truth.leg_frame(1), n), b = head(sim.truth.leg_frame(2), n);
  const std::vector<double> yaws = yaw_candidates(1.0);
  const std::size_t band = 16;
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a, b, yaws, band));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(yaws.size()));
}

}  // namespace

BENCHMARK(statistics<pdr::compute_statistics_serial>)->Name("zupt_statistics/serial")->Arg(20)->Arg(100)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(statistics<pdr::compute_statistics>)->Name("zupt_statistics/openmp")->Arg(20)->Arg(100)
    ->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(yaw_search<pdr::yaw_distances_serial>)->Name("yaw_distances/serial")->Arg(500)->Arg(2000)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(yaw_search<pdr::yaw_distances>)->Name("yaw_distances/openmp")->Arg(500)->Arg(2000)
    ->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();

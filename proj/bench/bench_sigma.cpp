// One averaging step: OpenMP kernel against the serial reference.

#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <random>

#include "harmavg/averaging.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace harmavg;

namespace {

struct Instance {
  std::shared_ptr<const Lattice> lattice;
  std::unique_ptr<StencilSet> stencils;
  GridField field;
  BoundaryValues boundary;
};

// Stencil sets are built once per grid size and reused across benchmarks.
const Instance& instance(int n) {
  static std::map<int, Instance> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const Domain disk = Domain::ball(2, {0, 0, 0}, 1.0);
  auto lat = Lattice::make(disk, GridSpec::fit(disk, {n, n, 1}));
  RadiusSpec radius;
  radius.fraction = 0.5;
  QuadratureSpec quad;
  quad.samples_per_axis = 16;
  auto st = std::make_unique<StencilSet>(lat, radius, quad);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridField f = GridField::sample(lat, [&](const Point&) { return u(rng); });
  BoundaryValues b = BoundaryValues::from_field(f);
  return cache.emplace(n, Instance{lat, std::move(st), std::move(f), std::move(b)}).first->second;
}

void set_counters(benchmark::State& state, const Instance& in) {
  const double points = static_cast<double>(in.stencils->size()) *
                        static_cast<double>(in.stencils->quadrature().size());
  state.counters["nodes"] = static_cast<double>(in.stencils->size());
  state.counters["points/s"] =
      benchmark::Counter(points, benchmark::Counter::kIsIterationInvariantRate);
#ifdef _OPENMP
  state.counters["threads"] = omp_get_max_threads();
#else
  state.counters["threads"] = 1;
#endif
}

void BM_apply_sigma(benchmark::State& state) {
  const Instance& in = instance(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    GridField out = apply_sigma(in.field, *in.stencils, in.boundary);
    benchmark::DoNotOptimize(out.values().data());
  }
  set_counters(state, in);
}

void BM_apply_sigma_reference(benchmark::State& state) {
  const Instance& in = instance(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    GridField out = apply_sigma_reference(in.field, *in.stencils, in.boundary);
    benchmark::DoNotOptimize(out.values().data());
  }
  set_counters(state, in);
}

}  // namespace

BENCHMARK(BM_apply_sigma)->Arg(65)->Arg(129)->Arg(257)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_apply_sigma_reference)->Arg(65)->Arg(129)->Arg(257)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

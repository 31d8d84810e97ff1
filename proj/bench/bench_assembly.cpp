#include <benchmark/benchmark.h>

#include <random>

#include "degmin/assembly.hpp"

using namespace degmin;

namespace {

struct Fixture {
  Mesh mesh;
  RegularizedPotential pot;
  std::vector<double> v;

  explicit Fixture(double h)
      : mesh(triangulate(DomainSpec::disk(1.0), h)),
        pot(build_regularized(make_eikonal(), 0.05)) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    v.resize(mesh.vertices.size(), 0.0);
    for (int i = 0; i < mesh.num_vertices(); ++i) {
      if (!mesh.boundary[i]) v[i] = dist(rng);
    }
  }
};

void BM_assembly_parallel(benchmark::State& state) {
  Fixture fx(1.0 / state.range(0));
  EnergyAssembler assembler(fx.pot, fx.mesh);
  std::vector<double> grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(assembler.energy_and_gradient(fx.v, grad));
  }
  state.SetLabel(std::to_string(fx.mesh.vertices.size()) + " vertices");
}

void BM_assembly_serial(benchmark::State& state) {
  Fixture fx(1.0 / state.range(0));
  EnergyAssembler assembler(fx.pot, fx.mesh);
  std::vector<double> grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(assembler.energy_and_gradient_serial(fx.v, grad));
  }
  state.SetLabel(std::to_string(fx.mesh.vertices.size()) + " vertices");
}

}  // namespace

BENCHMARK(BM_assembly_parallel)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_assembly_serial)->Arg(32)->Arg(64)->Arg(128);

BENCHMARK_MAIN();

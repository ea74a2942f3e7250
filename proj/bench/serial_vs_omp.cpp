// Serial reference vs OpenMP paths for the three hot loops.
#include <benchmark/benchmark.h>

#include "polx/kernel.hpp"
#include "polx/mcoracle.hpp"
#include "polx/source.hpp"
#include "polx/transport.hpp"

using namespace polx;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::Parallel : Exec::Serial; }

const SpectralMedium& medium() {
  static const SpectralMedium m = SpectralMedium::gaussian(1.0, kTwoPi / 17, kTwoPi / 17);
  return m;
}

void BM_KernelAssembly(benchmark::State& state) {
  auto grid = std::make_shared<const DirectionGrid>(DirectionGrid::polar(16, 8, 0.5));
  KernelFieldOptions o;
  o.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_kernel_field(medium(), grid, o));
}

void BM_TransportApply(benchmark::State& state) {
  static const auto grid =
      std::make_shared<const DirectionGrid>(DirectionGrid::cartesian(0.0125, 0.3));
  static const ScatteringKernelField kf = [] {
    KernelFieldOptions o;
    o.radial_table = 32;
    return assemble_kernel_field(medium(), grid, o);
  }();
  TransportOptions to;
  to.reduced = false;
  static const TransportOperator op(medium(), kf, to);
  SourceSpec src;
  src.kind = SourceKind::AnisotropicGaussianTMPower;
  const std::vector<H2> s = op.reduce(initial_field(grid, src));
  std::vector<H2> out;
  const Exec e = exec_of(state);
  for (auto _ : state) {
    op.apply(s, out, e);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_McEnsemble(benchmark::State& state) {
  const auto m = SpectralMedium::gaussian(1.0, kTwoPi / 10, kTwoPi / 10);
  EnsembleConfig c;
  c.epsilon = 1e-2;
  c.n_realizations = 8;
  c.n_records = 4;
  c.exec = exec_of(state);
  const MCLattice lat = make_mc_lattice(m, c);
  const std::vector<Vec2c> a0(lat.size(), Vec2c(1.0, 0.0));
  for (auto _ : state)
    benchmark::DoNotOptimize(ensemble_moments(m, c, lat, a0, c.epsilon / (20 * m.gamma()), 0.04));
}

}  // namespace

BENCHMARK(BM_KernelAssembly)->ArgName("omp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TransportApply)->ArgName("omp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_McEnsemble)->ArgName("omp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

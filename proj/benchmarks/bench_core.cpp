#include <benchmark/benchmark.h>

#include "censwald/data.hpp"
#include "censwald/estimator.hpp"
#include "censwald/influence.hpp"
#include "censwald/varest.hpp"

using namespace censwald;

namespace {

Vec weibull_theta() { return (Vec(2) << 2.0, 5.0).finished(); }

CensoredSample reference_sample(std::size_t n) {
  SyntheticDesign d;
  d.lifetime = {FamilyId::Weibull, weibull_theta()};
  d.censoring_mean = censoring_mean_for_rate(d.lifetime, 0.1);
  d.seed = 1;
  return simulate(d, n, 0);
}

}  // namespace

static void BM_WeightedIntegralsWeibull(benchmark::State& state) {
  const double alpha = static_cast<double>(state.range(0)) / 10.0;
  const Vec th = weibull_theta();
  for (auto _ : state) benchmark::DoNotOptimize(weibull_family().weighted_integrals(th, alpha));
}
BENCHMARK(BM_WeightedIntegralsWeibull)->Arg(0)->Arg(5)->Arg(10);

static void BM_FitWeibull(benchmark::State& state) {
  const CensoredSample s = reference_sample(static_cast<std::size_t>(state.range(0)));
  FitConfig c;
  c.alpha = 0.5;
  c.n_multistart = 0;
  for (auto _ : state) benchmark::DoNotOptimize(fit(s, weibull_family(), c));
}
BENCHMARK(BM_FitWeibull)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_FitWeibullMultistart(benchmark::State& state) {
  const CensoredSample s = reference_sample(100);
  FitConfig c;
  c.alpha = 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(fit(s, weibull_family(), c));
}
BENCHMARK(BM_FitWeibullMultistart)->Unit(benchmark::kMillisecond);

static void BM_GammaTables(benchmark::State& state) {
  const CensoredSample s = reference_sample(static_cast<std::size_t>(state.range(0)));
  std::vector<double> phi(s.size(), 1.0);
  for (auto _ : state) {
    GammaTables g(s);
    benchmark::DoNotOptimize(g.u_hat(phi));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GammaTables)->RangeMultiplier(4)->Range(64, 65536)->Complexity(benchmark::oN);

static void BM_CHat(benchmark::State& state) {
  const CensoredSample s = reference_sample(static_cast<std::size_t>(state.range(0)));
  const MdpdePsi psi(weibull_family(), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(c_hat(s, psi, weibull_theta()));
}
BENCHMARK(BM_CHat)->Arg(100)->Arg(2000);

static void BM_Pif(benchmark::State& state) {
  const Vec th = weibull_theta();
  const Mat sigma = sigma_model(weibull_family(), th, 0.5);
  const Restriction r = Restriction::simple(th);
  const Vec d = Vec::Ones(2);
  for (auto _ : state) benchmark::DoNotOptimize(pif(weibull_family(), th, 0.5, r, sigma, d, 1.7));
}
BENCHMARK(BM_Pif);

BENCHMARK_MAIN();

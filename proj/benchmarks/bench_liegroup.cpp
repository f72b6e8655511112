#include <random>

#include <benchmark/benchmark.h>

#include <aqualoc/liegroup.hpp>

using namespace aqualoc;

namespace {

TangentVector random_tangent(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TangentVector xi;
  for (int i = 0; i < 9; ++i) xi(i) = u(rng);
  return xi;
}

void BM_So3Exp(benchmark::State& state) {
  const Vec3 w = random_tangent(1).head<3>();
  for (auto _ : state) benchmark::DoNotOptimize(so3_exp(w));
}
BENCHMARK(BM_So3Exp);

void BM_Se23Exp(benchmark::State& state) {
  const TangentVector xi = random_tangent(2);
  for (auto _ : state) benchmark::DoNotOptimize(se23_exp(xi));
}
BENCHMARK(BM_Se23Exp);

void BM_Compose(benchmark::State& state) {
  const GroupElement a = se23_exp(random_tangent(3)), b = se23_exp(random_tangent(4));
  for (auto _ : state) benchmark::DoNotOptimize(compose(a, b));
}
BENCHMARK(BM_Compose);

void BM_Inverse(benchmark::State& state) {
  const GroupElement a = se23_exp(random_tangent(5));
  for (auto _ : state) benchmark::DoNotOptimize(inverse(a));
}
BENCHMARK(BM_Inverse);

void BM_Adjoint(benchmark::State& state) {
  const GroupElement a = se23_exp(random_tangent(6));
  for (auto _ : state) benchmark::DoNotOptimize(adjoint(a));
}
BENCHMARK(BM_Adjoint);

}  // namespace

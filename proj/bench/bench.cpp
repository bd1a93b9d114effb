#include <benchmark/benchmark.h>

#include <random>

#include "qoper/bethe.hpp"
#include "qoper/wronskian.hpp"

using namespace qoper;

namespace {

BetheProblem n3_problem() {
  PunctureData pd;
  pd.N = 3;
  pd.punctures = {{Cx(1.1, 0.3), {2, 0}}, {Cx(-0.7, 0.9), {1, 1}}, {Cx(0.4, -1.2), {1, 0}}};
  const Cx k1(0.5, 0.2), k2(1.7, -0.4);
  return make_problem(3, pd, {k1, k2, 1.0 / (k1 * k2)}, {3, 2}, Cx(1.3, 0.2));
}

PolyMatrix random_matrix(int n, int deg, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  PolyMatrix m(n, std::vector<Poly>(n));
  for (auto& row : m)
    for (auto& e : row) {
      std::vector<Cx> c(deg + 1);
      for (auto& x : c) x = {g(rng), g(rng)};
      e = Poly(c);
    }
  return m;
}

void BM_NewtonSerial(benchmark::State& st) {
  const BetheProblem p = n3_problem();
  NewtonOptions o;
  o.starts = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(solve_newton_serial(p, std::nullopt, o));
}

void BM_NewtonParallel(benchmark::State& st) {
  const BetheProblem p = n3_problem();
  NewtonOptions o;
  o.starts = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(solve_newton(p, std::nullopt, o));
}

void BM_CofactorSerial(benchmark::State& st) {
  const PolyMatrix m = random_matrix(static_cast<int>(st.range(0)), 2, 3);
  for (auto _ : st) benchmark::DoNotOptimize(det_cofactor_serial(m));
}

void BM_CofactorParallel(benchmark::State& st) {
  const PolyMatrix m = random_matrix(static_cast<int>(st.range(0)), 2, 3);
  for (auto _ : st) benchmark::DoNotOptimize(det_cofactor_parallel(m));
}

void BM_Bareiss(benchmark::State& st) {
  const PolyMatrix m = random_matrix(static_cast<int>(st.range(0)), 2, 3);
  for (auto _ : st) benchmark::DoNotOptimize(det_bareiss(m));
}

}  // namespace

BENCHMARK(BM_NewtonSerial)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NewtonParallel)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CofactorSerial)->DenseRange(5, 7)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CofactorParallel)->DenseRange(5, 7)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Bareiss)->DenseRange(5, 7)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();

#pragma once

#include <optional>
#include <random>

#include "qoper/bethe.hpp"
#include "qoper/reconstruct.hpp"

namespace qoper::testing {

inline Cx annulus(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> r(std::log(lo), std::log(hi)), t(-3.14159, 3.14159);
  return std::polar(std::exp(r(rng)), t(rng));
}

inline std::vector<Cx> random_twists(std::mt19937_64& rng, int N) {
  std::vector<Cx> k;
  Cx prod = 1.0;
  for (int i = 0; i + 1 < N; ++i) {
    k.push_back(annulus(rng, 0.4, 2.5));
    prod *= k.back();
  }
  k.push_back(1.0 / prod);
  return k;
}

// Random problem whose QQ degrees stay nonnegative: r_k <= r_{k-1} + r_{k+1} + deg Pi_k.
inline BetheProblem random_problem(std::mt19937_64& rng, int N, int L, int rmax, int wmax = 1) {
  std::uniform_int_distribution<int> w(0, wmax), rr(0, rmax);
  PunctureData pd;
  pd.N = N;
  for (int m = 0; m < L; ++m) {
    Puncture p{annulus(rng, 0.5, 2.0), std::vector<int>(N - 1, 0)};
    for (auto& x : p.weights) x = w(rng);
    if (m == 0) p.weights[0] = std::max(p.weights[0], 1);
    pd.punctures.push_back(p);
  }
  std::vector<int> deg(N, 0);
  for (int k = 1; k < N; ++k)
    for (const auto& p : pd.punctures) deg[k] += p.weights[k - 1];
  std::vector<int> r(N - 1, 0);
  for (int k = 1; k < N; ++k) r[k - 1] = std::min(rr(rng), deg[k] + (k > 1 ? r[k - 2] : 0));
  // a lower level can only be as large as the level above allows
  for (int k = N - 1; k >= 1; --k) {
    const int up = k < N - 1 ? r[k] : 0;
    const int down = k > 1 ? r[k - 2] : 0;
    r[k - 1] = std::min(r[k - 1], up + down + deg[k]);
  }
  const Cx sq = annulus(rng, 1.2, 1.6);
  return make_problem(N, pd, random_twists(rng, N), r, sq);
}

// Solve with a few seeds; empty if none converges.
inline std::optional<SolveResult> solve_some(const BetheProblem& p, int tries = 4) {
  for (int s = 0; s < tries; ++s) {
    NewtonOptions o;
    o.seed = static_cast<std::uint64_t>(s);
    SolveResult r = solve_newton(p, std::nullopt, o);
    if (r.report.converged) return r;
  }
  return std::nullopt;
}

inline BetheProblem sl2_fixture() {
  PunctureData pd;
  pd.N = 2;
  pd.punctures = {{1.0, {1}}};
  return make_problem(2, pd, {1.0 / 3.0, 3.0}, {1}, 2.0);
}

inline BetheProblem sl3_fixture() {
  PunctureData pd;
  pd.N = 3;
  pd.punctures = {{Cx(1.1, 0.3), {1, 0}}, {Cx(-0.7, 0.9), {1, 0}}};
  const Cx k1(0.5, 0.2), k2(1.7, -0.4);
  return make_problem(3, pd, {k1, k2, 1.0 / (k1 * k2)}, {2, 1}, Cx(1.3, 0.2));
}

inline Poly random_poly(std::mt19937_64& rng, int deg) {
  std::normal_distribution<double> g;
  std::vector<Cx> c(deg + 1);
  for (auto& x : c) x = {g(rng), g(rng)};
  return Poly(c);
}

}  // namespace qoper::testing

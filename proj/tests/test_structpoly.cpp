#include <doctest.h>

#include "qoper/structpoly.hpp"
#include "support.hpp"

using namespace qoper;

namespace {

PunctureData one(int N, Cx z, std::vector<int> w) {
  PunctureData d;
  d.N = N;
  d.punctures = {{z, std::move(w)}};
  return d;
}

}  // namespace

TEST_CASE("lambda examples") {
  const QFrame f(2.0);
  const PunctureData d = one(3, 1.0, {1, 0});
  CHECK(rel_diff(lambda_poly(1, d, f), Poly{-1.0, 1.0}) == 0.0);
  CHECK(rel_diff(lambda_poly(2, d, f), Poly{1.0}) == 0.0);
  const PunctureData d2 = one(2, 1.0, {2});
  CHECK(rel_diff(lambda_poly(1, d2, f), Poly::from_roots({1.0, 0.25})) <= 1e-15);
  PunctureData empty;
  empty.N = 4;
  for (int i = 1; i < 4; ++i) CHECK(rel_diff(lambda_poly(i, empty, f), Poly{1.0}) == 0.0);
}

TEST_CASE("W and Pi examples") {
  const QFrame f(Cx(1.3, 0.2));
  const Cx z1(0.7, -0.4);
  const PunctureData d = one(3, z1, {1, 0});
  CHECK(rel_diff(w_poly(1, d, f), Poly{1.0}) == 0.0);
  CHECK(rel_diff(w_poly(2, d, f), Poly{-z1, 1.0}) == 0.0);
  CHECK(rel_diff(w_poly(2, d, f), lambda_poly(1, d, f)) == 0.0);
  CHECK(rel_diff(pi_poly(2, d, f), lambda_poly(2, d, f)) == 0.0);
  // Pi_1 = q^{-1/2} (z - q^{1/2} z_1)
  const Poly pi1 = pi_poly(1, d, f);
  CHECK(std::abs(pi1.lead() - 1.0 / f.sqrt_q) <= 1e-15);
  CHECK(std::abs(pi1(f.sqrt_q * z1)) <= 1e-15);
  PunctureData empty;
  empty.N = 3;
  CHECK(rel_diff(pi_poly(1, empty, f), Poly{1.0}) == 0.0);
}

TEST_CASE("F examples") {
  const QFrame f(Cx(1.3, 0.2));
  const PunctureData d = one(3, Cx(0.7, -0.4), {1, 0});
  CHECK(rel_diff(f_poly(1, d, f), Poly{1.0}) == 0.0);
  CHECK(rel_diff(f_poly(0, d, f), Poly{1.0}) == 0.0);
  CHECK(rel_diff(qshift(w_poly(2, d, f), -1, f), pi_poly(1, d, f)) <= 1e-15);
  PunctureData empty;
  empty.N = 3;
  const FFuncReport r = check_ffunc(empty, f);
  CHECK(r.max_rel == 0.0);
}

TEST_CASE("structure degrees, roots and the functional equation on random data") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const int N = 2 + static_cast<int>(rng() % 3);
    const int L = 1 + static_cast<int>(rng() % 3);
    PunctureData d;
    d.N = N;
    for (int m = 0; m < L; ++m) {
      Puncture p{testing::annulus(rng, 0.5, 2.0), std::vector<int>(N - 1)};
      for (auto& w : p.weights) w = static_cast<int>(rng() % 4);
      d.punctures.push_back(p);
    }
    const QFrame f(testing::annulus(rng, 1.2, 1.6));
    d.validate(f);
    int wdeg = 0;
    for (int i = 1; i < N; ++i) {
      int want = 0;
      for (const auto& p : d.punctures) want += p.weights[i - 1];
      const Poly lam = lambda_poly(i, d, f);
      CHECK(std::max(lam.degree(), 0) == want);
      CHECK(std::abs(lam.lead() - 1.0) <= 1e-12);
      CHECK(std::abs(p_poly(i, d, f).lead() - 1.0) <= 1e-12);
      wdeg += std::max(p_poly(i, d, f).degree(), 0);
      const Poly w = w_poly(i + 1, d, f);
      CHECK(std::max(w.degree(), 0) == wdeg);
      const SyntheticResult sr = divide_by_roots(w, w_roots(i + 1, d, f));
      CHECK(sr.rel_remainder <= 1e-9);
      CHECK(std::max(sr.quotient.degree(), 0) == 0);
    }
    CHECK(check_ffunc(d, f).max_rel <= 1e-10);
  }
}

TEST_CASE("puncture validation") {
  const QFrame f(2.0);
  PunctureData d;
  d.N = 2;
  d.punctures = {{1.0, {1}}, {4.0, {1}}};
  CHECK_THROWS_AS(d.validate(f), Error);
  d.punctures = {{0.0, {1}}};
  CHECK_THROWS_AS(d.validate(f), Error);
  d.punctures = {{1.0, {-1}}};
  CHECK_THROWS_AS(d.validate(f), Error);
  d.punctures = {{1.0, {1, 1}}};
  CHECK_THROWS_AS(d.validate(f), Error);
}

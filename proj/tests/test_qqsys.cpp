#include <doctest.h>

#include "qoper/qqsys.hpp"
#include "support.hpp"

using namespace qoper;

TEST_CASE("rank-one QQ relation recovers Q_+") {
  const BetheProblem p = testing::sl2_fixture();
  const Poly one = Poly::constant(1.0);
  const Poly qt = build_qtilde(1, one, Poly{-0.625, 1.0}, one, pi_poly(1, p.punctures, p.frame), p.twists.k(1),
                               p.twists.k(2), p.frame);
  REQUIRE(qt.degree() == 0);
  CHECK(std::abs(qt.coeff(0) - 1.6) <= 1e-12);
  CHECK(std::abs(qt.coeff(0) / (p.twists.k(1) - p.twists.k(2)) + 0.6) <= 1e-12);
}

TEST_CASE("empty level gives a constant dual") {
  const QFrame f(Cx(1.3, 0.2));
  const Poly one = Poly::constant(1.0);
  const Poly qt = build_qtilde(1, one, one, one, one, Cx(0.4, 0.1), Cx(1.7, -0.3), f);
  CHECK(rel_diff(qt, one) <= 1e-14);
}

TEST_CASE("perturbed roots are inconsistent") {
  const BetheProblem p = testing::sl2_fixture();
  const Poly one = Poly::constant(1.0);
  double res = 0.0;
  CHECK_THROWS_AS(build_qtilde(1, one, Poly{-0.626, 1.0}, one, pi_poly(1, p.punctures, p.frame), p.twists.k(1),
                               p.twists.k(2), p.frame, &res),
                  Error);
  CHECK(res > 1e-6);
}

TEST_CASE("equal twists are degenerate") {
  const QFrame f(2.0);
  const Poly one = Poly::constant(1.0);
  try {
    build_qtilde(1, one, Poly{-0.5, 1.0}, one, Poly{-1.0, 1.0}, 2.0, 2.0, f);
    FAIL("expected DegenerateTwists");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateTwists);
  }
  // more roots than the right-hand side can carry
  CHECK_THROWS_AS(build_qtilde(1, one, Poly::from_roots({0.5, 0.7}), one, Poly{-1.0, 1.0}, 0.5, 2.0, f), Error);
}

TEST_CASE("constant system has zero residual; scaling Qtilde breaks it") {
  QSystem s;
  s.N = 3;
  s.Q.assign(4, Poly::constant(1.0));
  s.Qtilde.assign(4, Poly::constant(1.0));
  s.Pi.assign(4, Poly::constant(1.0));
  const TwistData tw{3, {0.5, 1.5, 1.0 / 0.75}};
  const QFrame f(Cx(1.2, 0.3));
  CHECK(qq_residual(s, tw, f).max_abs == 0.0);
  s.Qtilde[1] *= 2.0;
  CHECK(qq_residual(s, tw, f).max_abs > 0.1);
}

TEST_CASE("constructed systems on random solutions") {
  std::mt19937_64 rng(41);
  int built = 0;
  for (int t = 0; t < 12; ++t) {
    const BetheProblem p = testing::random_problem(rng, 2 + t % 2, 1 + t % 2, 2);
    const auto s = testing::solve_some(p);
    if (!s) continue;
    ++built;
    const QSystem qs = build_qsystem(p, s->roots);
    CHECK(qq_residual(qs, p.twists, p.frame).max_abs <= 1e-9);
    const DSystem ds = dress(qs, p.punctures, p.frame);
    CHECK(qqv_residual(ds, p.twists, p.frame).max_abs <= 1e-9);
    for (int k = 1; k < p.N; ++k) {
      const int want = qs.Q[k - 1].degree() + qs.Q[k + 1].degree() + std::max(qs.Pi[k].degree(), 0) -
                       std::max(qs.Q[k].degree(), 0);
      CHECK(qs.Qtilde[k].degree() == want);
      if (ds.F[k](0.0) != Cx{} && qs.Q[k](0.0) != Cx{}) CHECK(std::abs(ds.Dtilde[k](0.0)) > 0.0);
    }
  }
  CHECK(built >= 6);
}

TEST_CASE("QQ and dressed QQ differ by the F factors pointwise") {
  std::mt19937_64 rng(42);
  const BetheProblem p = testing::sl3_fixture();
  // arbitrary, not a solution
  QSystem qs;
  qs.N = 3;
  qs.Q = {Poly{1.0}, Poly::from_roots({Cx(0.3, 0.2), Cx(-0.5, 0.4)}), Poly{Cx(0.7, -0.1), 1.0}, Poly{1.0}};
  qs.Qtilde = {Poly{1.0}, testing::random_poly(rng, 2), testing::random_poly(rng, 1), Poly{1.0}};
  qs.Pi = {Poly{1.0}, pi_poly(1, p.punctures, p.frame), pi_poly(2, p.punctures, p.frame), Poly{1.0}};
  const DSystem ds = dress(qs, p.punctures, p.frame);
  const Cx sh = p.frame.sqrt_q;
  for (int i = 0; i < 10; ++i) {
    const Cx z = testing::annulus(rng, 0.5, 2.0);
    for (int k = 1; k < 3; ++k) {
      const Cx fac = ds.F[k](sh * z) * ds.F[k](z / sh);
      const Cx a = qqv_defect(ds, p.twists, p.frame, k, z), b = fac * qq_defect(qs, p.twists, p.frame, k, z);
      CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("no punctures leaves the system undressed") {
  PunctureData none;
  none.N = 2;
  const QFrame f(Cx(1.3, 0.1));
  QSystem qs;
  qs.N = 2;
  qs.Q = {Poly{1.0}, Poly{-0.4, 1.0}, Poly{1.0}};
  qs.Qtilde = {Poly{1.0}, Poly{2.0, 1.0}, Poly{1.0}};
  qs.Pi = {Poly{1.0}, Poly{1.0}, Poly{1.0}};
  const DSystem ds = dress(qs, none, f);
  for (int k = 0; k <= 2; ++k) CHECK(rel_diff(ds.D[k], qs.Q[k]) == 0.0);
  const TwistData tw{2, {0.5, 2.0}};
  CHECK(qqv_residual(ds, tw, f).max_abs == qq_residual(qs, tw, f).max_abs);
}

TEST_CASE("rank-one fixture dressing") {
  const BetheProblem p = testing::sl2_fixture();
  const QSystem qs = build_qsystem(p, {{{0.625}}});
  const DSystem ds = dress(qs, p.punctures, p.frame);
  CHECK(rel_diff(ds.D[1], Poly{-0.625, 1.0}) <= 1e-15);
  // D_2 = F_2 = W_2 shifted by half a step
  CHECK(rel_diff(ds.D[2], qshift(Poly{-1.0, 1.0}, -1, p.frame)) <= 1e-15);
  CHECK(qqv_residual(ds, p.twists, p.frame).max_abs <= 1e-12);
}

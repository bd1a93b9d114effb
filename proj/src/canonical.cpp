#include "qoper/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qoper {

Rational rshift(const Rational& r, int h, const QFrame& f) { return {qshift(r.num, h, f), qshift(r.den, h, f)}; }
Rational rmul(const Rational& a, const Rational& b) { return {a.num * b.num, a.den * b.den}; }
Rational radd(const Rational& a, const Rational& b) {
  return {a.num * b.den + b.num * a.den, a.den * b.den};
}
Rational rscale(const Rational& a, Cx s) { return {a.num * s, a.den}; }

Poly to_poly(const Rational& r, double* rel_remainder) {
  DivResult d = divmod(r.num, r.den);
  if (rel_remainder) {
    const double n = r.num.max_abs();
    *rel_remainder = n == 0.0 ? 0.0 : d.remainder.max_abs() / n;
  }
  return d.quotient;
}

namespace {

Poly transfer_numerator(const Poly& Qm, const Poly& rho, Cx zeta, const QFrame& f) {
  return qshift(rho, -2, f) * qshift(Qm, 2, f) * (1.0 / zeta) + rho * qshift(Qm, -2, f) * zeta;
}

}  // namespace

double sl2_transfer_remainder(const Poly& Qm, const Poly& rho, Cx zeta, const QFrame& f) {
  double rem = 0.0;
  to_poly({transfer_numerator(Qm, rho, zeta, f), Qm}, &rem);
  return rem;
}

SL2Canonical sl2_canonical(const Poly& Qm, const Poly& Qp, Cx zeta, const PunctureData& structure,
                           const QFrame& f) {
  SL2Canonical c;
  c.zeta = zeta;
  c.rho = lambda_poly(1, structure, f);
  c.a = {qshift(Qm, 2, f) * (1.0 / zeta), Qm};
  c.T = to_poly({transfer_numerator(Qm, c.rho, zeta, f), Qm}, &c.remainder);
  if (c.remainder > kPolynomialTol)
    throw Error(ErrorKind::NotPolynomial, "T remainder " + std::to_string(c.remainder));
  const Poly w = Qp * qshift(Qm, 2, f) * (1.0 / zeta) - qshift(Qp, 2, f) * Qm * zeta;
  const double wm = rel_diff(w, c.rho);
  if (wm > kPolynomialTol)
    throw Error(ErrorKind::WronskianMismatch, "quantum Wronskian differs from rho by " + std::to_string(wm));
  return c;
}

namespace {

Cx nonzero(Cx v) {
  if (std::abs(v) == 0.0) throw Error(ErrorKind::PoleHit, "lattice point hits a zero of rho");
  return v;
}

}  // namespace

std::vector<Cx> sl2_generate_recursion(const SL2Canonical& c, Cx z0, Cx f0, Cx f1, int J, const QFrame& f) {
  std::vector<Cx> s{f0, f1};
  const Cx q = f.q();
  Cx z = z0;
  for (int j = 0; j + 2 <= J; ++j, z *= q) {
    const Cx r = nonzero(c.rho(z));
    s.push_back(c.T(q * z) / r * s[j + 1] - c.rho(q * z) / r * s[j]);
  }
  return s;
}

std::vector<Cx> sl2_generate_system(const SL2Canonical& c, Cx z0, Cx f1, Cx f2, int J, const QFrame& f) {
  std::vector<Cx> s{f1};
  const Cx q = f.q();
  Cx z = z0;
  for (int j = 0; j < J; ++j, z *= q) {
    const Cx r = nonzero(c.rho(z)), r1 = nonzero(c.rho(q * z));
    const Cx n1 = r * f2;
    const Cx n2 = -f1 / r + c.T(q * z) / r1 * f2;
    f1 = n1;
    f2 = n2;
    s.push_back(f1);
  }
  return s;
}

double sl2_scalar_apply(const SL2Canonical& c, const std::vector<Cx>& s, Cx z0, const QFrame& f) {
  const Cx q = f.q();
  double worst = 0.0;
  Cx z = z0;
  for (size_t j = 0; j + 2 < s.size(); ++j, z *= q) {
    const Cx r = nonzero(c.rho(z));
    const Cx t2 = s[j + 2], t1 = -c.T(q * z) / r * s[j + 1], t0 = c.rho(q * z) / r * s[j];
    const double sc = std::abs(t2) + std::abs(t1) + std::abs(t0);
    if (sc > 0) worst = std::max(worst, std::abs(t2 + t1 + t0) / sc);
  }
  return worst;
}

SL3Canonical sl3_canonical(const SectionData& sec, const TwistData& tw, const PunctureData& structure,
                           const QFrame& f, std::uint64_t seed) {
  if (tw.N != 3 || sec.s.size() != 3) throw Error(ErrorKind::BadShape, "SL(3) data expected");
  SL3Canonical c;
  const DFactorization d1 = d_factorize(1, sec, tw, structure, f);
  const DFactorization d2 = d_factorize(2, sec, tw, structure, f);
  d_factorize(3, sec, tw, structure, f);
  c.V1 = d1.v_poly;
  c.V2 = d2.v_poly;
  c.Lambda1 = lambda_poly(1, structure, f);
  c.Lambda2 = lambda_poly(2, structure, f);
  for (int i = 0; i < 3; ++i) c.zeta[i] = tw.zeta(i + 1);
  const Cx iz1 = 1.0 / c.zeta[0], iz2 = 1.0 / c.zeta[1], iz3 = 1.0 / c.zeta[2];

  const Poly& V1 = c.V1;
  const Poly& V2 = c.V2;
  c.a1 = {V2 * iz1, qshift(V2, -2, f)};
  c.a2 = {qshift(V2, -2, f) * qshift(V1, 2, f) * iz2, V2 * V1};
  c.a3 = {V1 * iz3, qshift(V1, 2, f)};

  // Same ratios written through the unshifted two-row minor and s_3.
  const Poly& D23 = d2.d_poly;
  const Poly& s3 = sec.s[2];
  const Poly& L1 = c.Lambda1;
  const Rational b1{qshift(L1, -2, f) * D23 * iz1, L1 * qshift(D23, -2, f)};
  const Rational b2{L1 * qshift(s3, 2, f) * qshift(D23, -2, f) * iz2, qshift(L1, -2, f) * s3 * D23};
  const Rational b3{s3 * iz3, qshift(s3, 2, f)};

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const Cx z = std::polar(0.5 + U(rng), 6.283185307179586 * U(rng));
    const Cx x1 = c.a1.eval(z), x2 = c.a2.eval(z), x3 = c.a3.eval(z);
    c.product_defect = std::max(c.product_defect, std::abs(x1 * x2 * x3 - 1.0));
    c.minor_mismatch = std::max({c.minor_mismatch, std::abs(b1.eval(z) - x1) / std::abs(x1),
                                 std::abs(b2.eval(z) - x2) / std::abs(x2),
                                 std::abs(b3.eval(z) - x3) / std::abs(x3)});
  }
  if (c.minor_mismatch > kPolynomialTol)
    throw Error(ErrorKind::MinorMismatch, "minor form disagrees by " + std::to_string(c.minor_mismatch));
  return c;
}

SL3Transfer sl3_transfer(const SL3Canonical& c, const QFrame& f, std::uint64_t seed) {
  SL3Transfer t;
  const Poly& L1 = c.Lambda1;
  const Poly& L2 = c.Lambda2;
  auto P = [](const Poly& p) { return Rational{p, Poly::constant(1.0)}; };
  const Rational a1_1 = rshift(c.a1, 2, f), a1_2 = rshift(c.a1, 4, f);
  const Rational a2_1 = rshift(c.a2, 2, f);
  const Rational T1 = radd(radd(rmul(a1_2, P(L1 * qshift(L2, 2, f))), rmul(a2_1, P(L1 * qshift(L2, 4, f)))),
                           rmul(c.a3, P(qshift(L1, 2, f) * qshift(L2, 4, f))));
  const Rational T2 = radd(radd(rmul(rmul(a1_1, a2_1), P(L1 * L2)), rmul(rmul(a1_1, c.a3), P(qshift(L1, 2, f) * L2))),
                           rmul(rmul(c.a2, c.a3), P(qshift(L1, 2, f) * qshift(L2, 2, f))));
  double r1 = 0.0, r2 = 0.0;
  t.T1 = to_poly(T1, &r1);
  t.T2 = to_poly(T2, &r2);
  t.remainder = std::max(r1, r2);
  if (t.remainder > kPolynomialTol)
    throw Error(ErrorKind::NotPolynomial, "transfer remainder " + std::to_string(t.remainder));

  // f(qz) = A(z) f(z) with A upper triangular.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const Cx q = f.q();
  const Cx z0 = std::polar(0.7 + 0.3 * (U(rng) + 1.0), 3.0 * U(rng));
  Cx v1(U(rng), U(rng)), v2(U(rng), U(rng)), v3(U(rng), U(rng));
  const int J = 8;
  std::vector<Cx> s{v1};
  Cx z = z0;
  for (int j = 0; j < J; ++j, z *= q) {
    const Cx n1 = c.a1.eval(z) * v1 + L2(z) * v2;
    const Cx n2 = c.a2.eval(z) * v2 + L1(z) * v3;
    const Cx n3 = c.a3.eval(z) * v3;
    v1 = n1;
    v2 = n2;
    v3 = n3;
    s.push_back(v1);
  }
  z = z0;
  for (int j = 0; j < 5; ++j, z *= q) {
    const Cx c3 = L1(z) * L2(z) * L2(q * z) * s[j + 3];
    const Cx c2 = -L2(z) * t.T1(z) * s[j + 2];
    const Cx c1 = L2(q * q * z) * t.T2(z) * s[j + 1];
    const Cx c0 = -L1(q * z) * L2(q * z) * L2(q * q * z) * s[j];
    const double sc = std::abs(c3) + std::abs(c2) + std::abs(c1) + std::abs(c0);
    if (sc > 0) t.scalar_residual = std::max(t.scalar_residual, std::abs(c3 + c2 + c1 + c0) / sc);
  }
  return t;
}

ClassicalReport classical_sl2(const Poly& qm, const Poly& qp, const std::vector<Cx>& z, const std::vector<int>& k,
                              Cx a, ClassicalMode mode, const QFrame& f) {
  ClassicalReport rep;
  const bool irr = mode == ClassicalMode::irregular;
  if (irr && a == Cx{}) throw Error(ErrorKind::InvalidInput, "irregular mode needs a != 0");
  if (!coprime_test(qm, qp, f)) throw Error(ErrorKind::InvalidInput, "q_+ and q_- share a root");

  std::vector<Cx> zr;
  for (size_t m = 0; m < z.size(); ++m)
    for (int j = 0; j < k[m]; ++j) zr.push_back(z[m]);
  rep.rho = Poly::from_roots(zr);
  rep.wronskian = qp * qm.derivative() - qp.derivative() * qm;
  if (irr) rep.wronskian += qp * qm * (2.0 * a);
  rep.scale = rep.wronskian.lead() / rep.rho.lead();
  const double wm = rel_diff(rep.wronskian, rep.rho * rep.scale);
  if (rep.wronskian.is_zero() || wm > kPolynomialTol)
    throw Error(ErrorKind::WronskianMismatch, "Wronskian is not a multiple of rho");

  // u = -rho'/(2 rho) + q_-'/q_- (+ a), t = u' + u^2.
  const Poly D = rep.rho * qm * 2.0;
  Poly Un = rep.rho * qm.derivative() * 2.0 - rep.rho.derivative() * qm;
  if (irr) Un += rep.rho * qm * (2.0 * a);
  rep.u = {Un, D};
  rep.t = {Un.derivative() * D - Un * D.derivative() + Un * Un, D * D};

  std::vector<Cx> w = qm.degree() >= 1 ? roots(qm, f) : std::vector<Cx>{};
  for (size_t m = 0; m < z.size(); ++m) {
    Cx s{};
    for (size_t n = 0; n < z.size(); ++n)
      if (n != m) s += (k[n] / 2.0) / (z[m] - z[n]);
    for (const Cx& x : w) s -= 1.0 / (z[m] - x);
    rep.c.push_back(static_cast<double>(k[m]) * s);
  }
  rep.bethe = inhomogeneous_sl2_residual(z, k, irr ? a : Cx{}, w);

  for (const Cx& x : w) {
    const Poly h = divide_by_roots(rep.t.den, {x, x}).quotient;
    const Poly& n = rep.t.num;
    const Cx hv = h(x), nv = n(x);
    const Cx dbl = nv / hv;
    const Cx res = (n.derivative()(x) * hv - nv * h.derivative()(x)) / (hv * hv);
    rep.t_residues.push_back(res);
    rep.pole_defect = std::max({rep.pole_defect, std::abs(dbl), std::abs(res)});
  }
  if (rep.pole_defect > 1e-8)
    throw Error(ErrorKind::PoleAtBetheRoot, "t keeps a pole at a root of q_-");
  return rep;
}

}  // namespace qoper

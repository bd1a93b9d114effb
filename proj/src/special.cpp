#include "qoper/special.hpp"

#include <algorithm>
#include <cmath>

namespace qoper {

void TRSInstance::validate() const {
  if (std::abs(zeta - 1.0) < 1e-14 || std::abs(zeta + 1.0) < 1e-14)
    throw Error(ErrorKind::DegenerateTwists, "zeta = +-1");
  if (std::abs(q * zeta * zeta - 1.0) < 1e-14) throw Error(ErrorKind::DegenerateTwists, "q zeta^2 = 1");
  if (std::abs(q) == 0.0) throw Error(ErrorKind::InvalidInput, "q = 0");
}

Cx TRSInstance::c() const { return 1.0 / (q * (1.0 / zeta - zeta)); }

TRSResiduals trs_relations(const TRSInstance& t) {
  t.validate();
  const Cx d = t.zeta - 1.0 / t.zeta;
  const Cx A = (t.zeta - t.q / t.zeta) / d;
  const Cx B = (t.q * t.zeta - 1.0 / t.zeta) / d;
  TRSResiduals r;
  r.implied_sum = (A * t.p_plus + B * t.p_minus) / t.q;
  r.implied_product = t.p_plus * t.p_minus / t.q;
  r.sum = A * t.p_plus + B * t.p_minus - t.q * (t.z_plus + t.z_minus);
  r.product = r.implied_product - t.z_plus * t.z_minus;
  return r;
}

std::pair<TRSInstance, TRSInstance> trs_solve(Cx q, Cx zeta, Cx zp, Cx zm) {
  TRSInstance base{q, zeta, zp, zm, 0.0, 0.0};
  base.validate();
  const Cx d = zeta - 1.0 / zeta;
  const Cx A = (zeta - q / zeta) / d;
  const Cx B = (q * zeta - 1.0 / zeta) / d;
  if (std::abs(A) < 1e-14) throw Error(ErrorKind::DegenerateTwists, "zeta^2 = q");
  // B p^2 - q S p + A q P = 0
  const Cx S = zp + zm, P = zp * zm;
  const Cx disc = std::sqrt(q * q * S * S - 4.0 * A * B * q * P);
  TRSInstance a = base, b = base;
  a.p_minus = (q * S + disc) / (2.0 * B);
  b.p_minus = (q * S - disc) / (2.0 * B);
  a.p_plus = (q * S - B * a.p_minus) / A;
  b.p_plus = (q * S - B * b.p_minus) / A;
  return {a, b};
}

double trs_wronskian_gap(const TRSInstance& t) {
  t.validate();
  // q is given directly here; any square root serves for integer shifts.
  const QFrame f(std::sqrt(t.q));
  const Poly qm{-t.p_minus, 1.0};
  const Poly qp = Poly{-t.p_plus, 1.0} * t.c();
  const Poly w = qp * qshift(qm, 2, f) * (1.0 / t.zeta) - qshift(qp, 2, f) * qm * t.zeta;
  return rel_diff(w, Poly::from_roots({t.z_plus, t.z_minus}));
}

std::vector<int> KTheoryInstance::degrees() const {
  std::vector<int> d;
  for (const auto& row : p) d.push_back(static_cast<int>(row.size()));
  return d;
}

Poly assemble_s(const std::vector<Cx>& p) {
  const int rho = static_cast<int>(p.size());
  std::vector<Cx> c(rho + 1);
  c[rho] = 1.0;
  for (int i = 1; i <= rho; ++i) c[rho - i] = (i % 2 ? -1.0 : 1.0) * p[i - 1];
  return Poly(std::move(c), 0.0);
}

PFragment extract_p_coeffs(const SectionData& sec) {
  PFragment out;
  for (const Poly& s : sec.s) {
    auto [m, lead] = monicize(s);
    const int rho = m.degree();
    std::vector<Cx> p(rho);
    for (int i = 1; i <= rho; ++i) p[i - 1] = (i % 2 ? -1.0 : 1.0) * m.coeff(rho - i);
    out.p.push_back(std::move(p));
    out.scalings.push_back(lead);
  }
  return out;
}

KTheoryReport ktheory_relation(const KTheoryInstance& inst, const QFrame& f,
                               const std::vector<Cx>& samples) {
  const int N = inst.N;
  if (N < 1 || static_cast<int>(inst.kappa.size()) != N || static_cast<int>(inst.p.size()) != N)
    throw Error(ErrorKind::BadShape, "kappa and p need N entries");
  const std::vector<int> rho = inst.degrees();
  int total = 0;
  for (int r : rho) total += r;
  if (total != inst.L())
    throw Error(ErrorKind::BadDegrees, "sum of section degrees " + std::to_string(total) + " != L = " +
                                           std::to_string(inst.L()));

  PolyMatrix M(N, std::vector<Poly>(N));
  std::vector<Cx> lead_twists;
  for (int a = 0; a < N; ++a) {
    const Poly s = assemble_s(inst.p[a]);
    for (int c = 0; c < N; ++c) M[a][c] = qshift(s, 1 - N + 2 * c, f) * ipow(inst.kappa[a], c);
    lead_twists.push_back(inst.kappa[a] * f.qpow(rho[a]));
  }
  KTheoryReport rep;
  rep.det_m = det(M);
  rep.rhs = qshift(Poly::from_roots(inst.a), 1 - N, f) * vandermonde_det(lead_twists);

  const double scale = std::max(rep.rhs.max_abs(), 1e-300);
  for (int i = 0; i <= inst.L(); ++i) {
    const double r = std::abs(rep.det_m.coeff(i) - rep.rhs.coeff(i)) / scale;
    rep.coeff_residuals.push_back(r);
    rep.max_rel = std::max(rep.max_rel, r);
  }
  // anything above degree L is a degree failure, fold it into the max
  for (int i = inst.L() + 1; i <= rep.det_m.degree(); ++i)
    rep.max_rel = std::max(rep.max_rel, std::abs(rep.det_m.coeff(i)) / scale);

  std::vector<Cx> pts = samples;
  if (pts.empty()) {
    const int n = std::max(inst.L() + 3, 8);
    for (int j = 0; j < n; ++j) pts.push_back(std::polar(1.3, 0.3 + 6.283185307179586 * j / n));
  }
  for (const Cx& z : pts) {
    const Cx rv = rep.rhs(z);
    const double r = std::abs(rep.det_m(z) - rv) / std::max(std::abs(rv), scale);
    rep.sample_residuals.push_back(r);
    rep.max_rel = std::max(rep.max_rel, r);
  }
  return rep;
}

KTheoryInstance ktheory_from_trs(const TRSInstance& t) {
  t.validate();
  KTheoryInstance k;
  k.N = 2;
  k.kappa = {1.0 / t.zeta, t.zeta};
  k.a = {t.z_plus, t.z_minus};
  k.p = {{t.p_minus}, {t.p_plus}};
  k.sqrt_q = std::sqrt(t.q);
  return k;
}

KTheoryInstance ktheory_from_sections(const BetheProblem& prob, const SectionData& sec) {
  const int N = prob.N;
  for (const Puncture& p : prob.punctures.punctures)
    for (size_t i = 1; i < p.weights.size(); ++i)
      if (p.weights[i] != 0) throw Error(ErrorKind::InvalidInput, "weights must sit on the first node");
  SectionData rev;
  for (int a = 1; a <= N; ++a) rev.s.push_back(sec.s.at(N - a));
  KTheoryInstance k;
  k.N = N;
  k.kappa = prob.twists.kappa;
  k.p = extract_p_coeffs(rev).p;
  k.sqrt_q = prob.frame.sqrt_q;
  for (const Puncture& p : prob.punctures.punctures)
    for (int j = 0; j < p.weights.at(0); ++j) k.a.push_back(p.z * prob.frame.qpow(-j));
  return k;
}

}  // namespace qoper

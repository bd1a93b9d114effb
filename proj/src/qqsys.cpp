#include "qoper/qqsys.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace qoper {

namespace {

Poly qq_lhs(const Poly& Qk, const Poly& Qt, Cx kk, Cx kk1, const QFrame& f) {
  return qshift(Qk, -1, f) * qshift(Qt, 1, f) * kk1 - qshift(Qk, 1, f) * qshift(Qt, -1, f) * kk;
}

}  // namespace

Poly build_qtilde(int k, const Poly& Qkm1, const Poly& Qk, const Poly& Qkp1, const Poly& Pik,
                  Cx kk, Cx kk1, const QFrame& f, double* rel_residual) {
  (void)k;
  const Poly rhs = Qkm1 * Qkp1 * Pik * (kk1 - kk);
  if (rhs.is_zero()) throw Error(ErrorKind::DegenerateTwists, "kappa_k = kappa_{k+1}");
  const int r = Qk.degree();
  const int d = rhs.degree() - r;
  if (d < 0) throw Error(ErrorKind::DegenerateTwists, "degree of Qtilde would be negative");

  // Column i is the image of z^i; its top coefficient sits at degree i + r.
  const Poly qm = qshift(Qk, -1, f), qp = qshift(Qk, 1, f);
  const int rows = std::max(rhs.degree(), d + r) + 1;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(rows, d + 1);
  for (int i = 0; i <= d; ++i) {
    const Cx up = kk1 * f.qpow_half(i), dn = kk * f.qpow_half(-i);
    const Cx top = up * qm.lead() - dn * qp.lead();
    if (std::abs(top) <= 1e-12 * (std::abs(up * qm.lead()) + std::abs(dn * qp.lead())))
      throw Error(ErrorKind::DegenerateTwists, "leading terms cancel at degree " + std::to_string(i));
    for (int j = 0; j <= r; ++j) A(i + j, i) = up * qm.coeff(j) - dn * qp.coeff(j);
  }
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(rows);
  for (int j = 0; j <= rhs.degree(); ++j) b(j) = rhs.coeff(j);
  Eigen::VectorXcd x = A.colPivHouseholderQr().solve(b);

  const Poly qt(std::vector<Cx>(x.data(), x.data() + x.size()));
  const double res = rel_diff(qq_lhs(Qk, qt, kk, kk1, f), rhs);
  if (rel_residual) *rel_residual = res;
  if (!(res <= kQQInconsistentTol))
    throw Error(ErrorKind::Inconsistent, "QQ least-squares residual " + std::to_string(res));
  return qt;
}

QSystem build_qsystem(const BetheProblem& prob, const BetheRoots& roots) {
  QSystem s;
  s.N = prob.N;
  s.Q.assign(prob.N + 1, Poly::constant(1.0));
  s.Qtilde.assign(prob.N + 1, Poly::constant(1.0));
  s.Pi.assign(prob.N + 1, Poly::constant(1.0));
  for (int k = 1; k < prob.N; ++k) {
    s.Q[k] = Poly::from_roots(roots.u.at(k - 1));
    s.Pi[k] = pi_poly(k, prob.punctures, prob.frame);
  }
  for (int k = 1; k < prob.N; ++k)
    s.Qtilde[k] = build_qtilde(k, s.Q[k - 1], s.Q[k], s.Q[k + 1], s.Pi[k], prob.twists.k(k),
                               prob.twists.k(k + 1), prob.frame);
  return s;
}

ResidualReport qq_residual(const QSystem& sys, const TwistData& tw, const QFrame& f) {
  ResidualReport rep;
  for (int k = 1; k < sys.N; ++k) {
    const Poly lhs = qq_lhs(sys.Q[k], sys.Qtilde[k], tw.k(k), tw.k(k + 1), f);
    const Poly rhs = sys.Q[k - 1] * sys.Q[k + 1] * sys.Pi[k] * (tw.k(k + 1) - tw.k(k));
    rep.push(rel_diff(lhs, rhs));
  }
  return rep;
}

DSystem dress(const QSystem& sys, const PunctureData& structure, const QFrame& f) {
  DSystem d;
  d.N = sys.N;
  d.F.resize(sys.N + 1);
  d.D.resize(sys.N + 1);
  d.Dtilde.assign(sys.N + 1, Poly::constant(1.0));
  for (int k = 0; k <= sys.N; ++k) {
    d.F[k] = f_poly(k, structure, f);
    d.D[k] = sys.Q[k] * d.F[k];
  }
  for (int k = 1; k < sys.N; ++k) d.Dtilde[k] = sys.Qtilde[k] * d.F[k];
  return d;
}

ResidualReport qqv_residual(const DSystem& ds, const TwistData& tw, const QFrame& f) {
  ResidualReport rep;
  for (int k = 1; k < ds.N; ++k) {
    const Poly lhs = qq_lhs(ds.D[k], ds.Dtilde[k], tw.k(k), tw.k(k + 1), f);
    const Poly rhs = ds.D[k - 1] * ds.D[k + 1] * (tw.k(k + 1) - tw.k(k));
    rep.push(rel_diff(lhs, rhs));
  }
  return rep;
}

Cx qq_defect(const QSystem& s, const TwistData& tw, const QFrame& f, int k, Cx z) {
  const Cx sh = f.sqrt_q;
  return tw.k(k + 1) * s.Q[k](z / sh) * s.Qtilde[k](z * sh) - tw.k(k) * s.Q[k](z * sh) * s.Qtilde[k](z / sh) -
         (tw.k(k + 1) - tw.k(k)) * s.Q[k - 1](z) * s.Q[k + 1](z) * s.Pi[k](z);
}

Cx qqv_defect(const DSystem& d, const TwistData& tw, const QFrame& f, int k, Cx z) {
  const Cx sh = f.sqrt_q;
  return tw.k(k + 1) * d.D[k](z / sh) * d.Dtilde[k](z * sh) - tw.k(k) * d.D[k](z * sh) * d.Dtilde[k](z / sh) -
         (tw.k(k + 1) - tw.k(k)) * d.D[k - 1](z) * d.D[k + 1](z);
}

}  // namespace qoper

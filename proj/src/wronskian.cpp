#include "qoper/wronskian.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

namespace qoper {

TwistData TwistData::from_zeta(const std::vector<Cx>& zeta) {
  TwistData t;
  t.N = static_cast<int>(zeta.size());
  t.kappa.assign(zeta.rbegin(), zeta.rend());
  return t;
}

void TwistData::validate(const QFrame& frame, bool require_disjoint) const {
  if (N < 2 || static_cast<int>(kappa.size()) != N)
    throw Error(ErrorKind::InvalidInput, "need N >= 2 twists");
  Cx prod = 1.0;
  for (const Cx& x : kappa) {
    if (x == Cx{}) throw Error(ErrorKind::InvalidInput, "zero twist");
    prod *= x;
  }
  if (std::abs(prod - 1.0) > frame.tol.rel_identity)
    throw Error(ErrorKind::InvalidInput, "twists must multiply to 1");
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < i; ++j) {
      if (std::abs(kappa[i] - kappa[j]) <= frame.tol.rel_identity * std::abs(kappa[i]))
        throw Error(ErrorKind::InvalidInput, "twists must be distinct");
      if (require_disjoint && lattice_related(kappa[i], kappa[j], frame))
        throw Error(ErrorKind::InvalidInput, "twists share a q-lattice");
    }
}

namespace {

PolyMatrix minor_of(const PolyMatrix& m, size_t row, size_t col) {
  PolyMatrix r;
  r.reserve(m.size() - 1);
  for (size_t i = 0; i < m.size(); ++i) {
    if (i == row) continue;
    std::vector<Poly> line;
    line.reserve(m.size() - 1);
    for (size_t j = 0; j < m.size(); ++j)
      if (j != col) line.push_back(m[i][j]);
    r.push_back(std::move(line));
  }
  return r;
}

void check_square(const PolyMatrix& m) {
  for (const auto& row : m)
    if (row.size() != m.size()) throw Error(ErrorKind::BadShape, "matrix is not square");
}

Poly cofactor_term(const PolyMatrix& m, size_t j) {
  Poly t = m[0][j] * det_cofactor_serial(minor_of(m, 0, j));
  return (j % 2 == 0) ? t : -t;
}

}  // namespace

Poly det_cofactor_serial(const PolyMatrix& m) {
  check_square(m);
  if (m.empty()) return Poly::constant(1.0);
  if (m.size() == 1) return m[0][0];
  Poly acc;
  for (size_t j = 0; j < m.size(); ++j) acc += cofactor_term(m, j);
  return acc;
}

Poly det_cofactor_parallel(const PolyMatrix& m) {
  check_square(m);
  if (m.size() <= 2) return det_cofactor_serial(m);
  const long n = static_cast<long>(m.size());
  std::vector<Poly> terms(n);
#pragma omp parallel for schedule(static)
  for (long j = 0; j < n; ++j) terms[j] = cofactor_term(m, static_cast<size_t>(j));
  Poly acc;
  for (const Poly& t : terms) acc += t;
  return acc;
}

namespace {

// num is known to be a multiple of den. Long division from the top loses
// digits when den has a small leading coefficient, so solve den * x = num
// in the least-squares sense instead.
Poly exact_quotient(const Poly& num, const Poly& den) {
  if (num.is_zero()) return Poly();
  const int dn = num.degree(), dd = den.degree();
  if (dd == 0) return num * (1.0 / den.coeff(0));
  if (dn < dd) return Poly();
  const int dq = dn - dd;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(dn + 1, dq + 1);
  Eigen::VectorXcd b(dn + 1);
  for (int j = 0; j <= dq; ++j)
    for (int i = 0; i <= dd; ++i) A(i + j, j) = den.coeff(i);
  for (int i = 0; i <= dn; ++i) b(i) = num.coeff(i);
  const Eigen::VectorXcd x = A.colPivHouseholderQr().solve(b);
  return Poly(std::vector<Cx>(x.data(), x.data() + x.size()));
}

}  // namespace

Poly det_bareiss(const PolyMatrix& in) {
  check_square(in);
  PolyMatrix m = in;
  const size_t n = m.size();
  if (n == 0) return Poly::constant(1.0);
  Poly prev = Poly::constant(1.0);
  bool negate = false;
  for (size_t k = 0; k + 1 < n; ++k) {
    // Largest-coefficient pivot among the remaining rows.
    size_t piv = k;
    for (size_t i = k + 1; i < n; ++i)
      if (m[i][k].max_abs() > m[piv][k].max_abs()) piv = i;
    if (m[piv][k].is_zero()) return Poly();
    if (piv != k) {
      std::swap(m[piv], m[k]);
      negate = !negate;
    }
    for (size_t i = k + 1; i < n; ++i) {
      for (size_t j = k + 1; j < n; ++j)
        m[i][j] = exact_quotient(m[k][k] * m[i][j] - m[i][k] * m[k][j], prev);
      m[i][k] = Poly();
    }
    prev = m[k][k];
  }
  return negate ? -m[n - 1][n - 1] : m[n - 1][n - 1];
}

Poly det(const PolyMatrix& m) {
  return m.size() <= 4 ? det_cofactor_parallel(m) : det_bareiss(m);
}

Cx det_numeric(const std::vector<std::vector<Cx>>& m) {
  const Eigen::Index n = static_cast<Eigen::Index>(m.size());
  if (n == 0) return 1.0;
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = m[i][j];
  return a.determinant();
}

PolyMatrix m_matrix(const std::vector<int>& indices, const SectionData& sec, const TwistData& tw,
                    const QFrame& frame, ShiftConvention conv) {
  const int j = static_cast<int>(indices.size());
  if (j < 1 || j > tw.N) throw Error(ErrorKind::BadIndices, "need 1..N rows");
  for (int a = 0; a < j; ++a) {
    if (indices[a] < 1 || indices[a] > tw.N || indices[a] > static_cast<int>(sec.s.size()))
      throw Error(ErrorKind::BadIndices, "row index out of range");
    if (a > 0 && indices[a] <= indices[a - 1])
      throw Error(ErrorKind::BadIndices, "row indices must increase");
  }
  const int base = conv == ShiftConvention::one_sided ? 0 : 1 - j;
  PolyMatrix m(j);
  for (int a = 0; a < j; ++a) {
    const int i = indices[a];
    const Cx t = tw.zeta(i);
    Cx tp = 1.0;
    for (int c = 0; c < j; ++c) {
      m[a].push_back(qshift(sec.s[i - 1], base + 2 * c, frame) * tp);
      tp *= t;
    }
  }
  return m;
}

Poly m_det(const std::vector<int>& indices, const SectionData& sec, const TwistData& tw,
           const QFrame& frame, ShiftConvention conv) {
  return det(m_matrix(indices, sec, tw, frame, conv));
}

Cx vandermonde_det(const std::vector<Cx>& g) {
  Cx v = 1.0;
  for (size_t i = 0; i < g.size(); ++i)
    for (size_t j = i + 1; j < g.size(); ++j) v *= g[j] - g[i];
  return v;
}

DFactorization d_factorize(int k, const SectionData& sec, const TwistData& tw,
                           const PunctureData& structure, const QFrame& frame) {
  DFactorization f;
  if (k < 0 || k > tw.N) throw Error(ErrorKind::BadIndices, "k out of range");
  if (k == 0) {
    f.d_poly = f.v_poly = Poly::constant(1.0);
    return f;
  }
  std::vector<int> rows;
  for (int i = tw.N - k + 1; i <= tw.N; ++i) rows.push_back(i);
  f.d_poly = m_det(rows, sec, tw, frame, ShiftConvention::one_sided);
  if (f.d_poly.is_zero()) throw Error(ErrorKind::ZeroDeterminant, "D_" + std::to_string(k) + " = 0");

  const std::vector<Cx> wr = w_roots(k, structure, frame);
  if (f.d_poly.degree() < static_cast<int>(wr.size()))
    throw Error(ErrorKind::NotDivisible, "deg D_k below deg W_k");
  SyntheticResult sr = divide_by_roots(f.d_poly, wr);
  if (sr.rel_remainder > kNotDivisibleTol)
    throw Error(ErrorKind::NotDivisible,
                "D_" + std::to_string(k) + " / W_k remainder " + std::to_string(sr.rel_remainder));
  // D_k = alpha W_k V_k with W_k the literal product, so fold its leading
  // coefficient into alpha.
  const Cx wlead = w_poly(k, structure, frame).lead();
  auto [v, lead] = monicize(sr.quotient);
  f.v_poly = v;
  f.alpha = lead / wlead;
  if (v.degree() >= 1) f.bethe_zeros = roots(v, frame);
  return f;
}

JacobiReport desnanot_jacobi_check(const PolyMatrix& m, const QFrame& frame, std::uint64_t seed) {
  (void)frame;
  check_square(m);
  const size_t n = m.size();
  if (n < 3) throw Error(ErrorKind::BadShape, "Desnanot-Jacobi needs size >= 3");
  const Poly d11 = det(minor_of(m, 0, 0));
  const Poly d2n = det(minor_of(m, 1, n - 1));
  const Poly d1n = det(minor_of(m, 0, n - 1));
  const Poly d21 = det(minor_of(m, 1, 0));
  const Poly inner = det(minor_of(minor_of(m, 0, 0), 0, n - 2));
  const Poly full = det(m);

  JacobiReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int s = 0; s < 10; ++s) {
    const Cx z(U(rng), U(rng));
    const Cx a = d11(z) * d2n(z), b = d1n(z) * d21(z), r = inner(z) * full(z);
    const Cx lhs = a - b;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(r)});
    const double dev = scale == 0.0 ? 0.0 : std::abs(lhs - r) / scale;
    rep.max_rel = std::max(rep.max_rel, dev);
    if (s == 0) {
      rep.lhs_first = lhs;
      rep.rhs_first = r;
    }
  }
  return rep;
}

}  // namespace qoper

#include "qoper/structpoly.hpp"

#include <algorithm>

namespace qoper {

int PunctureData::weight(size_t m, int i) const {
  const auto& w = punctures[m].weights;
  if (i < 1 || i > static_cast<int>(w.size())) return 0;
  return w[i - 1];
}

int PunctureData::ell(size_t m, int i) const {
  int s = 0;
  for (int j = 1; j <= i; ++j) s += weight(m, j);
  return s;
}

int PunctureData::total_weight() const {
  int s = 0;
  for (size_t m = 0; m < punctures.size(); ++m) s += ell(m, N - 1);
  return s;
}

void PunctureData::validate(const QFrame& frame) const {
  if (N < 2) throw Error(ErrorKind::InvalidInput, "N must be at least 2");
  for (size_t m = 0; m < punctures.size(); ++m) {
    const auto& p = punctures[m];
    if (p.z == Cx{}) throw Error(ErrorKind::InvalidInput, "puncture at 0");
    if (static_cast<int>(p.weights.size()) != N - 1)
      throw Error(ErrorKind::InvalidInput, "puncture needs N-1 weights");
    for (int w : p.weights)
      if (w < 0) throw Error(ErrorKind::InvalidInput, "negative weight");
    for (size_t n = 0; n < m; ++n)
      if (lattice_related(p.z, punctures[n].z, frame))
        throw Error(ErrorKind::InvalidInput, "punctures share a q-lattice");
  }
}

std::vector<Cx> lambda_roots(int i, const PunctureData& data, const QFrame& frame) {
  std::vector<Cx> r;
  for (size_t m = 0; m < data.punctures.size(); ++m)
    for (int j = data.ell(m, i - 1); j < data.ell(m, i); ++j)
      r.push_back(frame.qpow(-j) * data.punctures[m].z);
  return r;
}

Poly lambda_poly(int i, const PunctureData& data, const QFrame& frame) {
  return Poly::from_roots(lambda_roots(i, data, frame));
}

Poly p_poly(int i, const PunctureData& data, const QFrame& frame) {
  Poly p = Poly::constant(1.0);
  for (int j = 1; j <= i; ++j) p *= lambda_poly(j, data, frame);
  return p;
}

std::vector<Cx> w_roots(int k, const PunctureData& data, const QFrame& frame) {
  // A root r of P_i becomes q^{1-i} r in P_i^{(i-1)}.
  std::vector<Cx> out;
  for (int i = 1; i <= k - 1; ++i) {
    Cx s = frame.qpow(1 - i);
    for (int j = 1; j <= i; ++j)
      for (const Cx& r : lambda_roots(j, data, frame)) out.push_back(s * r);
  }
  return out;
}

Poly w_poly(int k, const PunctureData& data, const QFrame& frame) {
  Poly w = Poly::constant(1.0);
  for (int i = 1; i <= k - 1; ++i) w *= qshift(p_poly(i, data, frame), 2 * (i - 1), frame);
  return w;
}

std::vector<Cx> pi_roots(int k, const PunctureData& data, const QFrame& frame) {
  std::vector<Cx> r = lambda_roots(k, data, frame);
  Cx s = frame.qpow_half(2 - k);
  for (Cx& x : r) x *= s;
  return r;
}

Poly pi_poly(int k, const PunctureData& data, const QFrame& frame) {
  return qshift(lambda_poly(k, data, frame), k - 2, frame);
}

Poly f_poly(int k, const PunctureData& data, const QFrame& frame) {
  if (k <= 0) return Poly::constant(1.0);
  return qshift(w_poly(k, data, frame), 1 - k, frame);
}

FFuncReport check_ffunc(const PunctureData& data, const QFrame& frame) {
  FFuncReport rep;
  for (int k = 1; k <= data.N - 1; ++k) {
    Poly fk = f_poly(k, data, frame);
    Poly lhs = f_poly(k - 1, data, frame) * f_poly(k + 1, data, frame);
    Poly rhs = pi_poly(k, data, frame) * qshift(fk, 1, frame) * qshift(fk, -1, frame);
    double r = rel_diff(lhs, rhs);
    rep.residuals.push_back(r);
    rep.max_rel = std::max(rep.max_rel, r);
  }
  return rep;
}

}  // namespace qoper

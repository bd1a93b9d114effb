#pragma once

#include <cstdint>
#include <vector>

#include "qoper/poly.hpp"
#include "qoper/structpoly.hpp"

namespace qoper {

// Twists stored once as kappa_1..kappa_N; zeta_a = kappa_{N+1-a}.
struct TwistData {
  int N = 2;
  std::vector<Cx> kappa;

  Cx k(int i) const { return kappa.at(i - 1); }
  Cx zeta(int a) const { return kappa.at(N - a); }
  static TwistData from_zeta(const std::vector<Cx>& zeta);
  // SL(N) product condition and distinct entries; lattice-disjointness too
  // when require_disjoint is set.
  void validate(const QFrame& frame, bool require_disjoint) const;
};

struct SectionData {
  std::vector<Poly> s;      // s_1 .. s_N
  std::vector<Cx> alpha;    // alpha_1 .. alpha_N when known
};

struct DFactorization {
  Poly d_poly;
  Poly v_poly;
  Cx alpha = 1.0;
  std::vector<Cx> bethe_zeros;
};

enum class ShiftConvention { one_sided, symmetric };

using PolyMatrix = std::vector<std::vector<Poly>>;

Poly det_cofactor_serial(const PolyMatrix& m);
// Parallel over the first row; each branch is summed in the serial order so
// the result is bitwise equal to det_cofactor_serial.
Poly det_cofactor_parallel(const PolyMatrix& m);
Poly det_bareiss(const PolyMatrix& m);
// Cofactors up to size 4, Bareiss above.
Poly det(const PolyMatrix& m);

Cx det_numeric(const std::vector<std::vector<Cx>>& m);

PolyMatrix m_matrix(const std::vector<int>& indices, const SectionData& sec, const TwistData& tw,
                    const QFrame& frame, ShiftConvention conv);
Poly m_det(const std::vector<int>& indices, const SectionData& sec, const TwistData& tw,
           const QFrame& frame, ShiftConvention conv);

Cx vandermonde_det(const std::vector<Cx>& gammas);

inline constexpr double kNotDivisibleTol = 1e-7;

DFactorization d_factorize(int k, const SectionData& sec, const TwistData& tw,
                           const PunctureData& structure, const QFrame& frame);

struct JacobiReport {
  double max_rel = 0.0;
  Cx lhs_first, rhs_first;  // both sides at the first sample point
};
JacobiReport desnanot_jacobi_check(const PolyMatrix& m, const QFrame& frame,
                                   std::uint64_t seed = 7);

}  // namespace qoper

#pragma once

#include <cstdint>
#include <vector>

#include "qoper/bethe.hpp"
#include "qoper/poly.hpp"
#include "qoper/structpoly.hpp"
#include "qoper/wronskian.hpp"

namespace qoper {

inline constexpr double kPolynomialTol = 1e-9;

Rational rshift(const Rational& r, int halfsteps, const QFrame& frame);
Rational rmul(const Rational& a, const Rational& b);
Rational radd(const Rational& a, const Rational& b);
Rational rscale(const Rational& a, Cx s);
// Quotient of num by den plus the remainder size relative to num.
Poly to_poly(const Rational& r, double* rel_remainder);

struct SL2Canonical {
  Rational a;  // zeta^{-1} Q_-(qz) / Q_-(z)
  Poly rho;
  Poly T;
  Cx zeta;
  double remainder = 0.0;
};

// Relative remainder of zeta^{-1} rho(z/q) Q_-(qz) + zeta rho(z) Q_-(z/q) modulo Q_-.
double sl2_transfer_remainder(const Poly& Q_minus, const Poly& rho, Cx zeta, const QFrame& frame);

// rho is Lambda_1 of the rank-one structure. Throws NotPolynomial when T
// fails to be a polynomial, then WronskianMismatch when
// zeta^{-1} Q_+ Q_-^{(1)} - zeta Q_+^{(1)} Q_- differs from rho.
SL2Canonical sl2_canonical(const Poly& Q_minus, const Poly& Q_plus, Cx zeta, const PunctureData& structure,
                           const QFrame& frame);

// f_1 sampled at q^j z0, j = 0..J, from two starting values.
std::vector<Cx> sl2_generate_recursion(const SL2Canonical& c, Cx z0, Cx f0, Cx f1, int J, const QFrame& frame);
// Same samples produced by the first-order system from (f_1, f_2) at z0.
std::vector<Cx> sl2_generate_system(const SL2Canonical& c, Cx z0, Cx f1, Cx f2, int J, const QFrame& frame);
// Max relative residual of f^{(2)} - (T^{(1)}/rho) f^{(1)} + (rho^{(1)}/rho) f over the samples.
double sl2_scalar_apply(const SL2Canonical& c, const std::vector<Cx>& samples, Cx z0, const QFrame& frame);

struct SL3Canonical {
  Rational a1, a2, a3;
  Poly Lambda1, Lambda2;
  Poly V1, V2;
  Cx zeta[3];
  double minor_mismatch = 0.0;   // worst disagreement of the two forms of each a_i
  double product_defect = 0.0;   // max |a1 a2 a3 - 1| at sample points
};

SL3Canonical sl3_canonical(const SectionData& sections, const TwistData& tw, const PunctureData& structure,
                           const QFrame& frame, std::uint64_t seed = 11);

struct SL3Transfer {
  Poly T1, T2;
  double remainder = 0.0;        // worst relative remainder when clearing denominators
  double scalar_residual = 0.0;  // third-order relation on generated samples
};

SL3Transfer sl3_transfer(const SL3Canonical& c, const QFrame& frame, std::uint64_t seed = 13);

enum class ClassicalMode { regular, irregular };

struct ClassicalReport {
  Poly wronskian;
  Poly rho;
  Cx scale;       // wronskian = scale * rho
  Rational u;
  Rational t;
  std::vector<Cx> c;            // residues of t at z_m
  ResidualReport bethe;         // additive equations at the roots of q_-
  std::vector<Cx> t_residues;   // residue of t at each root of q_-
  double pole_defect = 0.0;     // worst |residue| or double-pole coefficient at roots of q_-
};

ClassicalReport classical_sl2(const Poly& q_minus, const Poly& q_plus, const std::vector<Cx>& z,
                              const std::vector<int>& k, Cx a, ClassicalMode mode, const QFrame& frame);

}  // namespace qoper

#pragma once

#include <vector>

#include "qoper/bethe.hpp"
#include "qoper/poly.hpp"
#include "qoper/structpoly.hpp"
#include "qoper/wronskian.hpp"

namespace qoper {

// Level-indexed: Q[0] = Q[N] = 1, Qtilde and Pi meaningful for 1..N-1.
struct QSystem {
  int N = 2;
  std::vector<Poly> Q, Qtilde, Pi;
};

// D[0] = 1, D[N] = F_N; Dtilde meaningful for 1..N-1.
struct DSystem {
  int N = 2;
  std::vector<Poly> D, Dtilde, F;
};

inline constexpr double kQQInconsistentTol = 1e-8;

// Least-squares solve of
//   kappa_{k+1} Q_k^{(-1/2)} Qt^{(1/2)} - kappa_k Q_k^{(1/2)} Qt^{(-1/2)}
//     = (kappa_{k+1} - kappa_k) Q_{k-1} Q_{k+1} Pi_k
// for Qt. rel_residual receives the coefficient-wise relative residual.
Poly build_qtilde(int k, const Poly& Qkm1, const Poly& Qk, const Poly& Qkp1, const Poly& Pik,
                  Cx kappa_k, Cx kappa_k1, const QFrame& frame, double* rel_residual = nullptr);

QSystem build_qsystem(const BetheProblem& prob, const BetheRoots& roots);

// Relative coefficient residual of each level, as real numbers in residuals.
ResidualReport qq_residual(const QSystem& sys, const TwistData& tw, const QFrame& frame);

DSystem dress(const QSystem& sys, const PunctureData& structure, const QFrame& frame);
ResidualReport qqv_residual(const DSystem& dsys, const TwistData& tw, const QFrame& frame);

// LHS - RHS of level k evaluated at one point.
Cx qq_defect(const QSystem& sys, const TwistData& tw, const QFrame& frame, int k, Cx z);
Cx qqv_defect(const DSystem& dsys, const TwistData& tw, const QFrame& frame, int k, Cx z);

}  // namespace qoper

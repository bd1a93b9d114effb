#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qoper/poly.hpp"
#include "qoper/structpoly.hpp"
#include "qoper/wronskian.hpp"

namespace qoper {

struct BetheProblem {
  int N = 2;
  PunctureData punctures;
  TwistData twists;
  std::vector<int> r;  // r_1 .. r_{N-1}
  QFrame frame;

  int total_roots() const;
  void validate(bool require_disjoint_twists = false) const;
};

// sum of weights + root count + 4
int default_window(const PunctureData& p, const std::vector<int>& r);

BetheProblem make_problem(int N, PunctureData punctures, std::vector<Cx> kappa, std::vector<int> r,
                          Cx sqrt_q, ToleranceConfig tol = {}, int window = 0);

struct BetheRoots {
  std::vector<std::vector<Cx>> u;  // u[k-1][a-1]
};

struct ResidualReport {
  std::vector<Cx> residuals;
  double max_abs = 0.0;
  bool converged = true;

  void push(Cx r);
};

// Product form. The same-level product skips b = a and the whole product is
// compared against q, so a solution gives exactly zero.
ResidualReport xxz_residual(const BetheProblem& prob, const BetheRoots& roots);
// TQ form built from Pi_k and Q_k, plus 1. At a solution this is minus the
// product-form residual.
ResidualReport xxz_residual_tq(const BetheProblem& prob, const BetheRoots& roots);

// Rank-one equations written with the single twist zeta of the two-by-two
// quantum Wronskian; the residual is LHS/RHS - 1.
ResidualReport sl2_q_residual(const std::vector<Cx>& z, const std::vector<int>& k, Cx zeta, Cx q,
                              const std::vector<Cx>& w);

struct NondegReport {
  bool ok = true;
  std::vector<std::string> violations;
};
NondegReport nondegenerate_check(const BetheProblem& prob, const BetheRoots& roots);

struct NewtonOptions {
  int starts = 32;
  std::uint64_t seed = 0;
  bool finite_difference = false;
  int max_iter = 80;
};

struct SolveResult {
  BetheRoots roots;
  ResidualReport report;
  int start_index = -1;  // winning start, or the best candidate when not converged
};

SolveResult solve_newton(const BetheProblem& prob, const std::optional<BetheRoots>& seed_roots,
                         const NewtonOptions& opt = {});
// Reference implementation: starts run one after another.
SolveResult solve_newton_serial(const BetheProblem& prob,
                                const std::optional<BetheRoots>& seed_roots,
                                const NewtonOptions& opt = {});

// Pole-cleared system used by Newton, exposed for testing the Jacobian.
struct ClearedSystem {
  std::vector<Cx> g;
  std::vector<Cx> jac;  // row-major n x n
};
ClearedSystem cleared_system(const BetheProblem& prob, const std::vector<Cx>& x,
                             bool finite_difference);

// Rational (XXX) equations in additive coordinates. kappa are the
// multiplicative twists; weights come from punctures with z holding sigma.
ResidualReport xxx_residual(int N, const std::vector<Cx>& kappa, const PunctureData& sigma,
                            const std::vector<std::vector<Cx>>& upsilon, Cx epsilon);

ResidualReport gaudin_residual(int N, const std::vector<Cx>& kappa_exp, const PunctureData& sigma,
                               const std::vector<std::vector<Cx>>& upsilon);

// sum_m k_m/(z_m - w_i) - sum_{j != i} 2/(w_j - w_i)
ResidualReport classical_sl2_residual(const std::vector<Cx>& z, const std::vector<int>& k,
                                      const std::vector<Cx>& w);
// Same with the constant 2a from the exponential twist added.
ResidualReport inhomogeneous_sl2_residual(const std::vector<Cx>& z, const std::vector<int>& k,
                                          Cx a, const std::vector<Cx>& w);
// Type A Cartan pairing, w[k-1] are the roots coloured by simple root k.
ResidualReport classical_slN_residual(int N, const PunctureData& points,
                                      const std::vector<std::vector<Cx>>& w);

struct LimitParams {
  int N = 2;
  PunctureData sigma;
  std::vector<std::vector<Cx>> upsilon;
  Cx epsilon = 1.0;
  std::vector<Cx> kappa_exp;
};

struct LimitLeg {
  std::vector<double> steps;
  std::vector<double> deviations;
  std::vector<double> ratios;  // deviation[i] / deviation[i+1]
  double order = 0.0;          // mean log2 of the ratios
};

struct LimitReport {
  LimitLeg xxz_to_xxx;
  LimitLeg xxx_to_gaudin;
};

// XXZ data at radius R: q = e^{R eps}, u = e^{R upsilon}, z = e^{R (sigma - eps)}.
// With weights only on the first node this matches the XXX equations term by term.
BetheProblem xxz_at_radius(const LimitParams& lp, double R, BetheRoots& roots_out);

LimitReport limit_flow(const LimitParams& lp, const std::vector<double>& R_sequence,
                       const std::vector<double>& eps_sequence);

}  // namespace qoper

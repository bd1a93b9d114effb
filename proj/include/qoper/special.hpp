#pragma once

#include <utility>
#include <vector>

#include "qoper/bethe.hpp"
#include "qoper/poly.hpp"
#include "qoper/reconstruct.hpp"
#include "qoper/wronskian.hpp"

namespace qoper {

struct TRSInstance {
  Cx q = 3.0;
  Cx zeta = 2.0;
  Cx z_plus, z_minus;
  Cx p_plus, p_minus;

  void validate() const;
  // q^{-1} (zeta^{-1} - zeta)^{-1}
  Cx c() const;
};

struct TRSResiduals {
  Cx sum;      // momentum relation minus q (z_+ + z_-)
  Cx product;  // p_+ p_- / q - z_+ z_-
  Cx implied_sum, implied_product;  // z_+ + z_- and z_+ z_- read off from the momenta
};

TRSResiduals trs_relations(const TRSInstance& inst);

// Both momentum branches for given positions; p_minus of each returned instance
// solves the quadratic obtained by eliminating p_plus.
std::pair<TRSInstance, TRSInstance> trs_solve(Cx q, Cx zeta, Cx z_plus, Cx z_minus);

// Relative gap between zeta^{-1} Q_+ Q_-(qz) - zeta Q_+(qz) Q_- and (z - z_+)(z - z_-)
// for Q_- = z - p_-, Q_+ = c (z - p_+).
double trs_wronskian_gap(const TRSInstance& inst);

struct KTheoryInstance {
  int N = 2;
  std::vector<Cx> kappa;
  std::vector<Cx> a;                 // equivariant parameters, also the zeros of Pi
  std::vector<std::vector<Cx>> p;    // p[a-1][i-1] = p_{a,i}
  Cx sqrt_q = 2.0;

  int L() const { return static_cast<int>(a.size()); }
  std::vector<int> degrees() const;
};

// s = sum_i (-1)^i p_i z^{rho - i} with p_0 = 1.
Poly assemble_s(const std::vector<Cx>& p);
// Monic parts of the sections and their p coefficients; scalings keeps the
// leading coefficients that were divided out.
struct PFragment {
  std::vector<std::vector<Cx>> p;
  std::vector<Cx> scalings;
};
PFragment extract_p_coeffs(const SectionData& sections);

struct KTheoryReport {
  Poly det_m;
  Poly rhs;
  std::vector<double> coeff_residuals;  // L+1 entries, relative to max |rhs|
  std::vector<double> sample_residuals;
  double max_rel = 0.0;
};

// det M(z) against det V(kappa_a q^{rho_a}) Pi(q^{(1-N)/2} z), with row a of M
// given by kappa_a^c s_a(q^{(1-N)/2 + c} z). Empty sample_points uses
// max(L+3, 8) points on a circle.
KTheoryReport ktheory_relation(const KTheoryInstance& inst, const QFrame& frame,
                               const std::vector<Cx>& sample_points = {});

// N = 2 instance from momenta, kappa = (zeta^{-1}, zeta).
KTheoryInstance ktheory_from_trs(const TRSInstance& inst);
// Sections of a solved problem. Row a takes the section twisted by kappa_a,
// which is s_{N+1-a} in the oper numbering.
KTheoryInstance ktheory_from_sections(const BetheProblem& prob, const SectionData& sections);

}  // namespace qoper

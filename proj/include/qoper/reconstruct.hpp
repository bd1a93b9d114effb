#pragma once

#include <string>
#include <vector>

#include "qoper/bethe.hpp"
#include "qoper/qqsys.hpp"
#include "qoper/wronskian.hpp"

namespace qoper {

inline constexpr double kIdentityTol = 1e-8;

// Unique f_k with det[f_j, g_j f_j^{(1)}, ..., g_j^{k-1} f_j^{(k-1)}]_{j=1..k} = g,
// solved coefficient by coefficient.
Poly solve_next_poly(const std::vector<Poly>& f_known, const std::vector<Cx>& gammas, const Poly& g,
                     const QFrame& frame);

// Symmetric-shift determinant over the given rows divided by the Vandermonde
// of their twists.
Poly normalized_minor(const std::vector<int>& rows, const SectionData& sec, const TwistData& tw,
                      const QFrame& frame);

struct ReconstructResult {
  SectionData sections;
  std::vector<double> d_residuals;       // D_{k+1} check, k = 1..N-1
  std::vector<double> dtilde_residuals;  // Dtilde_k check, k = 1..N-1
};

ReconstructResult reconstruct_sections(const DSystem& dsys, const TwistData& tw, const QFrame& frame);

struct Stage {
  std::string name;
  double residual = 0.0;
  bool pass = true;
};

struct Certificate {
  std::vector<Stage> stages;
  SectionData sections;
  std::vector<Cx> alphas;
  bool pass = true;

  void add(const std::string& name, double residual, double tol);
};

struct CertOptions {
  // Test hook: factorize with zeta_k = kappa_k instead of kappa_{N+1-k}.
  bool wrong_twist_convention = false;
};

Certificate correspondence_check(const BetheProblem& prob, const BetheRoots& roots,
                                 const CertOptions& opt = {});

// Greedy nearest matching; max |a - b| / max(1, |b|).
double match_roots(std::vector<Cx> got, const std::vector<Cx>& want);

}  // namespace qoper

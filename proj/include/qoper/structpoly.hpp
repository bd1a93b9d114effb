#pragma once

#include <vector>

#include "qoper/poly.hpp"

namespace qoper {

struct Puncture {
  Cx z;
  std::vector<int> weights;  // l^1 .. l^{N-1}
};

struct PunctureData {
  int N = 2;
  std::vector<Puncture> punctures;

  // Cumulative weight ell_m^i, with ell^0 = 0 and ell^i frozen past N-1.
  int ell(size_t m, int i) const;
  int weight(size_t m, int i) const;
  int total_weight() const;
  // Throws InvalidInput on zero positions, negative weights, wrong lengths or
  // lattice-related punctures.
  void validate(const QFrame& frame) const;
};

Poly lambda_poly(int i, const PunctureData& data, const QFrame& frame);
std::vector<Cx> lambda_roots(int i, const PunctureData& data, const QFrame& frame);
Poly p_poly(int i, const PunctureData& data, const QFrame& frame);

// W_k = P_1 P_2^{(1)} ... P_{k-1}^{(k-2)}, the literal product. Its roots are
// listed by w_roots; the leading coefficient is the product of the shift scalings.
Poly w_poly(int k, const PunctureData& data, const QFrame& frame);
std::vector<Cx> w_roots(int k, const PunctureData& data, const QFrame& frame);

// Pi_k = Lambda_k(q^{k/2-1} z); leading coefficient p_k = q^{(k/2-1) deg Lambda_k}.
Poly pi_poly(int k, const PunctureData& data, const QFrame& frame);
std::vector<Cx> pi_roots(int k, const PunctureData& data, const QFrame& frame);

// F_k = W_k(q^{(1-k)/2} z), F_0 = 1.
Poly f_poly(int k, const PunctureData& data, const QFrame& frame);

struct FFuncReport {
  std::vector<double> residuals;  // index k-1 for k = 1..N-1
  double max_rel = 0.0;
};
FFuncReport check_ffunc(const PunctureData& data, const QFrame& frame);

}  // namespace qoper

#pragma once

#include <climits>
#include <complex>
#include <optional>
#include <random>
#include <vector>

#include "qoper/error.hpp"

namespace qoper {

using Cx = std::complex<double>;

struct ToleranceConfig {
  double rel_identity = 1e-9;
  double newton_conv = 1e-10;
  double root_find = 1e-12;
  double trim = 1e-13;

  void validate() const;
};

// Degree of the zero polynomial.
inline constexpr int kDegNegInf = INT_MIN;

// Ascending coefficients. Empty means zero.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<Cx> coeffs, double trim_tol = ToleranceConfig{}.trim);
  Poly(std::initializer_list<Cx> coeffs);

  static Poly constant(Cx c);
  static Poly monomial(int degree, Cx c = 1.0);
  static Poly from_roots(const std::vector<Cx>& roots);

  int degree() const { return c_.empty() ? kDegNegInf : static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Cx>& coeffs() const { return c_; }
  // Coefficient of z^i, zero outside the stored range.
  Cx coeff(int i) const { return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[i] : Cx{}; }
  Cx lead() const { return c_.empty() ? Cx{} : c_.back(); }
  double max_abs() const;

  Cx operator()(Cx z) const { return eval(z); }
  Cx eval(Cx z) const;
  Poly derivative() const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  Poly& operator*=(Cx s);

 private:
  std::vector<Cx> c_;
};

Poly operator+(Poly a, const Poly& b);
Poly operator-(Poly a, const Poly& b);
Poly operator-(const Poly& a);
Poly operator*(const Poly& a, const Poly& b);
Poly operator*(Poly a, Cx s);
Poly operator*(Cx s, Poly a);

enum class ArithOp { add, sub, mul };
Poly arith(const Poly& a, const Poly& b, ArithOp op);
inline Cx eval(const Poly& p, Cx z) { return p.eval(z); }

Poly trim(std::vector<Cx> c, double rel_tol);

// Max coefficient difference over the larger max coefficient. Zero if both are zero.
double rel_diff(const Poly& a, const Poly& b);

struct QFrame {
  Cx sqrt_q;
  ToleranceConfig tol;
  int lattice_window = 16;

  QFrame() : sqrt_q(2.0) {}
  QFrame(Cx sq, ToleranceConfig t = {}, int window = 16);

  Cx q() const { return sqrt_q * sqrt_q; }
  // sqrt_q^h for any integer h, by repeated squaring.
  Cx qpow_half(long h) const;
  Cx qpow(long n) const { return qpow_half(2 * n); }
};

Cx ipow(Cx base, long n);

// p(z) -> p(q^{h/2} z).
Poly qshift(const Poly& p, int halfsteps, const QFrame& frame);

std::pair<Poly, Cx> monicize(const Poly& p);

struct DivResult {
  Poly quotient;
  Poly remainder;
};
DivResult divmod(const Poly& num, const Poly& den);

// Divide by prod (z - r_i) one linear factor at a time. rel_remainder is the
// max coefficient of p - quotient * prod(z - r_i) over max coefficient of p.
struct SyntheticResult {
  Poly quotient;
  double rel_remainder = 0.0;
};
SyntheticResult divide_by_roots(const Poly& p, const std::vector<Cx>& roots);

std::vector<Cx> roots(const Poly& p, const QFrame& frame, std::mt19937_64& rng);
std::vector<Cx> roots(const Poly& p, const QFrame& frame);

bool coprime_test(const Poly& a, const Poly& b, const QFrame& frame);

// n with a = q^n b inside the frame's window, smallest |n| first.
std::optional<int> lattice_related(Cx a, Cx b, const QFrame& frame);

// Rational function kept as numerator/denominator.
struct Rational {
  Poly num;
  Poly den;
  Cx eval(Cx z) const;
};

}  // namespace qoper

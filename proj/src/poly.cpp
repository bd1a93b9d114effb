#include "qoper/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qoper {

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorKind::ZeroInput: return "ZeroInput";
    case ErrorKind::BadIndices: return "BadIndices";
    case ErrorKind::BadShape: return "BadShape";
    case ErrorKind::NotDivisible: return "NotDivisible";
    case ErrorKind::ZeroDeterminant: return "ZeroDeterminant";
    case ErrorKind::PoleHit: return "PoleHit";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::Inconsistent: return "Inconsistent";
    case ErrorKind::DegenerateTwists: return "DegenerateTwists";
    case ErrorKind::VandermondeDegenerate: return "VandermondeDegenerate";
    case ErrorKind::ZeroConstantTerm: return "ZeroConstantTerm";
    case ErrorKind::IdentityFailure: return "IdentityFailure";
    case ErrorKind::NotPolynomial: return "NotPolynomial";
    case ErrorKind::MinorMismatch: return "MinorMismatch";
    case ErrorKind::WronskianMismatch: return "WronskianMismatch";
    case ErrorKind::PoleAtBetheRoot: return "PoleAtBetheRoot";
    case ErrorKind::BadDegrees: return "BadDegrees";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::InputError: return "InputError";
  }
  return "Unknown";
}

void ToleranceConfig::validate() const {
  if (!(rel_identity > 0 && newton_conv > 0 && root_find > 0 && trim > 0))
    throw Error(ErrorKind::InvalidInput, "tolerances must be positive");
  if (!(rel_identity >= newton_conv && newton_conv >= root_find))
    throw Error(ErrorKind::InvalidInput, "need rel_identity >= newton_conv >= root_find");
}

Poly trim(std::vector<Cx> c, double rel_tol) {
  return Poly(std::move(c), rel_tol);
}

Poly::Poly(std::vector<Cx> coeffs, double trim_tol) : c_(std::move(coeffs)) {
  for (const Cx& x : c_)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
      throw Error(ErrorKind::InvalidInput, "non-finite polynomial coefficient");
  double m = max_abs();
  if (m == 0.0) {
    c_.clear();
    return;
  }
  while (std::abs(c_.back()) <= trim_tol * m) c_.pop_back();
}

Poly::Poly(std::initializer_list<Cx> coeffs) : Poly(std::vector<Cx>(coeffs)) {}

Poly Poly::constant(Cx c) { return Poly(std::vector<Cx>{c}); }

Poly Poly::monomial(int degree, Cx c) {
  std::vector<Cx> v(degree + 1, Cx{});
  v[degree] = c;
  return Poly(std::move(v));
}

Poly Poly::from_roots(const std::vector<Cx>& roots) {
  std::vector<Cx> c{1.0};
  for (const Cx& r : roots) {
    c.push_back(0.0);
    for (size_t i = c.size() - 1; i > 0; --i) c[i] = c[i - 1] - r * c[i];
    c[0] = -r * c[0];
  }
  return Poly(std::move(c), 0.0);
}

double Poly::max_abs() const {
  double m = 0.0;
  for (const Cx& x : c_) m = std::max(m, std::abs(x));
  return m;
}

Cx Poly::eval(Cx z) const {
  Cx acc{};
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly();
  std::vector<Cx> d(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
  return Poly(std::move(d));
}

Poly& Poly::operator+=(const Poly& o) {
  std::vector<Cx> r(std::max(c_.size(), o.c_.size()), Cx{});
  for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
  for (size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
  *this = Poly(std::move(r));
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  std::vector<Cx> r(std::max(c_.size(), o.c_.size()), Cx{});
  for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
  for (size_t i = 0; i < o.c_.size(); ++i) r[i] -= o.c_[i];
  *this = Poly(std::move(r));
  return *this;
}

Poly& Poly::operator*=(const Poly& o) {
  if (c_.empty() || o.c_.empty()) {
    c_.clear();
    return *this;
  }
  std::vector<Cx> r(c_.size() + o.c_.size() - 1, Cx{});
  for (size_t i = 0; i < c_.size(); ++i)
    for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  *this = Poly(std::move(r));
  return *this;
}

Poly& Poly::operator*=(Cx s) {
  for (Cx& x : c_) x *= s;
  *this = Poly(std::move(c_));
  return *this;
}

Poly operator+(Poly a, const Poly& b) { return a += b; }
Poly operator-(Poly a, const Poly& b) { return a -= b; }
Poly operator-(const Poly& a) { return a * Cx(-1.0); }
Poly operator*(const Poly& a, const Poly& b) {
  Poly r = a;
  return r *= b;
}
Poly operator*(Poly a, Cx s) { return a *= s; }
Poly operator*(Cx s, Poly a) { return a *= s; }

Poly arith(const Poly& a, const Poly& b, ArithOp op) {
  switch (op) {
    case ArithOp::add: return a + b;
    case ArithOp::sub: return a - b;
    case ArithOp::mul: return a * b;
  }
  return {};
}

double rel_diff(const Poly& a, const Poly& b) {
  double scale = std::max(a.max_abs(), b.max_abs());
  if (scale == 0.0) return 0.0;
  int n = std::max(a.degree(), b.degree());
  double m = 0.0;
  for (int i = 0; i <= n; ++i) m = std::max(m, std::abs(a.coeff(i) - b.coeff(i)));
  return m / scale;
}

Cx ipow(Cx base, long n) {
  if (n < 0) return 1.0 / ipow(base, -n);
  Cx r = 1.0;
  while (n) {
    if (n & 1) r *= base;
    base *= base;
    n >>= 1;
  }
  return r;
}

QFrame::QFrame(Cx sq, ToleranceConfig t, int window) : sqrt_q(sq), tol(t), lattice_window(window) {
  tol.validate();
  if (sq == Cx{} || !std::isfinite(sq.real()) || !std::isfinite(sq.imag()))
    throw Error(ErrorKind::InvalidInput, "sqrt_q must be finite and nonzero");
  if (window < 1) throw Error(ErrorKind::InvalidInput, "lattice window must be positive");
  // q must not be a root of unity of order <= window.
  Cx qq = q();
  Cx qn = 1.0;
  for (int n = 1; n <= window; ++n) {
    qn *= qq;
    if (std::abs(qn - 1.0) <= tol.rel_identity)
      throw Error(ErrorKind::InvalidInput, "q is a root of unity of order " + std::to_string(n));
  }
}

Cx QFrame::qpow_half(long h) const { return ipow(sqrt_q, h); }

Poly qshift(const Poly& p, int halfsteps, const QFrame& frame) {
  if (halfsteps == 0 || p.is_zero()) return p;
  Cx s = frame.qpow_half(halfsteps);
  std::vector<Cx> c = p.coeffs();
  Cx f = 1.0;
  for (Cx& x : c) {
    x *= f;
    f *= s;
  }
  return Poly(std::move(c), frame.tol.trim);
}

std::pair<Poly, Cx> monicize(const Poly& p) {
  if (p.is_zero()) throw Error(ErrorKind::ZeroPolynomial, "cannot monicize zero");
  Cx l = p.lead();
  std::vector<Cx> c = p.coeffs();
  for (Cx& x : c) x /= l;
  c.back() = 1.0;
  return {Poly(std::move(c), 0.0), l};
}

DivResult divmod(const Poly& num, const Poly& den) {
  if (den.is_zero()) throw Error(ErrorKind::ZeroPolynomial, "division by zero polynomial");
  int n = num.degree(), d = den.degree();
  if (num.is_zero() || n < d) return {Poly(), num};
  std::vector<Cx> r = num.coeffs();
  std::vector<Cx> q(n - d + 1, Cx{});
  Cx l = den.lead();
  for (int k = n - d; k >= 0; --k) {
    Cx t = r[k + d] / l;
    q[k] = t;
    for (int j = 0; j <= d; ++j) r[k + j] -= t * den.coeff(j);
  }
  r.resize(d);
  return {Poly(std::move(q)), Poly(std::move(r))};
}

SyntheticResult divide_by_roots(const Poly& p, const std::vector<Cx>& roots) {
  SyntheticResult out;
  if (p.is_zero()) return out;
  std::vector<Cx> a = p.coeffs();
  for (const Cx& r : roots) {
    if (a.size() <= 1) {
      a.assign(1, Cx{});
      break;
    }
    std::vector<Cx> b(a.size() - 1);
    b.back() = a.back();
    for (size_t k = b.size() - 1; k > 0; --k) b[k - 1] = a[k] + r * b[k];
    a = std::move(b);
  }
  out.quotient = Poly(std::move(a), 0.0);
  Poly back = out.quotient * Poly::from_roots(roots);
  double m = 0.0;
  for (int i = 0; i <= std::max(p.degree(), back.degree()); ++i)
    m = std::max(m, std::abs(p.coeff(i) - back.coeff(i)));
  out.rel_remainder = m / p.max_abs();
  return out;
}

namespace {

struct HornerPair {
  Cx p, dp;
  double bound;  // sum |a_k| |z|^k, scale for rounding error
};

HornerPair horner2(const std::vector<Cx>& a, Cx z) {
  Cx p{}, dp{};
  double b = 0.0, az = std::abs(z);
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    dp = dp * z + p;
    p = p * z + *it;
    b = b * az + std::abs(*it);
  }
  return {p, dp, b};
}

bool aberth(const std::vector<Cx>& a, std::vector<Cx>& z, double tol) {
  const int n = static_cast<int>(z.size());
  const double eps = std::numeric_limits<double>::epsilon();
  std::vector<char> done(n, 0);
  for (int it = 0; it < 500; ++it) {
    int active = 0;
    for (int i = 0; i < n; ++i) {
      if (done[i]) continue;
      HornerPair h = horner2(a, z[i]);
      if (std::abs(h.p) <= 8.0 * n * eps * h.bound) {
        done[i] = 1;
        continue;
      }
      ++active;
      Cx ratio = h.p / h.dp;
      Cx s{};
      for (int j = 0; j < n; ++j)
        if (j != i) s += 1.0 / (z[i] - z[j]);
      Cx w = ratio / (1.0 - ratio * s);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return false;
      z[i] -= w;
      if (std::abs(w) <= tol * (1.0 + std::abs(z[i]))) done[i] = 1;
    }
    if (active == 0) return true;
  }
  return std::all_of(done.begin(), done.end(), [](char c) { return c != 0; });
}

bool cx_less(const Cx& a, const Cx& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

double rebuild_error(const std::vector<Cx>& a, const std::vector<Cx>& z) {
  const Poly back = Poly::from_roots(z);
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - back.coeff(static_cast<int>(i))));
  return m;
}

// A multiple root comes out of the iteration as a small cloud of size
// ~eps^(1/k). A Newton step on the (k-1)-th derivative from the centroid
// recovers it to full precision; keep that whenever that does not make the reconstructed polynomial worse.
void merge_clusters(const std::vector<Cx>& a, std::vector<Cx>& z) {
  const size_t n = z.size();
  std::vector<char> used(n, 0);
  for (size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    std::vector<size_t> idx{i};
    for (size_t j = i + 1; j < n; ++j)
      if (!used[j] && std::abs(z[j] - z[i]) <= 1e-5 * (1.0 + std::abs(z[i]))) idx.push_back(j);
    if (idx.size() < 2) continue;
    Cx mean{};
    for (size_t j : idx) mean += z[j];
    mean /= static_cast<double>(idx.size());
    // polish on the derivative where the root is simple
    Poly d(a);
    for (size_t k = 1; k < idx.size(); ++k) d = d.derivative();
    const Poly dd = d.derivative();
    for (int it = 0; it < 5; ++it) {
      const Cx den = dd(mean);
      if (den == Cx{}) break;
      mean -= d(mean) / den;
    }
    std::vector<Cx> trial = z;
    for (size_t j : idx) trial[j] = mean;
    if (rebuild_error(a, trial) <= rebuild_error(a, z)) {
      z = std::move(trial);
      for (size_t j : idx) used[j] = 1;
    }
  }
}

}  // namespace

std::vector<Cx> roots(const Poly& p, const QFrame& frame, std::mt19937_64& rng) {
  if (p.is_zero()) throw Error(ErrorKind::ZeroPolynomial, "roots of zero polynomial");
  std::vector<Cx> c = p.coeffs();
  std::vector<Cx> out;
  double m = p.max_abs();
  size_t lo = 0;
  while (lo + 1 < c.size() && std::abs(c[lo]) <= frame.tol.trim * m) ++lo;
  out.assign(lo, Cx{});
  std::vector<Cx> a(c.begin() + lo, c.end());
  const int n = static_cast<int>(a.size()) - 1;
  if (n <= 0) return out;
  Cx l = a.back();
  for (Cx& x : a) x /= l;
  if (n == 1) {
    out.push_back(-a[0]);
    std::sort(out.begin(), out.end(), cx_less);
    return out;
  }

  double radius = std::pow(std::abs(a[0]), 1.0 / n);
  if (!(radius > 0)) radius = 1.0;
  std::vector<Cx> z(n);
  for (int k = 0; k < n; ++k)
    z[k] = std::polar(radius, 2.0 * std::numbers::pi * k / n + 0.4);

  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::vector<Cx> trial = z;
    if (aberth(a, trial, frame.tol.root_find)) {
      merge_clusters(a, trial);
      out.insert(out.end(), trial.begin(), trial.end());
      std::sort(out.begin(), out.end(), cx_less);
      return out;
    }
    for (int k = 0; k < n; ++k)
      z[k] = std::polar(radius * (0.5 + U(rng)), 2.0 * std::numbers::pi * U(rng));
  }
  throw Error(ErrorKind::NonConvergence, "Aberth iteration did not converge");
}

std::vector<Cx> roots(const Poly& p, const QFrame& frame) {
  std::mt19937_64 rng(0x5eed);
  return roots(p, frame, rng);
}

bool coprime_test(const Poly& a, const Poly& b, const QFrame& frame) {
  if (a.is_zero() || b.is_zero()) throw Error(ErrorKind::ZeroPolynomial, "coprime_test on zero");
  auto ra = roots(a, frame);
  auto rb = roots(b, frame);
  for (const Cx& x : ra)
    for (const Cx& y : rb)
      if (std::abs(x - y) / (1.0 + std::abs(x)) <= frame.tol.rel_identity) return false;
  return true;
}

std::optional<int> lattice_related(Cx a, Cx b, const QFrame& frame) {
  if (a == Cx{} || b == Cx{}) throw Error(ErrorKind::ZeroInput, "lattice_related on zero");
  const double tol = frame.tol.rel_identity;
  auto hit = [&](int n) {
    Cx t = frame.qpow(n) * b;
    return std::abs(a - t) <= tol * std::max(std::abs(a), std::abs(t));
  };
  if (hit(0)) return 0;
  for (int n = 1; n <= frame.lattice_window; ++n) {
    if (hit(n)) return n;
    if (hit(-n)) return -n;
  }
  return std::nullopt;
}

Cx Rational::eval(Cx z) const {
  Cx d = den.eval(z);
  if (d == Cx{}) throw Error(ErrorKind::PoleHit, "rational function pole");
  return num.eval(z) / d;
}

}  // namespace qoper

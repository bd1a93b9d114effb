#include "qoper/bethe.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qoper {

void ResidualReport::push(Cx r) {
  residuals.push_back(r);
  max_abs = std::max(max_abs, std::abs(r));
}

int BetheProblem::total_roots() const {
  int s = 0;
  for (int x : r) s += x;
  return s;
}

void BetheProblem::validate(bool require_disjoint_twists) const {
  if (N < 2) throw Error(ErrorKind::InvalidInput, "N must be at least 2");
  if (static_cast<int>(r.size()) != N - 1) throw Error(ErrorKind::InvalidInput, "need N-1 root counts");
  for (int x : r)
    if (x < 0) throw Error(ErrorKind::InvalidInput, "negative root count");
  if (punctures.N != N || twists.N != N) throw Error(ErrorKind::InvalidInput, "inconsistent N");
  punctures.validate(frame);
  twists.validate(frame, require_disjoint_twists);
}

int default_window(const PunctureData& p, const std::vector<int>& r) {
  int s = p.total_weight() + 4;
  for (int x : r) s += x;
  return s;
}

BetheProblem make_problem(int N, PunctureData punctures, std::vector<Cx> kappa, std::vector<int> r,
                          Cx sqrt_q, ToleranceConfig tol, int window) {
  BetheProblem p;
  p.N = N;
  punctures.N = N;
  if (window <= 0) window = default_window(punctures, r);
  p.punctures = std::move(punctures);
  p.twists.N = N;
  p.twists.kappa = std::move(kappa);
  p.r = std::move(r);
  p.frame = QFrame(sqrt_q, tol, window);
  return p;
}

namespace {

void check_shape(const BetheProblem& prob, const BetheRoots& roots) {
  if (static_cast<int>(roots.u.size()) != prob.N - 1)
    throw Error(ErrorKind::InvalidInput, "roots need N-1 levels");
  for (int k = 1; k < prob.N; ++k)
    if (static_cast<int>(roots.u[k - 1].size()) != prob.r[k - 1])
      throw Error(ErrorKind::InvalidInput, "root count mismatch at level " + std::to_string(k));
}

const std::vector<Cx>& level(const BetheRoots& roots, int k) {
  static const std::vector<Cx> empty;
  if (k < 1 || k > static_cast<int>(roots.u.size())) return empty;
  return roots.u[k - 1];
}

Cx safe_ratio(Cx num, Cx den, double scale) {
  if (std::abs(den) <= 1e-14 * scale) throw Error(ErrorKind::PoleHit, "Bethe factor denominator vanishes");
  return num / den;
}

}  // namespace

ResidualReport xxz_residual(const BetheProblem& prob, const BetheRoots& roots) {
  check_shape(prob, roots);
  ResidualReport rep;
  const QFrame& f = prob.frame;
  const Cx q = f.q(), sh = f.sqrt_q;
  for (int k = 1; k < prob.N; ++k) {
    const auto& uk = level(roots, k);
    const Cx ratio = prob.twists.k(k + 1) / prob.twists.k(k);
    for (size_t a = 0; a < uk.size(); ++a) {
      const Cx u = uk[a];
      Cx p = ratio;
      for (size_t s = 0; s < prob.punctures.punctures.size(); ++s) {
        const Cx z = prob.punctures.punctures[s].z;
        const Cx nu = f.qpow_half(2 * prob.punctures.ell(s, k) + k - 3) * u;
        const Cx de = f.qpow_half(2 * prob.punctures.ell(s, k - 1) + k - 3) * u;
        p *= safe_ratio(nu - z, de - z, std::abs(de) + std::abs(z));
      }
      for (int kk : {k - 1, k + 1})
        for (const Cx& c : level(roots, kk))
          p *= safe_ratio(sh * u - c, u / sh - c, std::abs(u / sh) + std::abs(c));
      for (size_t b = 0; b < uk.size(); ++b)
        if (b != a) p *= safe_ratio(u / q - uk[b], q * u - uk[b], std::abs(q * u) + std::abs(uk[b]));
      rep.push(p / q - 1.0);
    }
  }
  return rep;
}

ResidualReport xxz_residual_tq(const BetheProblem& prob, const BetheRoots& roots) {
  check_shape(prob, roots);
  ResidualReport rep;
  const QFrame& f = prob.frame;
  const Cx q = f.q(), sh = f.sqrt_q;
  std::vector<Poly> Q(prob.N + 1, Poly::constant(1.0));
  for (int k = 1; k < prob.N; ++k) Q[k] = Poly::from_roots(level(roots, k));
  for (int k = 1; k < prob.N; ++k) {
    const Poly pi = pi_poly(k, prob.punctures, f);
    const Cx ratio = prob.twists.k(k + 1) / prob.twists.k(k);
    for (const Cx& u : level(roots, k)) {
      const Cx num = pi(sh * u) * Q[k - 1](sh * u) * Q[k](u / q) * Q[k + 1](sh * u);
      const Cx den = pi(u / sh) * Q[k - 1](u / sh) * Q[k](q * u) * Q[k + 1](u / sh);
      if (den == Cx{}) throw Error(ErrorKind::PoleHit, "TQ denominator vanishes");
      rep.push(ratio * num / den + 1.0);
    }
  }
  return rep;
}

ResidualReport sl2_q_residual(const std::vector<Cx>& z, const std::vector<int>& k, Cx zeta, Cx q,
                              const std::vector<Cx>& w) {
  ResidualReport rep;
  int ktot = 0;
  for (int x : k) ktot += x;
  const int l = static_cast<int>(w.size());
  for (int i = 0; i < l; ++i) {
    Cx lhs = 1.0;
    for (size_t m = 0; m < z.size(); ++m)
      lhs *= safe_ratio(w[i] - ipow(q, 1 - k[m]) * z[m], w[i] - q * z[m], std::abs(w[i]) + std::abs(q * z[m]));
    // The j = i factor of the printed product is -1 and cancels the leading sign.
    Cx rhs = ipow(zeta, -2) * ipow(q, l - ktot);
    for (int j = 0; j < l; ++j)
      if (j != i) rhs *= safe_ratio(q * w[i] - w[j], w[i] - q * w[j], std::abs(w[i]) + std::abs(q * w[j]));
    rep.push(lhs / rhs - 1.0);
  }
  return rep;
}

NondegReport nondegenerate_check(const BetheProblem& prob, const BetheRoots& roots) {
  check_shape(prob, roots);
  NondegReport rep;
  const QFrame& f = prob.frame;
  auto flag = [&](const std::string& msg) {
    rep.ok = false;
    rep.violations.push_back(msg);
  };
  for (int k = 1; k < prob.N; ++k) {
    const auto& uk = level(roots, k);
    for (size_t a = 0; a < uk.size(); ++a) {
      const std::string tag = "u[" + std::to_string(k) + "," + std::to_string(a + 1) + "]";
      if (uk[a] == Cx{}) {
        flag(tag + " is zero");
        continue;
      }
      for (size_t s = 0; s < prob.punctures.punctures.size(); ++s)
        if (auto n = lattice_related(prob.punctures.punctures[s].z, f.qpow_half(1 - k) * uk[a], f))
          flag(tag + " on the lattice of z[" + std::to_string(s + 1) + "], n=" + std::to_string(*n));
      for (int kk = k; kk < prob.N; ++kk) {
        const auto& ukk = level(roots, kk);
        for (size_t b = (kk == k ? a + 1 : 0); b < ukk.size(); ++b) {
          if (ukk[b] == Cx{}) continue;
          if (auto n = lattice_related(uk[a], f.qpow_half(k - kk) * ukk[b], f))
            flag(tag + " on the lattice of u[" + std::to_string(kk) + "," + std::to_string(b + 1) +
                 "], n=" + std::to_string(*n));
        }
      }
    }
  }
  return rep;
}

namespace {

// One linear factor c1 x[v1] - c2 x[v2] - c0 (v2 < 0 drops that term).
struct Factor {
  int v1;
  Cx c1;
  int v2;
  Cx c2;
  Cx c0;
  Cx value(const std::vector<Cx>& x) const { return c1 * x[v1] - (v2 >= 0 ? c2 * x[v2] : Cx{}) - c0; }
};

// Adds scale * prod(factors) to g and its gradient to jrow.
void accumulate(const std::vector<Factor>& fs, Cx scale, const std::vector<Cx>& x, Cx& g,
                Cx* jrow) {
  const size_t n = fs.size();
  std::vector<Cx> val(n), pre(n + 1), suf(n + 1);
  for (size_t i = 0; i < n; ++i) val[i] = fs[i].value(x);
  pre[0] = 1.0;
  for (size_t i = 0; i < n; ++i) pre[i + 1] = pre[i] * val[i];
  suf[n] = 1.0;
  for (size_t i = n; i > 0; --i) suf[i - 1] = suf[i] * val[i - 1];
  g += scale * pre[n];
  if (!jrow) return;
  for (size_t i = 0; i < n; ++i) {
    const Cx d = scale * pre[i] * suf[i + 1];
    jrow[fs[i].v1] += fs[i].c1 * d;
    if (fs[i].v2 >= 0) jrow[fs[i].v2] -= fs[i].c2 * d;
  }
}

struct Layout {
  std::vector<int> offset;  // offset[k] for level k = 1..N-1, offset[N] = total
  int n = 0;
};

Layout layout_of(const BetheProblem& prob) {
  Layout l;
  l.offset.assign(prob.N + 1, 0);
  int o = 0;
  for (int k = 1; k < prob.N; ++k) {
    l.offset[k] = o;
    o += prob.r[k - 1];
  }
  l.offset[prob.N] = o;
  l.offset[0] = 0;
  l.n = o;
  return l;
}

void eval_cleared(const BetheProblem& prob, const Layout& lay, const std::vector<std::vector<Cx>>& pis,
                  const std::vector<Cx>& x, std::vector<Cx>& g, std::vector<Cx>* jac) {
  const QFrame& f = prob.frame;
  const Cx q = f.q(), sh = f.sqrt_q, ish = 1.0 / sh, iq = 1.0 / q;
  const int n = lay.n;
  g.assign(n, Cx{});
  if (jac) jac->assign(static_cast<size_t>(n) * n, Cx{});
  std::vector<Factor> A, B;
  for (int k = 1; k < prob.N; ++k) {
    const int rk = prob.r[k - 1];
    const Cx kk = prob.twists.k(k), kk1 = prob.twists.k(k + 1);
    for (int a = 0; a < rk; ++a) {
      const int v = lay.offset[k] + a;
      A.clear();
      B.clear();
      for (int b = 0; b < rk; ++b) {
        if (b == a) continue;
        const int w = lay.offset[k] + b;
        A.push_back({v, q, w, 1.0, 0.0});
        B.push_back({v, iq, w, 1.0, 0.0});
      }
      for (const Cx& p : pis[k]) {
        A.push_back({v, ish, -1, 0.0, p});
        B.push_back({v, sh, -1, 0.0, p});
      }
      for (int kn : {k - 1, k + 1}) {
        if (kn < 1 || kn > prob.N - 1) continue;
        for (int c = 0; c < prob.r[kn - 1]; ++c) {
          const int w = lay.offset[kn] + c;
          A.push_back({v, ish, w, 1.0, 0.0});
          B.push_back({v, sh, w, 1.0, 0.0});
        }
      }
      Cx* row = jac ? jac->data() + static_cast<size_t>(v) * n : nullptr;
      accumulate(A, kk, x, g[v], row);
      accumulate(B, -kk1 * iq, x, g[v], row);
    }
  }
}

std::vector<std::vector<Cx>> all_pi_roots(const BetheProblem& prob) {
  std::vector<std::vector<Cx>> pis(prob.N);
  for (int k = 1; k < prob.N; ++k) pis[k] = pi_roots(k, prob.punctures, prob.frame);
  return pis;
}

BetheRoots unflatten(const Layout& lay, const BetheProblem& prob, const std::vector<Cx>& x) {
  BetheRoots r;
  r.u.resize(prob.N - 1);
  for (int k = 1; k < prob.N; ++k)
    r.u[k - 1].assign(x.begin() + lay.offset[k], x.begin() + lay.offset[k + 1]);
  return r;
}

std::vector<Cx> flatten(const BetheRoots& r) {
  std::vector<Cx> x;
  for (const auto& l : r.u) x.insert(x.end(), l.begin(), l.end());
  return x;
}

ClearedSystem cleared_impl(const BetheProblem& prob, const Layout& lay,
                           const std::vector<std::vector<Cx>>& pis, const std::vector<Cx>& x,
                           bool fd) {
  ClearedSystem cs;
  if (!fd) {
    eval_cleared(prob, lay, pis, x, cs.g, &cs.jac);
    return cs;
  }
  eval_cleared(prob, lay, pis, x, cs.g, nullptr);
  const int n = lay.n;
  cs.jac.assign(static_cast<size_t>(n) * n, Cx{});
  std::vector<Cx> gp, gm;
  for (int j = 0; j < n; ++j) {
    const double h = 1e-7 * (1.0 + std::abs(x[j]));
    std::vector<Cx> xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    eval_cleared(prob, lay, pis, xp, gp, nullptr);
    eval_cleared(prob, lay, pis, xm, gm, nullptr);
    for (int i = 0; i < n; ++i) cs.jac[static_cast<size_t>(i) * n + j] = (gp[i] - gm[i]) / (2.0 * h);
  }
  return cs;
}

bool cx_less(const Cx& a, const Cx& b) {
  return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
}

struct Attempt {
  std::vector<Cx> x;
  double residual = INFINITY;
  bool ok = false;
};

double scale_of(const std::vector<Cx>& x) {
  double m = 0.0;
  for (const Cx& v : x) m = std::max(m, std::abs(v));
  return 1.0 + m;
}

// Nudges colliding roots on one level apart; returns false after too many tries.
bool separate(const BetheProblem& prob, const Layout& lay, std::vector<Cx>& x, std::mt19937_64& rng,
              int& budget) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double sc = scale_of(x);
  bool moved = false;
  for (int k = 1; k < prob.N; ++k)
    for (int a = lay.offset[k]; a < lay.offset[k + 1]; ++a)
      for (int b = a + 1; b < lay.offset[k + 1]; ++b)
        if (std::abs(x[a] - x[b]) < 1e-8 * sc) {
          x[b] *= Cx(1.0 + 1e-2 * U(rng), 1e-2 * U(rng));
          moved = true;
        }
  if (moved) --budget;
  return budget >= 0;
}

Attempt run_start(const BetheProblem& prob, const Layout& lay, const std::vector<std::vector<Cx>>& pis,
                  std::vector<Cx> x, std::mt19937_64& rng, const NewtonOptions& opt) {
  Attempt at;
  const int n = lay.n;
  int budget = 5;
  try {
    for (int it = 0; it < opt.max_iter; ++it) {
      if (!separate(prob, lay, x, rng, budget)) break;
      ClearedSystem cs = cleared_impl(prob, lay, pis, x, opt.finite_difference);
      Eigen::MatrixXcd J(n, n);
      Eigen::VectorXcd G(n);
      for (int i = 0; i < n; ++i) {
        G(i) = cs.g[i];
        for (int j = 0; j < n; ++j) J(i, j) = cs.jac[static_cast<size_t>(i) * n + j];
      }
      Eigen::VectorXcd d = J.fullPivLu().solve(-G);
      if (!d.allFinite()) break;
      const double sc = scale_of(x);
      double step = d.cwiseAbs().maxCoeff();
      const double cap = sc;
      const double damp = step > cap ? cap / step : 1.0;
      for (int i = 0; i < n; ++i) x[i] += damp * d(i);
      if (scale_of(x) > 1e12) break;
      if (damp == 1.0 && step <= 1e-15 * sc) break;
    }
    BetheRoots r = unflatten(lay, prob, x);
    at.residual = xxz_residual(prob, r).max_abs;
    at.x = x;
    if (!(at.residual <= prob.frame.tol.newton_conv)) return at;
    for (int k = 1; k < prob.N; ++k)
      for (int a = lay.offset[k]; a < lay.offset[k + 1]; ++a)
        for (int b = a + 1; b < lay.offset[k + 1]; ++b)
          if (std::abs(x[a] - x[b]) < 1e-8 * scale_of(x)) return at;
    at.ok = nondegenerate_check(prob, r).ok;
  } catch (const Error&) {
    at.ok = false;
    if (at.x.empty()) at.x = x;
  }
  return at;
}

std::vector<Cx> initial_guess(const BetheProblem& prob, const Layout& lay,
                              const std::vector<std::vector<Cx>>& pis, std::mt19937_64& rng) {
  double lo = INFINITY, hi = 0.0;
  const double s = std::abs(prob.frame.sqrt_q);
  for (const auto& level_roots : pis)
    for (const Cx& p : level_roots)
      for (double f : {1.0 / s, 1.0, s}) {
        lo = std::min(lo, std::abs(p) * f);
        hi = std::max(hi, std::abs(p) * f);
      }
  for (const auto& pc : prob.punctures.punctures) {
    lo = std::min(lo, std::abs(pc.z));
    hi = std::max(hi, std::abs(pc.z));
  }
  if (!(hi > 0)) lo = hi = 1.0;
  lo /= 4.0;
  hi *= 4.0;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Cx> x(lay.n);
  for (Cx& v : x) {
    const double rad = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * U(rng));
    v = std::polar(rad, 2.0 * std::numbers::pi * U(rng));
  }
  return x;
}

std::mt19937_64 start_rng(std::uint64_t seed, int start) {
  std::seed_seq ss{static_cast<std::uint32_t>(seed & 0xffffffffu),
                   static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(start)};
  return std::mt19937_64(ss);
}

Attempt attempt_for(const BetheProblem& prob, const Layout& lay, const std::vector<std::vector<Cx>>& pis,
                    const std::optional<BetheRoots>& seed_roots, const NewtonOptions& opt, int i) {
  std::mt19937_64 rng = start_rng(opt.seed, i);
  std::vector<Cx> x0 = seed_roots ? flatten(*seed_roots) : initial_guess(prob, lay, pis, rng);
  return run_start(prob, lay, pis, std::move(x0), rng, opt);
}

SolveResult finish(const BetheProblem& prob, const Layout& lay, const Attempt& at, int index) {
  SolveResult res;
  res.start_index = index;
  res.roots = unflatten(lay, prob, at.x);
  for (auto& l : res.roots.u) std::sort(l.begin(), l.end(), cx_less);
  try {
    res.report = xxz_residual(prob, res.roots);
  } catch (const Error&) {
    res.report.max_abs = INFINITY;
  }
  res.report.converged = at.ok;
  return res;
}

SolveResult trivial(const BetheProblem& prob) {
  SolveResult res;
  res.roots.u.assign(prob.N - 1, {});
  res.start_index = 0;
  return res;
}

int start_count(const std::optional<BetheRoots>& seed_roots, const NewtonOptions& opt) {
  return seed_roots ? 1 : std::max(1, opt.starts);
}

}  // namespace

ClearedSystem cleared_system(const BetheProblem& prob, const std::vector<Cx>& x, bool finite_difference) {
  Layout lay = layout_of(prob);
  if (static_cast<int>(x.size()) != lay.n) throw Error(ErrorKind::InvalidInput, "wrong unknown count");
  return cleared_impl(prob, lay, all_pi_roots(prob), x, finite_difference);
}

SolveResult solve_newton_serial(const BetheProblem& prob, const std::optional<BetheRoots>& seed_roots,
                                const NewtonOptions& opt) {
  prob.validate();
  const Layout lay = layout_of(prob);
  if (lay.n == 0) return trivial(prob);
  const auto pis = all_pi_roots(prob);
  const int S = start_count(seed_roots, opt);
  Attempt best;
  int best_i = -1;
  for (int i = 0; i < S; ++i) {
    Attempt at = attempt_for(prob, lay, pis, seed_roots, opt, i);
    if (at.ok) return finish(prob, lay, at, i);
    if (best_i < 0 || at.residual < best.residual) {
      best = std::move(at);
      best_i = i;
    }
  }
  return finish(prob, lay, best, best_i);
}

SolveResult solve_newton(const BetheProblem& prob, const std::optional<BetheRoots>& seed_roots,
                         const NewtonOptions& opt) {
  prob.validate();
  const Layout lay = layout_of(prob);
  if (lay.n == 0) return trivial(prob);
  const auto pis = all_pi_roots(prob);
  const int S = start_count(seed_roots, opt);
#ifdef _OPENMP
  const int batch = std::max(1, omp_get_max_threads());
#else
  const int batch = 1;
#endif
  Attempt best;
  int best_i = -1;
  for (int b0 = 0; b0 < S; b0 += batch) {
    const int b1 = std::min(S, b0 + batch);
    std::vector<Attempt> at(b1 - b0);
#pragma omp parallel for schedule(dynamic)
    for (int i = b0; i < b1; ++i) at[i - b0] = attempt_for(prob, lay, pis, seed_roots, opt, i);
    // Smallest converged index wins, independent of thread timing.
    for (int i = b0; i < b1; ++i) {
      Attempt& a = at[i - b0];
      if (a.ok) return finish(prob, lay, a, i);
      if (best_i < 0 || a.residual < best.residual) {
        best = std::move(a);
        best_i = i;
      }
    }
  }
  return finish(prob, lay, best, best_i);
}

ResidualReport xxx_residual(int N, const std::vector<Cx>& kappa, const PunctureData& sigma,
                            const std::vector<std::vector<Cx>>& ups, Cx eps) {
  ResidualReport rep;
  auto lvl = [&](int k) -> const std::vector<Cx>& {
    static const std::vector<Cx> empty;
    return (k >= 1 && k <= static_cast<int>(ups.size())) ? ups[k - 1] : empty;
  };
  for (int k = 1; k < N; ++k) {
    const auto& uk = lvl(k);
    for (size_t a = 0; a < uk.size(); ++a) {
      const Cx v = uk[a];
      Cx p = kappa.at(k) / kappa.at(k - 1);
      for (size_t s = 0; s < sigma.punctures.size(); ++s) {
        const Cx sg = sigma.punctures[s].z;
        const Cx num = v + static_cast<double>(sigma.ell(s, k)) * eps - sg;
        const Cx den = v + static_cast<double>(sigma.ell(s, k - 1)) * eps - sg;
        p *= safe_ratio(num, den, std::abs(v) + std::abs(sg) + std::abs(eps));
      }
      for (int kk : {k - 1, k + 1})
        for (const Cx& c : lvl(kk))
          p *= safe_ratio(v - c + 0.5 * eps, v - c - 0.5 * eps, std::abs(v) + std::abs(c) + std::abs(eps));
      for (size_t b = 0; b < uk.size(); ++b)
        if (b != a)
          p *= safe_ratio(v - uk[b] - eps, v - uk[b] + eps, std::abs(v) + std::abs(uk[b]) + std::abs(eps));
      rep.push(p - 1.0);
    }
  }
  return rep;
}

namespace {

Cx inv(Cx d, double scale) {
  if (std::abs(d) <= 1e-14 * scale) throw Error(ErrorKind::PoleHit, "additive Bethe pole");
  return 1.0 / d;
}

}  // namespace

ResidualReport gaudin_residual(int N, const std::vector<Cx>& kx, const PunctureData& sigma,
                               const std::vector<std::vector<Cx>>& ups) {
  ResidualReport rep;
  auto lvl = [&](int k) -> const std::vector<Cx>& {
    static const std::vector<Cx> empty;
    return (k >= 1 && k <= static_cast<int>(ups.size())) ? ups[k - 1] : empty;
  };
  for (int k = 1; k < N; ++k) {
    const auto& uk = lvl(k);
    for (size_t a = 0; a < uk.size(); ++a) {
      const Cx v = uk[a];
      Cx r = kx.at(k) - kx.at(k - 1);
      for (size_t s = 0; s < sigma.punctures.size(); ++s)
        r += static_cast<double>(sigma.weight(s, k)) *
             inv(v - sigma.punctures[s].z, std::abs(v) + std::abs(sigma.punctures[s].z) + 1.0);
      for (int kk : {k - 1, k + 1})
        for (const Cx& c : lvl(kk)) r += inv(v - c, std::abs(v) + std::abs(c) + 1.0);
      for (size_t b = 0; b < uk.size(); ++b)
        if (b != a) r -= 2.0 * inv(v - uk[b], std::abs(v) + std::abs(uk[b]) + 1.0);
      rep.push(r);
    }
  }
  return rep;
}

ResidualReport inhomogeneous_sl2_residual(const std::vector<Cx>& z, const std::vector<int>& k, Cx a,
                                          const std::vector<Cx>& w) {
  ResidualReport rep;
  for (size_t i = 0; i < w.size(); ++i) {
    Cx r = 2.0 * a;
    for (size_t m = 0; m < z.size(); ++m)
      r += static_cast<double>(k[m]) * inv(z[m] - w[i], std::abs(z[m]) + std::abs(w[i]) + 1.0);
    for (size_t j = 0; j < w.size(); ++j)
      if (j != i) r -= 2.0 * inv(w[j] - w[i], std::abs(w[j]) + std::abs(w[i]) + 1.0);
    rep.push(r);
  }
  return rep;
}

ResidualReport classical_sl2_residual(const std::vector<Cx>& z, const std::vector<int>& k,
                                      const std::vector<Cx>& w) {
  return inhomogeneous_sl2_residual(z, k, 0.0, w);
}

ResidualReport classical_slN_residual(int N, const PunctureData& points,
                                      const std::vector<std::vector<Cx>>& w) {
  ResidualReport rep;
  auto cartan = [](int i, int j) { return i == j ? 2.0 : (std::abs(i - j) == 1 ? -1.0 : 0.0); };
  for (int k = 1; k < N; ++k) {
    if (k > static_cast<int>(w.size())) break;
    for (size_t j = 0; j < w[k - 1].size(); ++j) {
      const Cx x = w[k - 1][j];
      Cx r{};
      for (size_t m = 0; m < points.punctures.size(); ++m)
        r += static_cast<double>(points.weight(m, k)) *
             inv(points.punctures[m].z - x, std::abs(x) + std::abs(points.punctures[m].z) + 1.0);
      for (int kk = 1; kk < N && kk <= static_cast<int>(w.size()); ++kk)
        for (size_t s = 0; s < w[kk - 1].size(); ++s) {
          if (kk == k && s == j) continue;
          const double c = cartan(kk, k);
          if (c != 0.0) r -= c * inv(w[kk - 1][s] - x, std::abs(x) + std::abs(w[kk - 1][s]) + 1.0);
        }
      rep.push(r);
    }
  }
  return rep;
}

BetheProblem xxz_at_radius(const LimitParams& lp, double R, BetheRoots& roots_out) {
  for (const auto& p : lp.sigma.punctures)
    for (size_t i = 1; i < p.weights.size(); ++i)
      if (p.weights[i] != 0)
        throw Error(ErrorKind::InvalidInput,
                    "the term-by-term XXZ to XXX match needs weights on the first node only");
  BetheProblem prob;
  prob.N = lp.N;
  prob.punctures.N = lp.N;
  for (const auto& p : lp.sigma.punctures)
    prob.punctures.punctures.push_back({std::exp(R * (p.z - lp.epsilon)), p.weights});
  prob.twists.N = lp.N;
  for (const Cx& k : lp.kappa_exp) prob.twists.kappa.push_back(std::exp(lp.epsilon * k));
  roots_out.u.clear();
  for (const auto& l : lp.upsilon) {
    std::vector<Cx> v;
    for (const Cx& x : l) v.push_back(std::exp(R * x));
    prob.r.push_back(static_cast<int>(v.size()));
    roots_out.u.push_back(std::move(v));
  }
  // Construct the frame directly: q -> 1 trips the root-of-unity guard for
  // tiny R, and these instances are only evaluated, never solved.
  prob.frame.sqrt_q = std::exp(0.5 * R * lp.epsilon);
  prob.frame.lattice_window = default_window(prob.punctures, prob.r);
  return prob;
}

namespace {

void fill_order(LimitLeg& leg) {
  double acc = 0.0;
  int n = 0;
  for (size_t i = 0; i + 1 < leg.deviations.size(); ++i) {
    const double r = leg.deviations[i + 1] > 0 ? leg.deviations[i] / leg.deviations[i + 1] : INFINITY;
    leg.ratios.push_back(r);
    const double h = leg.steps[i] / leg.steps[i + 1];
    if (std::isfinite(r) && r > 0 && h > 1) {
      acc += std::log(r) / std::log(h);
      ++n;
    }
  }
  leg.order = n ? acc / n : 0.0;
}

}  // namespace

LimitReport limit_flow(const LimitParams& lp, const std::vector<double>& Rs, const std::vector<double>& eps_seq) {
  LimitReport rep;
  std::vector<Cx> kappa;
  for (const Cx& k : lp.kappa_exp) kappa.push_back(std::exp(lp.epsilon * k));
  const ResidualReport xxx = xxx_residual(lp.N, kappa, lp.sigma, lp.upsilon, lp.epsilon);
  for (double R : Rs) {
    BetheRoots roots;
    BetheProblem prob = xxz_at_radius(lp, R, roots);
    const ResidualReport xxz = xxz_residual(prob, roots);
    double dev = 0.0;
    for (size_t i = 0; i < xxz.residuals.size(); ++i)
      dev = std::max(dev, std::abs(xxz.residuals[i] - xxx.residuals[i]));
    rep.xxz_to_xxx.steps.push_back(R);
    rep.xxz_to_xxx.deviations.push_back(dev);
  }
  const ResidualReport gd = gaudin_residual(lp.N, lp.kappa_exp, lp.sigma, lp.upsilon);
  for (double e : eps_seq) {
    std::vector<Cx> ke;
    for (const Cx& k : lp.kappa_exp) ke.push_back(std::exp(e * k));
    const ResidualReport x = xxx_residual(lp.N, ke, lp.sigma, lp.upsilon, e);
    double dev = 0.0;
    for (size_t i = 0; i < x.residuals.size(); ++i)
      dev = std::max(dev, std::abs(x.residuals[i] / e - gd.residuals[i]));
    rep.xxx_to_gaudin.steps.push_back(e);
    rep.xxx_to_gaudin.deviations.push_back(dev);
  }
  fill_order(rep.xxz_to_xxx);
  fill_order(rep.xxx_to_gaudin);
  return rep;
}

}  // namespace qoper

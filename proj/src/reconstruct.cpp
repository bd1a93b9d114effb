#include "qoper/reconstruct.hpp"

#include <algorithm>
#include <cmath>

namespace qoper {

Poly solve_next_poly(const std::vector<Poly>& fk, const std::vector<Cx>& gam, const Poly& g,
                     const QFrame& f) {
  const int k = static_cast<int>(gam.size());
  if (static_cast<int>(fk.size()) != k - 1) throw Error(ErrorKind::BadShape, "need k-1 known polynomials");
  if (g.is_zero()) throw Error(ErrorKind::ZeroConstantTerm, "g is zero");
  int known_deg = 0;
  for (const Poly& p : fk) {
    if (p.is_zero() || std::abs(p.coeff(0)) <= 1e-12 * p.max_abs())
      throw Error(ErrorKind::ZeroConstantTerm, "known polynomial vanishes at 0");
    known_deg += p.degree();
  }
  const int d = g.degree() - known_deg;
  if (d < 0) throw Error(ErrorKind::IdentityFailure, "g has lower degree than the known rows allow");

  // Cofactors of the last row: C[c] multiplies gamma_k^c f_k^{(c)}.
  std::vector<Poly> C(k);
  for (int c = 0; c < k; ++c) {
    PolyMatrix m(k - 1);
    for (int j = 0; j < k - 1; ++j) {
      Cx gp = 1.0;
      for (int cc = 0; cc < k; ++cc) {
        if (cc != c) m[j].push_back(qshift(fk[j], 2 * cc, f) * gp);
        gp *= gam[j];
      }
    }
    Poly minor = det(m);
    C[c] = ((k - 1 + c) % 2 == 0) ? minor : -minor;
  }
  std::vector<Cx> gk(k);
  gk[0] = 1.0;
  for (int c = 1; c < k; ++c) gk[c] = gk[c - 1] * gam[k - 1];

  // Weight of a_r in the coefficient of z^s.
  auto weight = [&](int r, int s) {
    Cx w{};
    for (int c = 0; c < k; ++c) w += gk[c] * f.qpow(static_cast<long>(c) * r) * C[c].coeff(s - r);
    return w;
  };

  const int top = g.degree();
  std::vector<Cx> a(top + 1, Cx{});
  double amax = 0.0;
  for (int s = 0; s <= top; ++s) {
    Cx acc = g.coeff(s);
    for (int r = 0; r < s; ++r) acc -= a[r] * weight(r, s);
    const Cx piv = weight(s, s);
    double pscale = 0.0;
    for (int c = 0; c < k; ++c)
      pscale += std::abs(gk[c] * f.qpow(static_cast<long>(c) * s) * C[c].coeff(0));
    if (std::abs(piv) <= 1e-12 * pscale)
      throw Error(ErrorKind::VandermondeDegenerate, "pivot vanishes at s=" + std::to_string(s));
    a[s] = acc / piv;
    if (s <= d) amax = std::max(amax, std::abs(a[s]));
  }
  // Coefficients above d are forced to zero when g lies in the image.
  for (int s = d + 1; s <= top; ++s)
    if (std::abs(a[s]) > kIdentityTol * std::max(amax, 1e-300))
      throw Error(ErrorKind::IdentityFailure, "forced coefficient " + std::to_string(s) + " is nonzero");
  a.resize(d + 1);
  Poly out(std::move(a));

  PolyMatrix full(k);
  for (int j = 0; j < k; ++j) {
    const Poly& p = j < k - 1 ? fk[j] : out;
    Cx gp = 1.0;
    for (int c = 0; c < k; ++c) {
      full[j].push_back(qshift(p, 2 * c, f) * gp);
      gp *= gam[j];
    }
  }
  const double res = rel_diff(det(full), g);
  if (res > kIdentityTol)
    throw Error(ErrorKind::IdentityFailure, "determinant check residual " + std::to_string(res));
  return out;
}

Poly normalized_minor(const std::vector<int>& rows, const SectionData& sec, const TwistData& tw,
                      const QFrame& f) {
  std::vector<Cx> g;
  for (int i : rows) g.push_back(tw.zeta(i));
  return m_det(rows, sec, tw, f, ShiftConvention::symmetric) * (1.0 / vandermonde_det(g));
}

ReconstructResult reconstruct_sections(const DSystem& ds, const TwistData& tw, const QFrame& f) {
  const int N = tw.N;
  if (ds.N != N) throw Error(ErrorKind::BadShape, "N mismatch");
  for (int k = 1; k < N; ++k)
    for (const Poly* p : {&ds.D[k], &ds.Dtilde[k]})
      if (p->is_zero() || std::abs(p->coeff(0)) <= 1e-12 * p->max_abs())
        throw Error(ErrorKind::ZeroConstantTerm, "D or Dtilde vanishes at 0 at level " + std::to_string(k));

  ReconstructResult out;
  std::vector<Poly>& s = out.sections.s;
  s.assign(N, Poly());
  auto qk = [&](int i) -> Poly& { return s[i - 1]; };
  qk(N) = ds.D[1];
  qk(N - 1) = ds.Dtilde[1];

  auto check = [&](const std::vector<int>& rows, const Poly& want, const std::string& what) {
    const double r = rel_diff(normalized_minor(rows, out.sections, tw, f), want);
    if (r > kIdentityTol) throw Error(ErrorKind::IdentityFailure, what + " residual " + std::to_string(r));
    return r;
  };
  out.dtilde_residuals.push_back(0.0);
  out.d_residuals.push_back(check({N - 1, N}, ds.D[2], "D_2"));

  for (int k = 2; k <= N - 1; ++k) {
    std::vector<Poly> fj;
    std::vector<Cx> gam;
    for (int j = 1; j < k; ++j) {
      fj.push_back(qshift(qk(N + 1 - j), 1 - k, f));
      gam.push_back(tw.k(j));
    }
    gam.push_back(tw.k(k + 1));
    std::vector<Cx> vg{tw.k(k + 1)};
    for (int j = k - 1; j >= 1; --j) vg.push_back(tw.k(j));
    const double sign = ((k * (k - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
    const Poly g = ds.Dtilde[k] * (sign * vandermonde_det(vg));
    const Poly fk = solve_next_poly(fj, gam, g, f);
    qk(N - k) = qshift(fk, k - 1, f);

    std::vector<int> rows_t{N - k};
    for (int i = N - k + 2; i <= N; ++i) rows_t.push_back(i);
    out.dtilde_residuals.push_back(check(rows_t, ds.Dtilde[k], "Dtilde_" + std::to_string(k)));
    std::vector<int> rows;
    for (int i = N - k; i <= N; ++i) rows.push_back(i);
    out.d_residuals.push_back(check(rows, ds.D[k + 1], "D_" + std::to_string(k + 1)));
  }
  return out;
}

void Certificate::add(const std::string& name, double residual, double tol) {
  const bool ok = residual <= tol;
  stages.push_back({name, residual, ok});
  pass = pass && ok;
}

double match_roots(std::vector<Cx> got, const std::vector<Cx>& want) {
  if (got.size() != want.size()) return INFINITY;
  double worst = 0.0;
  for (const Cx& w : want) {
    size_t best = 0;
    for (size_t i = 1; i < got.size(); ++i)
      if (std::abs(got[i] - w) < std::abs(got[best] - w)) best = i;
    worst = std::max(worst, std::abs(got[best] - w) / std::max(1.0, std::abs(w)));
    got.erase(got.begin() + static_cast<long>(best));
  }
  return worst;
}

namespace {

template <class F>
auto staged(const std::string& stage, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw e.with_stage(stage);
  }
}

}  // namespace

Certificate correspondence_check(const BetheProblem& prob, const BetheRoots& roots, const CertOptions& opt) {
  Certificate cert;
  const QFrame& f = prob.frame;
  const int N = prob.N;

  const NondegReport nd = staged("nondegenerate", [&] { return nondegenerate_check(prob, roots); });
  cert.add("nondegenerate", nd.ok ? 0.0 : 1.0, 0.5);
  const ResidualReport br = staged("bethe", [&] { return xxz_residual(prob, roots); });
  cert.add("bethe", br.max_abs, kIdentityTol);

  const QSystem qs = staged("qq", [&] { return build_qsystem(prob, roots); });
  cert.add("qq", qq_residual(qs, prob.twists, f).max_abs, kIdentityTol);
  const DSystem ds = staged("dress", [&] { return dress(qs, prob.punctures, f); });
  cert.add("qqv", qqv_residual(ds, prob.twists, f).max_abs, kIdentityTol);

  const ReconstructResult rr = staged("reconstruct", [&] { return reconstruct_sections(ds, prob.twists, f); });
  double rmax = 0.0;
  for (double r : rr.d_residuals) rmax = std::max(rmax, r);
  for (double r : rr.dtilde_residuals) rmax = std::max(rmax, r);
  cert.add("reconstruct", rmax, kIdentityTol);
  cert.sections = rr.sections;

  TwistData ftw = prob.twists;
  if (opt.wrong_twist_convention) std::reverse(ftw.kappa.begin(), ftw.kappa.end());
  for (int k = 1; k <= N; ++k) {
    const std::string tag = std::to_string(k);
    const DFactorization df =
        staged("factorize_" + tag, [&] { return d_factorize(k, rr.sections, ftw, prob.punctures, f); });
    cert.alphas.push_back(df.alpha);

    const Poly rebuilt = w_poly(k, prob.punctures, f) * df.v_poly * df.alpha;
    cert.add("miura_det_" + tag, rel_diff(rebuilt, df.d_poly), kIdentityTol);

    std::vector<Cx> want;
    const int rk = k < N ? prob.r[k - 1] : 0;
    if (k < N)
      for (const Cx& u : roots.u[k - 1]) want.push_back(f.qpow_half(1 - k) * u);
    cert.add("roots_" + tag, want.empty() && df.bethe_zeros.empty() ? 0.0 : match_roots(df.bethe_zeros, want),
             kIdentityTol);

    std::vector<Cx> vk;
    for (int j = k; j >= 1; --j) vk.push_back(prob.twists.k(j));
    const Cx expect = f.qpow_half(static_cast<long>(k - 1) * rk) * vandermonde_det(vk);
    cert.add("alpha_" + tag, std::abs(df.alpha - expect) / std::abs(expect), kIdentityTol);
  }
  cert.sections.alpha = cert.alphas;
  return cert;
}

}  // namespace qoper

#include "qoper/io.hpp"

namespace qoper::io {

namespace {

[[noreturn]] void bad(const std::string& ptr, const std::string& what) {
  throw Error(ErrorKind::InputError, (ptr.empty() ? std::string("/") : ptr) + ": " + what);
}

const json& field(const json& j, const std::string& ptr, const char* key) {
  if (!j.is_object()) bad(ptr, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(ptr + "/" + key, "missing");
  return *it;
}

int int_from(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) bad(ptr, "expected an integer");
  return j.get<int>();
}

double real_from(const json& j, const std::string& ptr) {
  if (!j.is_number()) bad(ptr, "expected a number");
  return j.get<double>();
}

const json& array_at(const json& j, const std::string& ptr) {
  if (!j.is_array()) bad(ptr, "expected an array");
  return j;
}

std::vector<Cx> cx_list(const json& j, const std::string& ptr) {
  std::vector<Cx> v;
  const json& a = array_at(j, ptr);
  for (size_t i = 0; i < a.size(); ++i) v.push_back(cx_from(a[i], ptr + "/" + std::to_string(i)));
  return v;
}

std::vector<int> int_list(const json& j, const std::string& ptr) {
  std::vector<int> v;
  const json& a = array_at(j, ptr);
  for (size_t i = 0; i < a.size(); ++i) v.push_back(int_from(a[i], ptr + "/" + std::to_string(i)));
  return v;
}

std::vector<double> real_list(const json& j, const std::string& ptr) {
  std::vector<double> v;
  const json& a = array_at(j, ptr);
  for (size_t i = 0; i < a.size(); ++i) v.push_back(real_from(a[i], ptr + "/" + std::to_string(i)));
  return v;
}

// punctures with the position stored under `key`
PunctureData punctures_from(const json& j, int N, const char* key, const std::string& base = "") {
  PunctureData pd;
  pd.N = N;
  const json& a = array_at(field(j, base, "punctures"), base + "/punctures");
  for (size_t m = 0; m < a.size(); ++m) {
    const std::string p = base + "/punctures/" + std::to_string(m);
    Puncture pc;
    pc.z = cx_from(field(a[m], p, key), p + "/" + key);
    pc.weights = int_list(field(a[m], p, "weights"), p + "/weights");
    if (static_cast<int>(pc.weights.size()) != N - 1) bad(p + "/weights", "need N-1 entries");
    for (int w : pc.weights)
      if (w < 0) bad(p + "/weights", "weights must be nonnegative");
    pd.punctures.push_back(std::move(pc));
  }
  return pd;
}

json leg(const LimitLeg& l) {
  return {{"steps", l.steps}, {"deviations", l.deviations}, {"ratios", l.ratios}, {"order", l.order}};
}

}  // namespace

json to_json(Cx z) { return json::array({z.real(), z.imag()}); }

json to_json(const std::vector<Cx>& v) {
  json a = json::array();
  for (const Cx& z : v) a.push_back(to_json(z));
  return a;
}

json to_json(const Poly& p) { return {{"coeffs", to_json(p.coeffs())}}; }

json to_json(const Rational& r) { return {{"num", to_json(r.num)}, {"den", to_json(r.den)}}; }

json to_json(const ResidualReport& r) {
  return {{"residuals", to_json(r.residuals)}, {"max_abs", r.max_abs}, {"converged", r.converged}};
}

json to_json(const BetheProblem& p) {
  json punct = json::array();
  for (const Puncture& pc : p.punctures.punctures) punct.push_back({{"z", to_json(pc.z)}, {"weights", pc.weights}});
  return {{"N", p.N}, {"sqrt_q", to_json(p.frame.sqrt_q)}, {"kappa", to_json(p.twists.kappa)},
          {"punctures", punct}, {"r", p.r}};
}

json to_json(const SolveResult& s) {
  json u = json::array();
  for (const auto& lvl : s.roots.u) u.push_back(to_json(lvl));
  return {{"u", u}, {"residual_max", s.report.max_abs}, {"converged", s.report.converged},
          {"start_index", s.start_index}};
}

json to_json(const Certificate& c) {
  json st = json::array();
  for (const Stage& s : c.stages) st.push_back({{"name", s.name}, {"residual", s.residual}, {"pass", s.pass}});
  json secs = json::array();
  for (const Poly& p : c.sections.s) secs.push_back(to_json(p));
  return {{"stages", st}, {"sections", secs}, {"alphas", to_json(c.alphas)}, {"pass", c.pass}};
}

json to_json(const LimitReport& r) {
  return {{"xxz_to_xxx", leg(r.xxz_to_xxx)}, {"xxx_to_gaudin", leg(r.xxx_to_gaudin)}};
}

json to_json(const KTheoryReport& r) {
  return {{"det_m", to_json(r.det_m)}, {"rhs", to_json(r.rhs)}, {"coeff_residuals", r.coeff_residuals},
          {"sample_residuals", r.sample_residuals}, {"max_rel", r.max_rel}};
}

json to_json(const SL2Canonical& c) {
  return {{"a", to_json(c.a)}, {"rho", to_json(c.rho)}, {"T", to_json(c.T)}, {"zeta", to_json(c.zeta)},
          {"remainder", c.remainder}};
}

json to_json(const SL3Canonical& c, const SL3Transfer& t) {
  return {{"a1", to_json(c.a1)}, {"a2", to_json(c.a2)}, {"a3", to_json(c.a3)},
          {"minor_mismatch", c.minor_mismatch}, {"product_defect", c.product_defect},
          {"T1", to_json(t.T1)}, {"T2", to_json(t.T2)}, {"remainder", t.remainder},
          {"scalar_residual", t.scalar_residual}};
}

Cx cx_from(const json& j, const std::string& ptr) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  bad(ptr, "expected a number or [re, im]");
}

Poly poly_from(const json& j, const std::string& ptr) {
  return Poly(cx_list(field(j, ptr, "coeffs"), ptr + "/coeffs"));
}

BetheProblem problem_from(const json& j, const ToleranceConfig& tol, int window, const std::string& base) {
  const int N = int_from(field(j, base, "N"), base + "/N");
  if (N < 2) bad(base + "/N", "need N >= 2");
  const Cx sq = cx_from(field(j, base, "sqrt_q"), base + "/sqrt_q");
  std::vector<Cx> kappa = cx_list(field(j, base, "kappa"), base + "/kappa");
  if (static_cast<int>(kappa.size()) != N) bad(base + "/kappa", "need N entries");
  std::vector<int> r = int_list(field(j, base, "r"), base + "/r");
  if (static_cast<int>(r.size()) != N - 1) bad(base + "/r", "need N-1 entries");
  for (int x : r)
    if (x < 0) bad(base + "/r", "root counts must be nonnegative");
  if (window <= 0 && j.contains("window")) window = int_from(j["window"], base + "/window");
  PunctureData pd = punctures_from(j, N, "z", base);
  try {
    BetheProblem p = make_problem(N, std::move(pd), std::move(kappa), std::move(r), sq, tol, window);
    p.validate();
    return p;
  } catch (const Error& e) {
    bad(base, e.what());
  }
}

BetheRoots roots_from(const json& j, const BetheProblem& prob, const std::string& ptr) {
  const json& u = array_at(field(j, ptr, "u"), ptr + "/u");
  if (static_cast<int>(u.size()) != prob.N - 1) bad(ptr + "/u", "need N-1 levels");
  BetheRoots roots;
  for (size_t k = 0; k < u.size(); ++k) {
    const std::string p = ptr + "/u/" + std::to_string(k);
    roots.u.push_back(cx_list(u[k], p));
    if (static_cast<int>(roots.u.back().size()) != prob.r[k]) bad(p, "root count differs from r");
  }
  return roots;
}

LimitInput limits_from(const json& j) {
  LimitInput in;
  LimitParams& lp = in.params;
  lp.N = int_from(field(j, "", "N"), "/N");
  if (lp.N < 2) bad("/N", "need N >= 2");
  lp.sigma = punctures_from(j, lp.N, "sigma");
  const json& up = array_at(field(j, "", "upsilon"), "/upsilon");
  if (static_cast<int>(up.size()) != lp.N - 1) bad("/upsilon", "need N-1 levels");
  for (size_t k = 0; k < up.size(); ++k) lp.upsilon.push_back(cx_list(up[k], "/upsilon/" + std::to_string(k)));
  lp.epsilon = cx_from(field(j, "", "epsilon"), "/epsilon");
  lp.kappa_exp = cx_list(field(j, "", "kappa_exp"), "/kappa_exp");
  if (static_cast<int>(lp.kappa_exp.size()) != lp.N) bad("/kappa_exp", "need N entries");
  in.R_sequence = real_list(field(j, "", "R_sequence"), "/R_sequence");
  in.eps_sequence = real_list(field(j, "", "eps_sequence"), "/eps_sequence");
  for (double x : in.R_sequence)
    if (!(x > 0)) bad("/R_sequence", "entries must be positive");
  for (double x : in.eps_sequence)
    if (!(x > 0)) bad("/eps_sequence", "entries must be positive");
  return in;
}

KTheoryInstance ktheory_from(const json& j) {
  KTheoryInstance k;
  k.N = int_from(field(j, "", "N"), "/N");
  if (k.N < 1) bad("/N", "need N >= 1");
  k.sqrt_q = cx_from(field(j, "", "sqrt_q"), "/sqrt_q");
  k.kappa = cx_list(field(j, "", "kappa"), "/kappa");
  if (static_cast<int>(k.kappa.size()) != k.N) bad("/kappa", "need N entries");
  k.a = cx_list(field(j, "", "a"), "/a");
  const json& p = array_at(field(j, "", "p"), "/p");
  if (static_cast<int>(p.size()) != k.N) bad("/p", "need N rows");
  for (size_t a = 0; a < p.size(); ++a) k.p.push_back(cx_list(p[a], "/p/" + std::to_string(a)));
  return k;
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InputError, std::string("/: ") + e.what());
  }
}

}  // namespace qoper::io

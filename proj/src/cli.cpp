#include "qoper/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qoper/io.hpp"

namespace qoper::cli {

namespace {

using io::json;

std::string read_input(const std::string& path) {
  std::ostringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InputError, "cannot read " + path);
    ss << in.rdbuf();
  }
  return ss.str();
}

// Accepts {"problem", "solution"} or a solve report carrying them in details.
const json& payload(const json& j) {
  if (j.is_object() && j.contains("details") && j["details"].is_object()) return j["details"];
  return j;
}

const json& problem_node(const json& j, std::string& base) {
  if (j.is_object() && j.contains("problem")) {
    base = "/problem";
    return j["problem"];
  }
  base.clear();
  return j;
}

ToleranceConfig tolerances(const RunConfig& cfg) {
  ToleranceConfig t;
  if (cfg.tol) t.newton_conv = *cfg.tol;
  return t;
}

BetheProblem load_problem(const json& doc, const RunConfig& cfg) {
  std::string base;
  const json& node = problem_node(payload(doc), base);
  // a report nests the problem one level deeper
  if (doc.contains("details")) base = "/details" + base;
  return io::problem_from(node, tolerances(cfg), cfg.window, base);
}

BetheRoots load_roots(const json& doc, const BetheProblem& prob) {
  const json& p = payload(doc);
  const std::string base = doc.contains("details") ? "/details" : "";
  if (!p.is_object() || !p.contains("solution"))
    throw Error(ErrorKind::InputError, base + "/solution: missing");
  return io::roots_from(p["solution"], prob, base + "/solution");
}

struct Outcome {
  bool pass = false;
  json details;
};

Outcome do_solve(const json& doc, const RunConfig& cfg) {
  const BetheProblem prob = load_problem(doc, cfg);
  NewtonOptions opt;
  opt.seed = cfg.seed;
  opt.starts = cfg.starts;
  const SolveResult s = solve_newton(prob, std::nullopt, opt);
  return {s.report.converged, {{"problem", io::to_json(prob)}, {"solution", io::to_json(s)}}};
}

Outcome do_verify(const json& doc, const RunConfig& cfg) {
  const BetheProblem prob = load_problem(doc, cfg);
  const BetheRoots roots = load_roots(doc, prob);
  const ResidualReport r = xxz_residual(prob, roots);
  const NondegReport nd = nondegenerate_check(prob, roots);
  const double tol = prob.frame.tol.newton_conv;
  const bool pass = r.max_abs <= tol && nd.ok;
  return {pass,
          {{"residual", io::to_json(r)},
           {"tq_residual", io::to_json(xxz_residual_tq(prob, roots))},
           {"tolerance", tol},
           {"nondegenerate", nd.ok},
           {"violations", nd.violations}}};
}

Outcome do_reconstruct(const json& doc, const RunConfig& cfg) {
  const BetheProblem prob = load_problem(doc, cfg);
  const BetheRoots roots = load_roots(doc, prob);
  const Certificate c = correspondence_check(prob, roots);
  return {c.pass, io::to_json(c)};
}

Outcome do_limits(const json& doc, const RunConfig&) {
  const io::LimitInput in = io::limits_from(doc);
  const LimitReport rep = limit_flow(in.params, in.R_sequence, in.eps_sequence);
  // at least first order on both legs
  auto ok = [](const LimitLeg& l) { return l.ratios.empty() || l.order >= 0.6; };
  return {ok(rep.xxz_to_xxx) && ok(rep.xxx_to_gaudin), io::to_json(rep)};
}

Outcome do_ktheory(const json& doc, const RunConfig& cfg) {
  const KTheoryInstance k = io::ktheory_from(doc);
  const QFrame f(k.sqrt_q, {}, cfg.window > 0 ? cfg.window : 16);
  const KTheoryReport rep = ktheory_relation(k, f);
  const double tol = cfg.tol.value_or(1e-9);
  json d = io::to_json(rep);
  d["tolerance"] = tol;
  return {rep.max_rel <= tol, d};
}

// selftest fixtures -------------------------------------------------------

struct Check {
  std::string name;
  double value;
  double tol;
  bool pass;
};

BetheProblem sl2_fixture() {
  PunctureData pd;
  pd.N = 2;
  pd.punctures = {{1.0, {1}}};
  return make_problem(2, pd, {1.0 / 3.0, 3.0}, {1}, 2.0);
}

BetheProblem sl3_fixture() {
  PunctureData pd;
  pd.N = 3;
  pd.punctures = {{Cx(1.1, 0.3), {1, 0}}, {Cx(-0.7, 0.9), {1, 1}}};
  const Cx k1(0.5, 0.2), k2(1.7, -0.4);
  return make_problem(3, pd, {k1, k2, 1.0 / (k1 * k2)}, {2, 1}, Cx(1.3, 0.2));
}

std::vector<Check> selftest_checks(const RunConfig& cfg) {
  std::vector<Check> out;
  auto add = [&](const std::string& name, const std::function<double()>& f, double tol) {
    double v;
    try {
      v = f();
    } catch (const std::exception&) {
      v = INFINITY;
    }
    out.push_back({name, v, tol, v <= tol});
  };
  auto raises = [&](const std::string& name, const std::function<void()>& f, ErrorKind kind) {
    double v = 1.0;
    try {
      f();
    } catch (const Error& e) {
      if (e.kind() == kind) v = 0.0;
    }
    out.push_back({name, v, 0.5, v == 0.0});
  };
  NewtonOptions opt;
  opt.seed = cfg.seed;

  const BetheProblem p2 = sl2_fixture();
  add("sl2 fixture root 5/8", [&] {
    const SolveResult s = solve_newton(p2, std::nullopt, opt);
    return std::abs(s.roots.u.at(0).at(0) - 0.625);
  }, 1e-10);
  const SectionData fx{{Poly::constant(-0.6), Poly{-0.625, 1.0}}, {}};
  add("sl2 fixture D_2 = z - 1", [&] {
    return rel_diff(d_factorize(2, fx, p2.twists, p2.punctures, p2.frame).d_poly, Poly{-1.0, 1.0});
  }, 1e-10);
  add("sl2 q-Bethe residual", [&] {
    return sl2_q_residual({1.0}, {1}, 3.0, 4.0, {0.625}).max_abs;
  }, 1e-12);
  add("jacobi constant fixture", [&] {
    PolyMatrix m(3, std::vector<Poly>(3));
    const double v[3][3] = {{1, 2, 3}, {4, 5, 6}, {7, 8, 10}};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i][j] = Poly::constant(v[i][j]);
    const JacobiReport r = desnanot_jacobi_check(m, QFrame{});
    return r.max_rel + std::abs(r.lhs_first + 24.0);
  }, 1e-10);
  add("functional equation F", [&] {
    PunctureData pd;
    pd.N = 4;
    pd.punctures = {{Cx(0.9, 0.2), {1, 2, 0}}, {Cx(-1.3, 0.4), {2, 0, 1}}};
    return check_ffunc(pd, QFrame(Cx(1.2, 0.3))).max_rel;
  }, 1e-10);

  const BetheProblem p3 = sl3_fixture();
  SolveResult s3;
  add("sl3 solve", [&] {
    s3 = solve_newton(p3, std::nullopt, opt);
    return s3.report.converged ? s3.report.max_abs : INFINITY;
  }, 1e-10);
  Certificate c3;
  add("sl3 correspondence certificate", [&] {
    c3 = correspondence_check(p3, s3.roots);
    double w = 0.0;
    for (const Stage& st : c3.stages) w = std::max(w, st.residual);
    return c3.pass ? w : INFINITY;
  }, 1e-8);
  add("sl3 canonical a1 a2 a3 = 1", [&] {
    return sl3_canonical(c3.sections, p3.twists, p3.punctures, p3.frame).product_defect;
  }, 1e-10);
  add("sl3 third-order relation", [&] {
    const SL3Canonical c = sl3_canonical(c3.sections, p3.twists, p3.punctures, p3.frame);
    return sl3_transfer(c, p3.frame).scalar_residual;
  }, 1e-8);

  SL2Canonical can;
  add("sl2 transfer polynomial", [&] {
    const SolveResult s = solve_newton(p2, std::nullopt, opt);
    const Certificate c = correspondence_check(p2, s.roots);
    const Cx alpha = d_factorize(2, c.sections, p2.twists, p2.punctures, p2.frame).alpha;
    can = sl2_canonical(c.sections.s[1], c.sections.s[0] * (1.0 / alpha), p2.twists.zeta(1), p2.punctures,
                        p2.frame);
    return can.remainder;
  }, kPolynomialTol);
  add("sl2 transfer perturbed (inverted)", [&] {
    const double r = sl2_transfer_remainder(Poly{-0.626, 1.0}, can.rho, can.zeta, p2.frame);
    return r >= 1e-4 ? 0.0 : 1.0;
  }, 0.5);

  add("limit XXZ to XXX order", [&] {
    LimitParams lp;
    lp.N = 2;
    lp.sigma.N = 2;
    lp.sigma.punctures = {{Cx(0.3, 0.1), {1}}};
    lp.upsilon = {{Cx(0.1, 0.5), Cx(-0.2, 0.1)}};
    lp.epsilon = 0.3;
    lp.kappa_exp = {Cx(0.5, 0.1), Cx(-0.5, -0.1)};
    const LimitReport r = limit_flow(lp, {1e-2, 5e-3, 2.5e-3}, {1e-2, 5e-3, 2.5e-3});
    double w = 0.0;
    for (double x : r.xxz_to_xxx.ratios) w = std::max(w, std::abs(x - 2.0));
    for (double x : r.xxx_to_gaudin.ratios) w = std::max(w, std::abs(x - 2.0));
    return w;
  }, 0.4);
  add("gaudin irregular fixture c_1 = 2a", [&] {
    const Cx a(0.7, 0.2), z1(0.3, -0.5), w = z1 + 1.0 / a;
    const ClassicalReport r = classical_sl2(Poly{-w, 1.0}, Poly{w / (2.0 * a) - z1 / a, 1.0 / (2.0 * a)}, {z1},
                                            {2}, a, ClassicalMode::irregular, QFrame{});
    return std::abs(r.c.at(0) - 2.0 * a) + r.bethe.max_abs;
  }, 1e-10);

  add("tRS quadratic oracle", [&] {
    const auto [a, b] = trs_solve(3.0, 2.0, 1.0, 2.0);
    const double s = std::sqrt(465.0);
    const double d = std::min(std::abs(a.p_minus - (27 + s) / 22) + std::abs(b.p_minus - (27 - s) / 22),
                              std::abs(a.p_minus - (27 - s) / 22) + std::abs(b.p_minus - (27 + s) / 22));
    const TRSResiduals ra = trs_relations(a), rb = trs_relations(b);
    return d + std::abs(ra.sum) + std::abs(ra.product) + std::abs(rb.sum) + std::abs(rb.product);
  }, 1e-12);
  add("k-theory reproduces tRS", [&] {
    const auto [a, b] = trs_solve(3.0, 2.0, 1.0, 2.0);
    const QFrame f(std::sqrt(3.0));
    return std::max(ktheory_relation(ktheory_from_trs(a), f).max_rel,
                    ktheory_relation(ktheory_from_trs(b), f).max_rel);
  }, 1e-10);
  add("k-theory on solved instance", [&] {
    PunctureData pd;
    pd.N = 2;
    pd.punctures = {{Cx(1.0, 0.2), {1}}, {Cx(-0.6, 1.1), {1}}};
    const Cx k(0.4, 0.3);
    const BetheProblem p = make_problem(2, pd, {k, 1.0 / k}, {1}, Cx(1.4, 0.3));
    const SolveResult s = solve_newton(p, std::nullopt, opt);
    const Certificate c = correspondence_check(p, s.roots);
    return ktheory_relation(ktheory_from_sections(p, c.sections), p.frame).max_rel;
  }, 1e-9);
  add("p coefficients of (z-1)(z-2)", [&] {
    const PFragment fr = extract_p_coeffs({{Poly{2.0, -3.0, 1.0}}, {}});
    return std::abs(fr.p[0][0] - 3.0) + std::abs(fr.p[0][1] - 2.0);
  }, 1e-14);

  raises("zero polynomial monicize", [] { monicize(Poly{}); }, ErrorKind::ZeroPolynomial);
  raises("sections not divisible by W", [&] {
    d_factorize(2, {{Poly::constant(1.0), Poly{-2.0, 1.0}}, {}}, p2.twists, p2.punctures, p2.frame);
  }, ErrorKind::NotDivisible);
  raises("root of unity rejected", [] { QFrame f(std::polar(1.0, 3.141592653589793 / 3)); }, ErrorKind::InvalidInput);
  return out;
}

Outcome do_selftest(const RunConfig& cfg, std::ostream& err) {
  const std::vector<Check> checks = selftest_checks(cfg);
  Outcome o;
  o.pass = true;
  o.details = json::array();
  err << std::left << std::setw(40) << "check" << std::setw(14) << "value" << std::setw(10) << "tol"
      << "result\n";
  for (const Check& c : checks) {
    o.pass = o.pass && c.pass;
    o.details.push_back({{"name", c.name}, {"value", std::isfinite(c.value) ? json(c.value) : json("error")},
                         {"tol", c.tol}, {"pass", c.pass}});
    std::ostringstream v;
    v << std::setprecision(3) << c.value;
    err << std::left << std::setw(40) << c.name << std::setw(14) << v.str() << std::setw(10) << c.tol
        << (c.pass ? "PASS" : "FAIL") << "\n";
  }
  return o;
}

const char* command_name(Command c) {
  switch (c) {
    case Command::solve: return "solve";
    case Command::verify: return "verify";
    case Command::reconstruct: return "reconstruct";
    case Command::limits: return "limits";
    case Command::ktheory: return "ktheory";
    case Command::selftest: return "selftest";
  }
  return "?";
}

bool is_input_kind(ErrorKind k) {
  return k == ErrorKind::InputError || k == ErrorKind::InvalidInput || k == ErrorKind::BadShape ||
         k == ErrorKind::BadDegrees;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if ((cfg.tol && !(*cfg.tol > 0)) || cfg.starts <= 0 || cfg.window < 0) {
    err << "InputError: --tol, --starts must be positive and --window nonnegative\n";
    return kExitInput;
  }
  Outcome o;
  int code = kExitPass;
  try {
    if (cfg.command == Command::selftest) {
      o = do_selftest(cfg, err);
    } else {
      const json doc = io::parse_text(read_input(cfg.input_path));
      switch (cfg.command) {
        case Command::solve: o = do_solve(doc, cfg); break;
        case Command::verify: o = do_verify(doc, cfg); break;
        case Command::reconstruct: o = do_reconstruct(doc, cfg); break;
        case Command::limits: o = do_limits(doc, cfg); break;
        case Command::ktheory: o = do_ktheory(doc, cfg); break;
        case Command::selftest: break;
      }
    }
    code = o.pass ? kExitPass : kExitFail;
  } catch (const Error& e) {
    if (is_input_kind(e.kind())) {
      err << e.what() << "\n";
      return kExitInput;
    }
    o.pass = false;
    o.details = {{"error", e.what()}, {"stage", e.stage()}};
    code = kExitFail;
  } catch (const json::exception& e) {
    err << "InputError: " << e.what() << "\n";
    return kExitInput;
  }

  const json report = {{"command", command_name(cfg.command)}, {"pass", o.pass}, {"details", o.details}};
  const std::string text = report.dump(2) + "\n";
  if (cfg.output_path.empty()) {
    out << text;
  } else {
    std::ofstream f(cfg.output_path);
    if (!f) {
      err << "InputError: cannot write " << cfg.output_path << "\n";
      return kExitInput;
    }
    f << text;
  }
  return code;
}

int run(const RunConfig& cfg) { return run(cfg, std::cout, std::cerr); }

int main(int argc, char** argv) {
  CLI::App app{"q-oper / Bethe ansatz toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;
  double tol = 0.0;
  auto* tol_opt = app.add_option("--tol", tol, "pass/fail tolerance");
  app.add_option("--seed", cfg.seed, "RNG seed");
  app.add_option("--starts", cfg.starts, "Newton multi-start count");
  app.add_option("--window", cfg.window, "lattice window for nondegeneracy checks");
  app.add_option("--out", cfg.output_path, "output file (default stdout)");

  const std::pair<Command, const char*> cmds[] = {
      {Command::solve, "solve a Bethe problem"},
      {Command::verify, "residuals and nondegeneracy of given roots"},
      {Command::reconstruct, "correspondence certificate for given roots"},
      {Command::limits, "XXZ -> XXX -> Gaudin convergence table"},
      {Command::ktheory, "K-theory relation residuals"},
      {Command::selftest, "run built-in fixtures"}};
  for (const auto& [c, help] : cmds) {
    CLI::App* sub = app.add_subcommand(command_name(c), help);
    sub->fallthrough();
    if (c != Command::selftest) sub->add_option("input", cfg.input_path, "input JSON, - for stdin")->required();
    sub->callback([&cfg, c = c] { cfg.command = c; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }
  if (tol_opt->count() > 0) cfg.tol = tol;
  return run(cfg);
}

}  // namespace qoper::cli

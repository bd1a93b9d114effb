// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "qoper/canonical.hpp"
#include "qoper/qqsys.hpp"
#include "qoper/reconstruct.hpp"
#include "qoper/special.hpp"
#include "support.hpp"

using namespace qoper;
namespace fs = std::filesystem;

namespace {

// pinned tolerances
constexpr double kRootTol = 1e-10;
constexpr double kQBetheTol = 1e-12;
constexpr double kQQTol = 1e-8;
constexpr double kPerturb = 1e-3;
constexpr double kInconsistentFloor = 1e-6;
constexpr double kRoundTripTol = 1e-8;
constexpr double kJacobiTol = 1e-10;
constexpr double kFFuncTol = 1e-10;
constexpr double kStageTol = 1e-8;
constexpr double kProductTol = 1e-10;
constexpr double kMinorTol = 1e-9;
constexpr double kThirdOrderTol = 1e-8;
constexpr double kTransferTol = 1e-9;
constexpr double kTransferFloor = 1e-4;
constexpr double kRatioTarget = 2.0, kRatioBand = 0.4;
constexpr double kGaudinTol = 1e-10;
constexpr double kTRSTol = 1e-10;
constexpr double kKTheoryTol = 1e-9;

struct Outcome {
  bool pass = true;
  std::string note;

  void need(bool ok, const std::string& what) {
    if (!ok && pass) note = what;
    pass = pass && ok;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(3);
  s << x;
  return s.str();
}

Poly nonzero_constant_poly(std::mt19937_64& rng, int deg) {
  Poly p = testing::random_poly(rng, deg);
  while (std::abs(p.coeff(0)) < 0.2) p = testing::random_poly(rng, deg);
  return p;
}

// 1 -------------------------------------------------------------------------
Outcome sl2_round_trip() {
  Outcome o;
  const auto t0 = Clock::now();
  const BetheProblem p = testing::sl2_fixture();
  const SolveResult s = solve_newton(p, std::nullopt);
  o.need(s.report.converged && std::abs(s.roots.u[0][0] - 0.625) <= kRootTol, "root 5/8");
  const SectionData sec{{Poly::constant(-0.6), Poly{-0.625, 1.0}}, {}};
  const DFactorization d = d_factorize(2, sec, p.twists, p.punctures, p.frame);
  o.need(rel_diff(d.d_poly, Poly{-1.0, 1.0}) <= kRootTol, "D_2 = z - 1");
  o.need(sl2_q_residual({1.0}, {1}, 3.0, 4.0, {0.625}).max_abs <= kQBetheTol, "q-Bethe residual");
  const double t = seconds_since(t0);
  o.need(t < 0.1, "runtime " + fmt(t) + " s");
  if (o.pass) o.note = fmt(t) + " s";
  return o;
}

// 2 -------------------------------------------------------------------------
Outcome qq_equivalence() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1002);
  int solved = 0, rejected = 0;
  double worst = 0.0, weakest = INFINITY;
  for (int t = 0; t < 60 && solved < 24; ++t) {
    const int N = 2 + t % 2, L = 1 + (t / 2) % 2;
    const BetheProblem p = testing::random_problem(rng, N, L, 2);
    if (p.total_roots() == 0) continue;
    const auto s = testing::solve_some(p);
    if (!s) continue;
    ++solved;
    QSystem qs;
    try {
      qs = build_qsystem(p, s->roots);
    } catch (const Error& e) {
      o.need(false, std::string("build failed: ") + e.what());
      continue;
    }
    const double r = qq_residual(qs, p.twists, p.frame).max_abs;
    worst = std::max(worst, r);
    o.need(r <= kQQTol, "QQ residual " + fmt(r));

    // move one root at a level that has roots
    int k = 1;
    while (s->roots.u[k - 1].empty()) ++k;
    std::vector<Cx> u = s->roots.u[k - 1];
    u[0] += kPerturb;
    double res = 0.0;
    bool threw = false;
    try {
      build_qtilde(k, qs.Q[k - 1], Poly::from_roots(u), qs.Q[k + 1], qs.Pi[k], p.twists.k(k), p.twists.k(k + 1),
                   p.frame, &res);
    } catch (const Error& e) {
      threw = e.kind() == ErrorKind::Inconsistent;
    }
    if (threw && res > kInconsistentFloor) ++rejected;
    weakest = std::min(weakest, res);
  }
  const double t = seconds_since(t0);
  o.need(solved >= 20, "only " + std::to_string(solved) + " instances solved");
  o.need(rejected == solved, "perturbation accepted, smallest residual " + fmt(weakest));
  o.need(t < 5.0, "runtime " + fmt(t) + " s");
  if (o.pass)
    o.note = std::to_string(solved) + " instances, worst " + fmt(worst) + ", perturbed min " + fmt(weakest) +
             ", " + fmt(t) + " s";
  return o;
}

// 3 -------------------------------------------------------------------------
Outcome forward_backward() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1003);
  int done = 0;
  double worst = 0.0;
  for (int t = 0; t < 24; ++t) {
    const int N = 2 + t % 3;
    const QFrame f(testing::annulus(rng, 1.2, 1.6));
    const TwistData tw{N, testing::random_twists(rng, N)};
    try {
      tw.validate(f, true);
    } catch (const Error&) {
      continue;
    }
    SectionData sec;
    for (int i = 0; i < N; ++i) sec.s.push_back(nonzero_constant_poly(rng, static_cast<int>(rng() % 5)));
    DSystem d;
    d.N = N;
    d.D.assign(N + 1, Poly::constant(1.0));
    d.Dtilde.assign(N + 1, Poly::constant(1.0));
    d.F.assign(N + 1, Poly::constant(1.0));
    for (int k = 1; k <= N; ++k) {
      std::vector<int> rows;
      for (int i = N - k + 1; i <= N; ++i) rows.push_back(i);
      d.D[k] = normalized_minor(rows, sec, tw, f);
    }
    for (int k = 1; k < N; ++k) {
      std::vector<int> rows{N - k};
      for (int i = N - k + 2; i <= N; ++i) rows.push_back(i);
      d.Dtilde[k] = normalized_minor(rows, sec, tw, f);
    }
    const ReconstructResult r = reconstruct_sections(d, tw, f);
    for (int i = 0; i < N; ++i) worst = std::max(worst, rel_diff(r.sections.s[i], sec.s[i]));
    ++done;
  }
  const double t = seconds_since(t0);
  o.need(done >= 20, "only " + std::to_string(done) + " tuples");
  o.need(worst <= kRoundTripTol, "coefficient error " + fmt(worst));
  o.need(t < 10.0, "runtime " + fmt(t) + " s");
  if (o.pass) o.note = std::to_string(done) + " tuples, worst " + fmt(worst) + ", " + fmt(t) + " s";
  return o;
}

// 4 -------------------------------------------------------------------------
Outcome jacobi() {
  Outcome o;
  PolyMatrix c(3, std::vector<Poly>(3));
  const double v[3][3] = {{1, 2, 3}, {4, 5, 6}, {7, 8, 10}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) c[i][j] = Poly::constant(v[i][j]);
  const JacobiReport rc = desnanot_jacobi_check(c, QFrame{});
  o.need(std::abs(rc.lhs_first + 24.0) <= kJacobiTol && std::abs(rc.rhs_first + 24.0) <= kJacobiTol,
         "constant fixture");
  double worst = rc.max_rel;
  std::mt19937_64 rng(1004);
  for (int t = 0; t < 49; ++t) {
    const int n = 3 + t % 3;
    PolyMatrix m(n, std::vector<Poly>(n));
    for (auto& row : m)
      for (auto& e : row) e = testing::random_poly(rng, static_cast<int>(rng() % 3));
    worst = std::max(worst, desnanot_jacobi_check(m, QFrame{}).max_rel);
  }
  o.need(worst <= kJacobiTol, "residual " + fmt(worst));
  if (o.pass) o.note = "50 matrices, worst " + fmt(worst);
  return o;
}

// 5 -------------------------------------------------------------------------
Outcome ffunc() {
  Outcome o;
  std::mt19937_64 rng(1005);
  std::uniform_int_distribution<int> w(0, 3);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    PunctureData pd;
    pd.N = 2 + t % 3;
    const int L = 1 + t % 3;
    for (int m = 0; m < L; ++m) {
      Puncture p{testing::annulus(rng, 0.5, 2.0), std::vector<int>(pd.N - 1)};
      for (int& x : p.weights) x = w(rng);
      pd.punctures.push_back(p);
    }
    worst = std::max(worst, check_ffunc(pd, QFrame(testing::annulus(rng, 1.1, 1.5))).max_rel);
  }
  o.need(worst <= kFFuncTol, "residual " + fmt(worst));
  if (o.pass) o.note = "20 configurations, worst " + fmt(worst);
  return o;
}

// 6 -------------------------------------------------------------------------
Outcome certificates() {
  Outcome o;
  std::mt19937_64 rng(1006);
  int done = 0;
  double worst = 0.0;
  for (int t = 0; t < 40 && done < 12; ++t) {
    const BetheProblem p = t == 0 ? testing::sl3_fixture() : testing::random_problem(rng, 3, 1 + t % 2, 2);
    if (p.total_roots() == 0) continue;
    const auto s = testing::solve_some(p);
    if (!s) continue;
    ++done;
    const Certificate c = correspondence_check(p, s->roots);
    bool roots_seen = false, alpha_seen = false;
    for (const Stage& st : c.stages) {
      worst = std::max(worst, st.residual);
      o.need(st.residual <= kStageTol, st.name + " " + fmt(st.residual));
      roots_seen = roots_seen || st.name.rfind("roots_", 0) == 0;
      alpha_seen = alpha_seen || st.name.rfind("alpha_", 0) == 0;
    }
    o.need(c.pass && roots_seen && alpha_seen, "certificate incomplete");
  }
  o.need(done >= 10, "only " + std::to_string(done) + " instances");
  if (o.pass) o.note = std::to_string(done) + " instances, worst stage " + fmt(worst);
  return o;
}

// 7 -------------------------------------------------------------------------
Outcome sl3_suite() {
  Outcome o;
  std::mt19937_64 rng(1007);
  int done = 0;
  double prod = 0.0, minor = 0.0, third = 0.0;
  for (int t = 0; t < 12 && done < 4; ++t) {
    const BetheProblem p = t == 0 ? testing::sl3_fixture() : testing::random_problem(rng, 3, 2, 2);
    const auto s = testing::solve_some(p);
    if (!s) continue;
    const Certificate c = correspondence_check(p, s->roots);
    try {
      const SL3Canonical can = sl3_canonical(c.sections, p.twists, p.punctures, p.frame);
      const SL3Transfer tr = sl3_transfer(can, p.frame);
      prod = std::max(prod, can.product_defect);
      minor = std::max(minor, can.minor_mismatch);
      third = std::max(third, tr.scalar_residual);
      ++done;
    } catch (const Error& e) {
      o.need(false, e.what());
    }
  }
  o.need(done >= 1, "no instance");
  o.need(prod <= kProductTol, "a1 a2 a3 - 1 = " + fmt(prod));
  o.need(minor <= kMinorTol, "minor forms differ by " + fmt(minor));
  o.need(third <= kThirdOrderTol, "third-order residual " + fmt(third));
  if (o.pass)
    o.note = std::to_string(done) + " instances, product " + fmt(prod) + ", minors " + fmt(minor) +
             ", third-order " + fmt(third);
  return o;
}

// 8 -------------------------------------------------------------------------
Outcome sl2_transfer() {
  Outcome o;
  std::mt19937_64 rng(1008);
  int done = 0;
  double worst = 0.0, floor = INFINITY;
  for (int t = 0; t < 16 && done < 8; ++t) {
    const BetheProblem p = t == 0 ? testing::sl2_fixture() : testing::random_problem(rng, 2, 1 + t % 2, 2);
    if (p.total_roots() == 0) continue;
    const auto s = testing::solve_some(p);
    if (!s) continue;
    ++done;
    const Certificate c = correspondence_check(p, s->roots);
    const Cx alpha = d_factorize(2, c.sections, p.twists, p.punctures, p.frame).alpha;
    const Poly& qm = c.sections.s[1];
    const SL2Canonical can =
        sl2_canonical(qm, c.sections.s[0] * (1.0 / alpha), p.twists.zeta(1), p.punctures, p.frame);
    worst = std::max(worst, can.remainder);
    std::vector<Cx> r = roots(qm, p.frame);
    r[0] += kPerturb;
    floor = std::min(floor, sl2_transfer_remainder(Poly::from_roots(r) * qm.lead(), can.rho, can.zeta, p.frame));
  }
  o.need(done >= 5, "only " + std::to_string(done) + " instances");
  o.need(worst <= kTransferTol, "remainder " + fmt(worst));
  o.need(floor >= kTransferFloor, "perturbed remainder " + fmt(floor));
  if (o.pass) o.note = std::to_string(done) + " instances, worst " + fmt(worst) + ", perturbed min " + fmt(floor);
  return o;
}

// 9 -------------------------------------------------------------------------
Outcome limits() {
  Outcome o;
  LimitParams lp;
  lp.N = 2;
  lp.sigma.N = 2;
  lp.sigma.punctures = {{Cx(0.3, 0.1), {1}}};
  lp.upsilon = {{Cx(0.1, 0.5), Cx(-0.2, 0.1)}};
  lp.epsilon = 0.3;
  lp.kappa_exp = {Cx(0.5, 0.1), Cx(-0.5, -0.1)};
  const std::vector<double> steps{1e-2, 5e-3, 2.5e-3};
  const LimitReport r = limit_flow(lp, steps, steps);
  std::string ratios;
  for (const LimitLeg* leg : {&r.xxz_to_xxx, &r.xxx_to_gaudin}) {
    o.need(leg->ratios.size() == 2, "missing ratios");
    for (double x : leg->ratios) {
      o.need(std::abs(x - kRatioTarget) <= kRatioBand, "ratio " + fmt(x));
      ratios += fmt(x) + " ";
    }
  }
  const Cx a(0.7, 0.2), z1(0.3, -0.5), w = z1 + 1.0 / a;
  const ClassicalReport g = classical_sl2(Poly{-w, 1.0}, Poly{w / (2.0 * a) - z1 / a, 1.0 / (2.0 * a)}, {z1}, {2},
                                          a, ClassicalMode::irregular, QFrame{});
  o.need(std::abs(g.c.at(0) - 2.0 * a) <= kGaudinTol, "c_1 != 2a");
  o.need(g.bethe.max_abs <= kGaudinTol, "gaudin residual " + fmt(g.bethe.max_abs));
  if (o.pass) o.note = "ratios " + ratios + "and c_1 = 2a";
  return o;
}

// 10 ------------------------------------------------------------------------
Outcome ktheory() {
  Outcome o;
  const auto [a, b] = trs_solve(3.0, 2.0, 1.0, 2.0);
  const double s = std::sqrt(465.0);
  o.need(std::abs(a.p_minus - (27 + s) / 22) <= kTRSTol && std::abs(b.p_minus - (27 - s) / 22) <= kTRSTol,
         "quadratic oracle");
  const QFrame f3(std::sqrt(3.0));
  double worst = 0.0;
  for (const TRSInstance& t : {a, b}) {
    const TRSResiduals r = trs_relations(t);
    worst = std::max({worst, std::abs(r.sum), std::abs(r.product)});
    worst = std::max(worst, ktheory_relation(ktheory_from_trs(t), f3).max_rel);
  }
  o.need(worst <= kTRSTol, "two-body residual " + fmt(worst));

  PunctureData pd;
  pd.N = 2;
  pd.punctures = {{Cx(1.0, 0.2), {1}}, {Cx(-0.6, 1.1), {1}}};
  const Cx k(0.4, 0.3);
  const BetheProblem p = make_problem(2, pd, {k, 1.0 / k}, {1}, Cx(1.4, 0.3));
  const auto sol = testing::solve_some(p);
  o.need(sol.has_value(), "instance did not solve");
  double solved = INFINITY;
  if (sol) {
    const Certificate c = correspondence_check(p, sol->roots);
    solved = ktheory_relation(ktheory_from_sections(p, c.sections), p.frame).max_rel;
  }
  o.need(solved <= kKTheoryTol, "solved instance " + fmt(solved));
  if (o.pass) o.note = "two-body " + fmt(worst) + ", solved " + fmt(solved);
  return o;
}

// 11 ------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int shell(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Outcome cli_determinism(const std::string& cli, const std::string& data) {
  Outcome o;
  if (cli.empty() || data.empty()) {
    o.need(false, "--cli and --data are required");
    return o;
  }
  const fs::path work = fs::temp_directory_path() / ("qoper_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(work);
  const std::string q = "\"";
  const std::string inputs[] = {data + "/sl2_problem.json", data + "/sl3_problem.json"};
  for (const std::string& in : inputs) {
    std::string prev;
    for (int i = 0; i < 2; ++i) {
      const fs::path out = work / ("solve_" + std::to_string(i) + ".json");
      const fs::path rec = work / ("reconstruct_" + std::to_string(i) + ".json");
      const int rc = shell(q + cli + q + " solve " + q + in + q + " --seed 7 --out " + q + out.string() + q);
      o.need(rc == 0, "solve exited " + std::to_string(rc));
      const int rc2 = shell(q + cli + q + " reconstruct " + q + out.string() + q + " --out " + q + rec.string() + q);
      o.need(rc2 == 0, "reconstruct exited " + std::to_string(rc2));
      const std::string both = slurp(out) + slurp(rec);
      if (i == 1) o.need(both == prev && !both.empty(), "outputs differ for " + in);
      prev = both;
    }
  }
  const int st = shell(q + cli + q + " selftest --out " + q + (work / "selftest.json").string() + q + " 2>/dev/null");
  o.need(st == 0, "selftest exited " + std::to_string(st));
  fs::remove_all(work);
  if (o.pass) o.note = "identical bytes, selftest exit 0";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli, data;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string key = argv[i];
    if (key == "--cli") cli = argv[i + 1];
    else if (key == "--data") data = argv[i + 1];
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"sl2 closed-form round trip", sl2_round_trip},
      {"QQ equivalence and perturbation rejection", qq_equivalence},
      {"determinant forward-backward", forward_backward},
      {"Desnanot-Jacobi engine", jacobi},
      {"structure functional equation", ffunc},
      {"correspondence certificates N=3", certificates},
      {"sl3 canonical suite", sl3_suite},
      {"sl2 transfer polynomiality", sl2_transfer},
      {"limit hierarchy", limits},
      {"k-theory and two-body tRS", ktheory},
      {"cli determinism and selftest", [&] { return cli_determinism(cli, data); }},
  };

  int failed = 0, n = 0;
  for (const auto& [name, run] : criteria) {
    ++n;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note = std::string("threw ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%-4d %-45s %s  %s\n", n, name.c_str(), o.pass ? "PASS" : "FAIL", o.note.c_str());
  }
  std::printf("%d/%d criteria passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}

#include <doctest.h>

#include <sstream>

#include "qoper/cli.hpp"
#include "qoper/io.hpp"
#include "support.hpp"

using namespace qoper;

namespace {

std::string expect_input_error(const std::string& text) {
  try {
    io::problem_from(io::parse_text(text));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InputError);
    return e.what();
  }
  FAIL("expected InputError");
  return {};
}

}  // namespace

TEST_CASE("problem JSON round trip") {
  const BetheProblem p = testing::sl3_fixture();
  const io::json j = io::to_json(p);
  const BetheProblem q = io::problem_from(j);
  CHECK(io::to_json(q) == j);
  CHECK(j["sqrt_q"][0].get<double>() == 1.3);
}

TEST_CASE("schema errors carry JSON pointers") {
  CHECK(expect_input_error(R"({"sqrt_q":2,"kappa":[1,1],"punctures":[],"r":[0]})").find("/N") != std::string::npos);
  CHECK(expect_input_error(R"({"N":2,"sqrt_q":2,"kappa":[0.5,2],"punctures":[{"z":1,"weights":[1,2]}],"r":[1]})")
            .find("/punctures/0/weights") != std::string::npos);
  CHECK(expect_input_error(R"({"N":2,"sqrt_q":"x","kappa":[0.5,2],"punctures":[],"r":[0]})").find("/sqrt_q") !=
        std::string::npos);
  CHECK(expect_input_error("{not json").find("InputError") != std::string::npos);
  // valid shape, invalid content
  expect_input_error(R"({"N":2,"sqrt_q":2,"kappa":[2,3],"punctures":[],"r":[0]})");
}

TEST_CASE("complex numbers as pairs or plain numbers") {
  CHECK(io::cx_from(io::json::parse("[1.5,-2]"), "") == Cx(1.5, -2.0));
  CHECK(io::cx_from(io::json::parse("3"), "") == Cx(3.0));
  CHECK_THROWS_AS(io::cx_from(io::json::parse("[1,2,3]"), "/x"), Error);
  const Poly p = io::poly_from(io::json::parse(R"({"coeffs":[[1,0],[0,2]]})"), "");
  CHECK(rel_diff(p, Poly{1.0, Cx(0, 2)}) == 0.0);
}

TEST_CASE("selftest through run") {
  cli::RunConfig cfg;
  cfg.command = cli::Command::selftest;
  std::ostringstream out, err;
  CHECK(cli::run(cfg, out, err) == cli::kExitPass);
  const io::json j = io::json::parse(out.str());
  CHECK(j["pass"].get<bool>());
  CHECK(err.str().find("FAIL") == std::string::npos);
}

TEST_CASE("run rejects bad flags and files") {
  cli::RunConfig cfg;
  cfg.command = cli::Command::solve;
  cfg.input_path = "/nonexistent/problem.json";
  std::ostringstream out, err;
  CHECK(cli::run(cfg, out, err) == cli::kExitInput);
  cfg.tol = -1.0;
  CHECK(cli::run(cfg, out, err) == cli::kExitInput);
}

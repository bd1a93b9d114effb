#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qoper/bethe.hpp"
#include "qoper/canonical.hpp"
#include "qoper/reconstruct.hpp"
#include "qoper/special.hpp"

namespace qoper::io {

using nlohmann::json;

// Complex numbers are [re, im]; plain numbers are accepted on input.
json to_json(Cx z);
json to_json(const std::vector<Cx>& v);
json to_json(const Poly& p);
json to_json(const Rational& r);
json to_json(const ResidualReport& r);
json to_json(const BetheProblem& p);
json to_json(const SolveResult& s);
json to_json(const Certificate& c);
json to_json(const LimitReport& r);
json to_json(const KTheoryReport& r);
json to_json(const SL2Canonical& c);
json to_json(const SL3Canonical& c, const SL3Transfer& t);

// Parsers throw Error(InputError) naming the offending JSON pointer.
Cx cx_from(const json& j, const std::string& ptr);
Poly poly_from(const json& j, const std::string& ptr);
// base is the JSON pointer of j inside the document.
BetheProblem problem_from(const json& j, const ToleranceConfig& tol = {}, int window = 0,
                          const std::string& base = "");
BetheRoots roots_from(const json& j, const BetheProblem& prob, const std::string& ptr);

struct LimitInput {
  LimitParams params;
  std::vector<double> R_sequence;
  std::vector<double> eps_sequence;
};
LimitInput limits_from(const json& j);
KTheoryInstance ktheory_from(const json& j);

json parse_text(const std::string& text);

}  // namespace qoper::io

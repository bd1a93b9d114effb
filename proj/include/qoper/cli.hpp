#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace qoper::cli {

enum class Command { solve, verify, reconstruct, limits, ktheory, selftest };

struct RunConfig {
  Command command = Command::selftest;
  std::string input_path;   // "-" reads stdin
  std::string output_path;  // empty writes stdout
  std::optional<double> tol;
  std::uint64_t seed = 0;
  int starts = 32;
  int window = 0;  // 0 picks the default lattice window
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInput = 2;

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run(const RunConfig& cfg);
int main(int argc, char** argv);

}  // namespace qoper::cli

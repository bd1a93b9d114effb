#pragma once

#include <stdexcept>
#include <string>

namespace qoper {

enum class ErrorKind {
  NonConvergence,
  ZeroPolynomial,
  ZeroInput,
  BadIndices,
  BadShape,
  NotDivisible,
  ZeroDeterminant,
  PoleHit,
  NoConvergence,
  Inconsistent,
  DegenerateTwists,
  VandermondeDegenerate,
  ZeroConstantTerm,
  IdentityFailure,
  NotPolynomial,
  MinorMismatch,
  WronskianMismatch,
  PoleAtBetheRoot,
  BadDegrees,
  InvalidInput,
  InputError,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg, std::string stage = {})
      : std::runtime_error(std::string(kind_name(kind)) + ": " + msg),
        kind_(kind),
        stage_(std::move(stage)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& stage() const noexcept { return stage_; }

  // Same error, tagged with the pipeline stage it escaped from.
  Error with_stage(const std::string& stage) const {
    Error e(*this);
    e.stage_ = stage;
    return e;
  }

 private:
  ErrorKind kind_;
  std::string stage_;
};

}  // namespace qoper

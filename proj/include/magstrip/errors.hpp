#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace magstrip {

enum class ErrorKind {
  InvalidSpec,
  NoConvergence,
  FitDegenerate,
  OutOfRange,
  AtThreshold,
  EmptyWindow,
  OutOfStrip,
  DecayViolation,
  EpsilonOutOfRange,
  NoPureTail,
  TruncationUnstable,
  MatchingFailure,
  AnchorAmbiguity,
  AlphaOutOfRange,
  InvalidArgument,
  SignMixed,
  Underdetermined,
  ConfigParse,
  Validation,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Exception carrying a machine-checkable kind; every library failure is one of these.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidSpec: return "invalid-spec";
    case ErrorKind::NoConvergence: return "no-convergence";
    case ErrorKind::FitDegenerate: return "fit-degenerate";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::AtThreshold: return "at-threshold";
    case ErrorKind::EmptyWindow: return "empty-window";
    case ErrorKind::OutOfStrip: return "out-of-strip";
    case ErrorKind::DecayViolation: return "decay-violation";
    case ErrorKind::EpsilonOutOfRange: return "epsilon-out-of-range";
    case ErrorKind::NoPureTail: return "no-pure-tail";
    case ErrorKind::TruncationUnstable: return "truncation-unstable";
    case ErrorKind::MatchingFailure: return "matching-failure";
    case ErrorKind::AnchorAmbiguity: return "anchor-ambiguity";
    case ErrorKind::AlphaOutOfRange: return "alpha-out-of-range";
    case ErrorKind::InvalidArgument: return "invalid";
    case ErrorKind::SignMixed: return "sign-mixed";
    case ErrorKind::Underdetermined: return "underdetermined";
    case ErrorKind::ConfigParse: return "config-parse";
    case ErrorKind::Validation: return "validation";
  }
  return "unknown";
}

}  // namespace magstrip

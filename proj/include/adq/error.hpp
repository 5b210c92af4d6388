#pragma once

#include <stdexcept>
#include <string>

namespace adq {

enum class ErrorKind {
  InvalidArgument,
  InvalidProbs,
  SSCViolation,
  RejectionStall,
  BudgetExhausted,
  ZeroMassRegion,
  InvalidConfig,
  TooLarge,
  EmptyCells,
  DegenerateCurve,
  PackingLevelMismatch,
  CapExceeded,
  NumericFailure,
  Parse,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by mass queries that ran out of node budget. The partial bracket
// [lower, upper] still contains the true mass.
class BudgetExhausted : public Error {
 public:
  BudgetExhausted(double lower, double upper)
      : Error(ErrorKind::BudgetExhausted,
              "unresolved weight " + std::to_string(upper - lower) + " above tolerance"),
        lower_(lower),
        upper_(upper) {}

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

 private:
  double lower_;
  double upper_;
};

}  // namespace adq

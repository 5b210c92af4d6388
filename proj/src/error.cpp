#include "adq/error.hpp"

#include "adq/norm.hpp"

namespace adq {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidProbs: return "InvalidProbs";
    case ErrorKind::SSCViolation: return "SSCViolation";
    case ErrorKind::RejectionStall: return "RejectionStall";
    case ErrorKind::BudgetExhausted: return "BudgetExhausted";
    case ErrorKind::ZeroMassRegion: return "ZeroMassRegion";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::EmptyCells: return "EmptyCells";
    case ErrorKind::DegenerateCurve: return "DegenerateCurve";
    case ErrorKind::PackingLevelMismatch: return "PackingLevelMismatch";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::NumericFailure: return "NumericFailure";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

std::string_view to_string(NormKind norm) noexcept {
  switch (norm) {
    case NormKind::Euclidean: return "euclidean";
    case NormKind::Chebyshev: return "chebyshev";
    case NormKind::Taxicab: return "taxicab";
  }
  return "euclidean";
}

NormKind parse_norm(std::string_view name) {
  if (name == "euclidean") return NormKind::Euclidean;
  if (name == "chebyshev" || name == "max") return NormKind::Chebyshev;
  if (name == "taxicab" || name == "l1") return NormKind::Taxicab;
  throw Error(ErrorKind::Parse, "unknown norm '" + std::string(name) + "'");
}

}  // namespace adq

#pragma once

#include <stdexcept>
#include <string>

namespace ftsc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidGraph : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct DecompositionFailed : Error {
  using Error::Error;
};

/// Labels produced by different provider backends were mixed in one query.
struct BackendMismatch : Error {
  using Error::Error;
};

/// Labels from different builds (or inconsistent metadata) were mixed.
struct LabelMixError : Error {
  using Error::Error;
};

struct MalformedBits : Error {
  using Error::Error;
};

struct InternalBoundViolated : Error {
  using Error::Error;
};

struct RecursionBudgetExceeded : Error {
  using Error::Error;
};

struct BudgetExceeded : Error {
  using Error::Error;
};

struct GenerationFailed : Error {
  using Error::Error;
};

}  // namespace ftsc

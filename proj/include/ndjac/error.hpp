#pragma once

#include <stdexcept>
#include <string>

namespace ndjac {

enum class Errc {
  TagMismatch,
  DivisionByZero,
  UnsupportedAlgebra,
  ShapeMismatch,
  DegenerateSpectrum,
  NotPsd,
  PivotRequired,
  Domain,
  InvalidInput,
  SingularChart,
  Conditioning,
  Configuration,
  Registry,
  InconclusiveStatistics,
  InternalConsistency,
  Io,
};

const char* to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ndjac

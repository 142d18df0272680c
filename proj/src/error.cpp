#include "ndjac/error.hpp"

namespace ndjac {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::TagMismatch: return "tag-mismatch";
    case Errc::DivisionByZero: return "division-by-zero";
    case Errc::UnsupportedAlgebra: return "unsupported-algebra";
    case Errc::ShapeMismatch: return "shape-mismatch";
    case Errc::DegenerateSpectrum: return "degenerate-spectrum";
    case Errc::NotPsd: return "not-psd";
    case Errc::PivotRequired: return "pivot-required";
    case Errc::Domain: return "domain";
    case Errc::InvalidInput: return "invalid-input";
    case Errc::SingularChart: return "singular-chart";
    case Errc::Conditioning: return "conditioning";
    case Errc::Configuration: return "configuration";
    case Errc::Registry: return "registry";
    case Errc::InconclusiveStatistics: return "inconclusive-statistics";
    case Errc::InternalConsistency: return "internal-consistency";
    case Errc::Io: return "io";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace ndjac

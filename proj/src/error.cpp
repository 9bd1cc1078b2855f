#include "mg1/error.hpp"

namespace mg1 {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NotStochastic: return "NotStochastic";
    case Errc::Reducible: return "Reducible";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::IndexOutOfDomain: return "IndexOutOfDomain";
    case Errc::ToleranceUnreachable: return "ToleranceUnreachable";
    case Errc::ExponentMismatch: return "ExponentMismatch";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::GammaTooSmall: return "GammaTooSmall";
    case Errc::NegativeArgument: return "NegativeArgument";
    case Errc::GridUnderflow: return "GridUnderflow";
    case Errc::CutoffTooSmall: return "CutoffTooSmall";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::CapTooSmall: return "CapTooSmall";
    case Errc::ReferenceUnstable: return "ReferenceUnstable";
    case Errc::NonNegativeDrift: return "NonNegativeDrift";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::PreconditionViolation: return "PreconditionViolation";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace mg1

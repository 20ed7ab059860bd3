#include "ared/error.hpp"

namespace ared {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::DegenerateRange: return "DegenerateRange";
    case Errc::EmptyDomain: return "EmptyDomain";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::DrawExhausted: return "DrawExhausted";
    case Errc::EmptyArchive: return "EmptyArchive";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::SolverDiverged: return "SolverDiverged";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::MissingEndpoints: return "MissingEndpoints";
    case Errc::UnmeasuredInitialSample: return "UnmeasuredInitialSample";
    case Errc::WrongState: return "WrongState";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::NotConverged: return "NotConverged";
    case Errc::IoFailure: return "IoFailure";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::CorruptDocument: return "CorruptDocument";
    case Errc::BindFailure: return "BindFailure";
    }
    return "Unknown";
}

} // namespace ared

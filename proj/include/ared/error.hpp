#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ared {

enum class Errc {
    DegenerateRange,
    EmptyDomain,
    OutOfDomain,
    InvalidConfig,
    DrawExhausted,
    EmptyArchive,
    InsufficientData,
    SolverDiverged,
    LengthMismatch,
    MissingEndpoints,
    UnmeasuredInitialSample,
    WrongState,
    NonFiniteValue,
    NotConverged,
    IoFailure,
    SchemaMismatch,
    CorruptDocument,
    BindFailure,
};

std::string_view to_string(Errc code) noexcept;

// Every failure surfaced by the library carries one of the codes above so
// that the CLI and the HTTP layer can map it without parsing messages.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace ared

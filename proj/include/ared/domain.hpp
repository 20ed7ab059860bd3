#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ared {

/// Closed value range of one independent variable, in engineering units.
struct VariableRange {
    std::string name;
    double low = 0.0;
    double high = 1.0;

    double length() const noexcept { return high - low; }
    bool contains(double x) const noexcept { return x >= low && x <= high; }
};

/// Ordered independent variables plus the name of the measured response.
///
/// All distances inside the engine are taken in the normalized unit
/// hypercube [0,1]^n, so the diagonal is always sqrt(n) regardless of units.
struct Domain {
    std::vector<VariableRange> ivs;
    std::string dv_name = "y";

    std::size_t dimension() const noexcept { return ivs.size(); }
    double diagonal() const noexcept;
    bool contains(std::span<const double> coords) const noexcept;
};

/// Throws Errc::EmptyDomain or Errc::DegenerateRange.
const Domain& validate_domain(const Domain& domain);

/// Maps coords into [0,1]^n. Throws Errc::OutOfDomain for points outside the box.
std::vector<double> normalize(const Domain& domain, std::span<const double> coords);
/// Same map without the containment check; used for extrapolation queries.
void normalize_into(const Domain& domain, std::span<const double> coords, std::span<double> out) noexcept;
std::vector<double> denormalize(const Domain& domain, std::span<const double> unit);

enum class Provenance { initial, drawn, feedback };

std::string_view to_string(Provenance p) noexcept;
Provenance provenance_from_string(std::string_view s);

struct Sample {
    std::vector<double> coords;
    std::optional<double> value;
    Provenance provenance = Provenance::initial;
    std::size_t sequence_index = 0;
    /// Wall-clock time the value was entered (ms since epoch, 0 if unknown).
    /// Bookkeeping only; never used in computations.
    std::int64_t recorded_unix_ms = 0;

    bool measured() const noexcept { return value.has_value(); }
};

} // namespace ared

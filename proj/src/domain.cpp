#include "ared/domain.hpp"

#include "ared/error.hpp"

#include <cmath>

namespace ared {

double Domain::diagonal() const noexcept {
    return std::sqrt(static_cast<double>(ivs.size()));
}

bool Domain::contains(std::span<const double> coords) const noexcept {
    if (coords.size() != ivs.size()) return false;
    for (std::size_t i = 0; i < ivs.size(); ++i) {
        if (!ivs[i].contains(coords[i])) return false;
    }
    return true;
}

const Domain& validate_domain(const Domain& domain) {
    if (domain.ivs.empty()) {
        throw Error(Errc::EmptyDomain, "domain has no independent variables");
    }
    for (const auto& iv : domain.ivs) {
        if (!std::isfinite(iv.low) || !std::isfinite(iv.high) || !(iv.high > iv.low)) {
            throw Error(Errc::DegenerateRange,
                        "variable '" + iv.name + "' needs low < high");
        }
    }
    return domain;
}

void normalize_into(const Domain& domain, std::span<const double> coords,
                    std::span<double> out) noexcept {
    for (std::size_t i = 0; i < domain.ivs.size(); ++i) {
        const auto& iv = domain.ivs[i];
        out[i] = (coords[i] - iv.low) / iv.length();
    }
}

std::vector<double> normalize(const Domain& domain, std::span<const double> coords) {
    if (coords.size() != domain.dimension()) {
        throw Error(Errc::OutOfDomain, "coordinate count does not match the domain");
    }
    if (!domain.contains(coords)) {
        throw Error(Errc::OutOfDomain, "point lies outside the domain");
    }
    std::vector<double> out(coords.size());
    normalize_into(domain, coords, out);
    return out;
}

std::vector<double> denormalize(const Domain& domain, std::span<const double> unit) {
    if (unit.size() != domain.dimension()) {
        throw Error(Errc::OutOfDomain, "coordinate count does not match the domain");
    }
    std::vector<double> out(unit.size());
    for (std::size_t i = 0; i < unit.size(); ++i) {
        const auto& iv = domain.ivs[i];
        out[i] = iv.low + unit[i] * iv.length();
    }
    return out;
}

std::string_view to_string(Provenance p) noexcept {
    switch (p) {
    case Provenance::initial: return "initial";
    case Provenance::drawn: return "drawn";
    case Provenance::feedback: return "feedback";
    }
    return "initial";
}

Provenance provenance_from_string(std::string_view s) {
    if (s == "initial") return Provenance::initial;
    if (s == "drawn") return Provenance::drawn;
    if (s == "feedback") return Provenance::feedback;
    throw Error(Errc::CorruptDocument, "unknown provenance '" + std::string(s) + "'");
}

} // namespace ared

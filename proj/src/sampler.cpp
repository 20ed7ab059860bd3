#include "ared/sampler.hpp"

#include "ared/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ared {

bool NormalDrawSpec::contains(std::span<const double> coords) const noexcept {
    if (coords.size() != mu.size()) return false;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (coords[i] < lower[i] || coords[i] > upper[i]) return false;
    }
    return true;
}

void validate(const ConstraintParams& params) {
    if (!(params.p >= 0.0) || !(params.q > 0.0) || !std::isfinite(params.p) ||
        !std::isfinite(params.q)) {
        throw Error(Errc::InvalidConfig, "constraint parameters need p >= 0 and q > 0");
    }
}

NormalDrawSpec exploratory_spec(const Domain& domain) {
    NormalDrawSpec spec;
    for (const auto& iv : domain.ivs) {
        spec.mu.push_back(0.5 * (iv.low + iv.high));
        spec.sigma.push_back(0.25 * iv.length());
        spec.lower.push_back(iv.low);
        spec.upper.push_back(iv.high);
    }
    return spec;
}

NormalDrawSpec feedback_spec(const Domain& domain, const FeedbackCenter& center) {
    if (!domain.contains(center.coords)) {
        throw Error(Errc::OutOfDomain, "feedback center lies outside the domain");
    }
    NormalDrawSpec spec;
    for (std::size_t i = 0; i < domain.dimension(); ++i) {
        const auto& iv = domain.ivs[i];
        const double mu = center.coords[i];
        const double sigma = 0.10 * iv.length();
        spec.mu.push_back(mu);
        spec.sigma.push_back(sigma);
        spec.lower.push_back(std::max(iv.low, mu - 2.0 * sigma));
        spec.upper.push_back(std::min(iv.high, mu + 2.0 * sigma));
    }
    return spec;
}

std::vector<double> draw_point(const NormalDrawSpec& spec, Rng& rng, std::size_t max_attempts) {
    std::vector<double> out(spec.dimension());
    for (std::size_t i = 0; i < spec.dimension(); ++i) {
        if (!(spec.sigma[i] > 0.0) || spec.lower[i] > spec.upper[i]) {
            throw Error(Errc::InvalidConfig, "draw spec needs sigma > 0 and a non-empty interval");
        }
        bool accepted = false;
        for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
            const double x = rng.normal(spec.mu[i], spec.sigma[i]);
            if (x >= spec.lower[i] && x <= spec.upper[i]) {
                out[i] = x;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            throw Error(Errc::DrawExhausted,
                        "axis " + std::to_string(i) + " rejected " + std::to_string(max_attempts) +
                            " normal draws");
        }
    }
    return out;
}

double constraint_threshold(double diagonal, std::size_t v, const ConstraintParams& params) {
    return diagonal / (params.p * static_cast<double>(v) + params.q);
}

double min_distance(std::span<const double> candidate, std::span<const Sample> archive,
                    const Domain& domain) {
    if (archive.empty()) throw Error(Errc::EmptyArchive, "no samples to measure distance to");
    const std::size_t n = domain.dimension();
    std::vector<double> c(n), a(n);
    normalize_into(domain, candidate, c);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : archive) {
        normalize_into(domain, s.coords, a);
        double d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double diff = c[i] - a[i];
            d2 += diff * diff;
        }
        best = std::min(best, d2);
    }
    return std::sqrt(best);
}

ConstrainedDraw draw_constrained(const NormalDrawSpec& spec, std::span<const Sample> archive,
                                 std::size_t v, const ConstraintParams& params,
                                 const Domain& domain, Rng& rng, std::size_t max_attempts,
                                 std::optional<double> diagonal_override) {
    const double diagonal = diagonal_override.value_or(domain.diagonal());
    const double threshold = constraint_threshold(diagonal, v, params);
    for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
        auto coords = draw_point(spec, rng, max_attempts);
        const double d = min_distance(coords, archive, domain);
        if (d > threshold) {
            return ConstrainedDraw{std::move(coords), d, threshold, attempt};
        }
    }
    throw Error(Errc::DrawExhausted, "no candidate satisfied the distance constraint after " +
                                         std::to_string(max_attempts) + " draws");
}

} // namespace ared

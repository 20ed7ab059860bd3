#pragma once

#include "ared/domain.hpp"
#include "ared/random.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ared {

/// Per-axis normal distribution truncated to [lower, upper], engineering units.
struct NormalDrawSpec {
    std::vector<double> mu;
    std::vector<double> sigma;
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t dimension() const noexcept { return mu.size(); }
    bool contains(std::span<const double> coords) const noexcept;
};

/// Control function p*v + q of the minimum-distance constraint.
struct ConstraintParams {
    double p = 0.7;
    double q = 10.0;
};

void validate(const ConstraintParams& params);

struct FeedbackCenter {
    std::vector<double> coords;
    double triggering_ape = 0.0;
    std::size_t sample_index = 0;
};

/// mu at the range midpoint and sigma = length/4, so mu +- 2 sigma is the full range.
NormalDrawSpec exploratory_spec(const Domain& domain);

/// mu at the feedback case, sigma = 10% of each range, truncated to mu +- 2 sigma
/// clipped to the domain.
NormalDrawSpec feedback_spec(const Domain& domain, const FeedbackCenter& center);

/// Independent per-axis rejection sampling inside the truncation box.
/// Throws Errc::DrawExhausted when one axis needs more than max_attempts tries.
std::vector<double> draw_point(const NormalDrawSpec& spec, Rng& rng, std::size_t max_attempts);

/// L / (p*v + q).
double constraint_threshold(double diagonal, std::size_t v, const ConstraintParams& params);

/// Euclidean distance in normalized space from candidate to its nearest archived sample.
/// Throws Errc::EmptyArchive.
double min_distance(std::span<const double> candidate, std::span<const Sample> archive,
                    const Domain& domain);

struct ConstrainedDraw {
    std::vector<double> coords;
    double distance = 0.0;  // normalized distance to the nearest archived sample
    double threshold = 0.0; // bound it had to exceed
    std::size_t attempts = 0;
};

/// Draws from spec until a point lies strictly farther than the threshold from
/// every archived sample. The diagonal defaults to sqrt(n) of the domain.
ConstrainedDraw draw_constrained(const NormalDrawSpec& spec, std::span<const Sample> archive,
                                 std::size_t v, const ConstraintParams& params,
                                 const Domain& domain, Rng& rng, std::size_t max_attempts,
                                 std::optional<double> diagonal_override = std::nullopt);

} // namespace ared

#pragma once

#include "ared/controller.hpp"
#include "ared/domain.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ared::bench {

/// Constants of the two-peak Gaussian test curve.
struct BimodalGaussianParams {
    double a1 = 0.2;
    double a2 = 0.3;
    double m1 = 0.3126;
    double m2 = 0.6758;
    double sig1 = 0.1;
    double sig2 = 0.2;
    double baseline = 0.0002;
    std::size_t scatter_count = 10000;

    double c1() const noexcept;
    double c2() const noexcept;
    double k1() const noexcept { return 2.0 * sig1 * sig1; }
    double k2() const noexcept { return 2.0 * sig2 * sig2; }
};

/// K + c1 exp(-(x-M1)^2/k1) + c2 exp(-(x-M2)^2/k2), c = A*SIG/sqrt(2 pi).
double bimodal_gaussian(double x, const BimodalGaussianParams& params = {});

/// 50 y exp(-x^2 - y^2).
double bimodal_surface(double x, double y);

/// The classic peaks surface.
double peaks(double x, double y);

enum class FunctionId { gauss2d, surface3d, peaks };

std::string_view to_string(FunctionId id) noexcept;
FunctionId function_from_string(std::string_view s);

Domain function_domain(FunctionId id);
Oracle function_oracle(FunctionId id);

enum class DesignKind { sfe_equidistant, factorial };

struct DesignSpec {
    DesignKind kind = DesignKind::sfe_equidistant;
    /// sfe: number of points; factorial: levels per axis (one entry per iv).
    std::vector<std::size_t> counts;
};

/// Evenly spaced designs including the range endpoints.
std::vector<std::vector<double>> design_cases(const DesignSpec& spec, const Domain& domain);

/// Smallest admissible baseline for a session that used `case_count` samples:
/// the same count for one iv; otherwise the smallest k x k, k x (k+1) or
/// (k+1) x k grid with at least that many points.
DesignSpec matched_design(const Domain& domain, std::size_t case_count);

struct VerificationPoint {
    std::vector<double> coords;
    double value = 0.0;
};

/// 50 evenly spaced points for the curve, an 11 x 11 grid for the surfaces.
std::vector<VerificationPoint> verification_set(FunctionId id);

struct Evaluation {
    double mae = 0.0;
    std::optional<double> mape; // omitted for the surfaces
    double r = 0.0;
};

Evaluation evaluate(const SvrModel& model, std::span<const VerificationPoint> points, bool with_mape);

struct ComparisonRow {
    std::size_t trial = 0;
    std::size_t case_count = 0;
    std::string source; // "ARED-k", "SFE-k" or "FE-k"
    double mae = 0.0;
    std::optional<double> mape;
    double r = 0.0;
};

struct TrialDetail {
    std::size_t case_count = 0;
    std::size_t feedback_count = 0;
    bool converged = false;
    std::uint64_t seed = 0;
    Evaluation ared;
    Evaluation baseline;
    std::size_t baseline_count = 0;
};

struct ComparisonTable {
    FunctionId function = FunctionId::gauss2d;
    std::vector<ComparisonRow> rows;
    std::vector<TrialDetail> trials;
};

/// Session configuration used for the benchmark runs.
SessionConfig benchmark_config(FunctionId id, std::uint64_t seed);

/// Seed of trial k (1-based) derived from the table seed.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

/// Runs `trials` autonomous sessions, fits the same SVR pipeline on a matched
/// baseline design, and scores both on the verification set.
ComparisonTable run_comparison(FunctionId id, std::size_t trials, std::uint64_t seed,
                               const std::optional<SvrConfig>& svr_override = std::nullopt);

/// Single trial of run_comparison.
TrialDetail run_trial(FunctionId id, std::uint64_t trial_seed_value, const SvrConfig& svr);

} // namespace ared::bench

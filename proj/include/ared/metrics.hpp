#pragma once

#include "ared/domain.hpp"
#include "ared/sampler.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ared {

struct CaseError {
    std::size_t sample_index = 0;
    double predicted = 0.0;
    double actual = 0.0;
    /// Absent when the actual value is exactly zero.
    std::optional<double> ape;
    double abs_error = 0.0;
};

enum class ErrorReference { training_archive, verification_set };

std::string_view to_string(ErrorReference r) noexcept;

struct PearsonResult {
    double value = 0.0;
    /// Set when either series has zero variance; value is then 1 if the
    /// series are identical and 0 otherwise.
    bool degenerate = false;
};

struct ErrorReport {
    std::vector<CaseError> per_case;
    double mae = 0.0;
    /// Mean over cases whose actual value is nonzero; 0 when none are.
    double mape = 0.0;
    std::size_t mape_cases = 0;
    PearsonResult r;
    ErrorReference reference = ErrorReference::training_archive;
};

/// Population-moment Pearson correlation. Throws LengthMismatch for unequal or
/// shorter-than-2 series.
PearsonResult pearson_r(std::span<const double> x, std::span<const double> y);

/// Per-case APE/AbsE plus MAE, MAPE and R of predicted against actual.
/// sample_indices may be empty (then 0..n-1). Throws EmptyArchive / LengthMismatch.
ErrorReport error_report(std::span<const double> predicted, std::span<const double> actual,
                         std::span<const std::size_t> sample_indices = {},
                         ErrorReference reference = ErrorReference::training_archive);

class SvrModel;

/// Errors of the model at every measured archive sample.
ErrorReport case_errors(const SvrModel& model, std::span<const Sample> archive);

struct FeedbackPolicy {
    /// n in the eligibility rule "more than n^2 + 1 cases" and the default run length n + 1.
    std::size_t dimension_n = 2;
    double ape_threshold = 10.0; // percent
    double range_fraction = 0.10;
    /// Lets cases with an exact-zero actual trigger on AbsE alone.
    bool zero_actual_abs_trigger = false;
};

void validate(const FeedbackPolicy& policy);

/// Size the archive must exceed before feedback or stopping is considered.
std::size_t eligibility_count(const FeedbackPolicy& policy) noexcept;

/// Case with the largest APE among those whose APE exceeds the threshold and
/// whose AbsE exceeds range_fraction * dv_range, provided the archive holds
/// more than n^2 + 1 cases. Ties: larger AbsE, then lower sample index.
std::optional<FeedbackCenter> feedback_check(const ErrorReport& report,
                                             std::span<const Sample> archive,
                                             const FeedbackPolicy& policy, double dv_range);

/// max - min of the measured values.
double observed_range(std::span<const Sample> archive);

enum class IterationOutcome { ineligible, pass, fail };

/// True iff the last run_length entries all pass.
bool stopping_check(std::span<const IterationOutcome> history, std::size_t run_length);

} // namespace ared

#pragma once

#include "ared/domain.hpp"
#include "ared/metrics.hpp"
#include "ared/random.hpp"
#include "ared/sampler.hpp"
#include "ared/svr.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ared {

/// Which predictions the per-iteration error analysis compares with the measurements.
enum class ErrorSource {
    /// The refitted model evaluated at its own training points.
    in_sample,
    /// Out-of-fold predictions of the selected (C, gamma) from the grid search.
    cross_validated,
};

std::string_view to_string(ErrorSource s) noexcept;
ErrorSource error_source_from_string(std::string_view s);

struct SessionConfig {
    Domain domain;
    ConstraintParams draw_params{0.7, 10.0};
    ConstraintParams feedback_params{1.5, 15.0};
    FeedbackPolicy feedback_policy;
    SvrConfig svr_config;
    /// Consecutive passing iterations required to stop; 0 means n + 1.
    std::size_t stopping_run_length = 0;
    std::uint64_t rng_seed = 0;
    std::size_t max_draw_attempts = 10000;
    /// Hard cap on the archive size.
    std::size_t case_budget = 200;
    /// Replaces sqrt(n) as L in the distance constraint.
    std::optional<double> diagonal_override;
    ErrorSource error_source = ErrorSource::cross_validated;

    std::size_t run_length() const noexcept {
        return stopping_run_length > 0 ? stopping_run_length : feedback_policy.dimension_n + 1;
    }
};

void validate(const SessionConfig& config);

/// Defaults keyed on the number of independent variables: (0.7, 10) / (1.5, 15)
/// for one, (0.4, 5) / (0.5, 7) for two or more, n = ivs + 1. Domains with
/// three or more ivs have no tuned values; a warning is appended.
SessionConfig default_session_config(const Domain& domain, std::uint64_t seed,
                                     std::vector<std::string>* warnings = nullptr);

enum class SessionStatus { ready_to_propose, awaiting_measurement, converged, failed };

std::string_view to_string(SessionStatus s) noexcept;
SessionStatus session_status_from_string(std::string_view s);

struct Proposal {
    Sample sample;
    std::optional<double> predicted;
    double distance = 0.0;
    double threshold = 0.0;
    std::size_t attempts = 0;
    /// Set when the draw was concentrated around a feedback case.
    std::optional<FeedbackCenter> center;
};

struct IterationRecord {
    std::size_t archive_size = 0;
    double measured = 0.0;
    ErrorReport report;
    IterationOutcome outcome = IterationOutcome::ineligible;
    std::optional<FeedbackCenter> feedback;
    SvrHyperparams hp;
    double cv_mae = 0.0;
    std::uint64_t fingerprint = 0;
};

/// One adaptive design session: propose, measure, refit, analyse, repeat.
///
/// propose_next() and record_result() must alternate. A feedback decision made
/// while recording affects only the following proposal.
class Session {
public:
    /// Initial samples must cover every corner of the domain and carry values.
    /// Throws MissingEndpoints, UnmeasuredInitialSample, InvalidConfig.
    static Session start(SessionConfig config, std::vector<Sample> initial);

    /// Throws WrongState unless ready_to_propose, DrawExhausted.
    const Proposal& propose_next();

    /// Throws WrongState unless a proposal is pending, NonFiniteValue.
    /// recorded_unix_ms stamps the sample; the current time when absent.
    const IterationRecord& record_result(double value,
                                         std::optional<std::int64_t> recorded_unix_ms = std::nullopt);

    const SessionConfig& config() const noexcept { return config_; }
    const std::vector<Sample>& archive() const noexcept { return archive_; }
    std::size_t selected_count() const noexcept { return v_; }
    const std::optional<SvrModel>& model() const noexcept { return model_; }
    const std::vector<IterationRecord>& history() const noexcept { return history_; }
    const std::optional<Proposal>& pending() const noexcept { return pending_; }
    const std::optional<FeedbackCenter>& active_feedback() const noexcept { return active_center_; }
    std::size_t consecutive_passes() const noexcept { return consecutive_passes_; }
    SessionStatus status() const noexcept { return status_; }
    const Rng& rng() const noexcept { return rng_; }
    const std::string& failure_reason() const noexcept { return failure_; }

    /// Marks the session failed (e.g. a draw could not be placed).
    void mark_failed(std::string reason);

    /// Rebuilds a session from persisted parts without re-running anything.
    struct Parts {
        SessionConfig config;
        std::vector<Sample> archive;
        std::size_t v = 0;
        std::optional<SvrModel> model;
        std::vector<IterationRecord> history;
        std::optional<Proposal> pending;
        std::optional<FeedbackCenter> active_center;
        std::size_t consecutive_passes = 0;
        SessionStatus status = SessionStatus::ready_to_propose;
        std::string rng_state;
        std::string failure;
    };
    static Session restore(Parts parts);

private:
    Session() = default;

    SessionConfig config_;
    std::vector<Sample> archive_;
    std::size_t v_ = 0;
    std::optional<SvrModel> model_;
    std::vector<IterationRecord> history_;
    std::optional<Proposal> pending_;
    std::optional<FeedbackCenter> active_center_;
    std::size_t consecutive_passes_ = 0;
    SessionStatus status_ = SessionStatus::ready_to_propose;
    Rng rng_;
    std::string failure_;
};

/// Per-iteration pass/fail sequence of a history.
std::vector<IterationOutcome> outcomes(std::span<const IterationRecord> history);

using Oracle = std::function<double(std::span<const double>)>;

struct SessionReport {
    Session session;
    bool converged = false;
    std::size_t initial_count = 0;
    std::size_t drawn_count = 0;
    std::size_t feedback_count = 0;
    std::string failure;

    std::size_t case_count() const noexcept { return initial_count + drawn_count + feedback_count; }
};

/// Alternates proposals and oracle evaluations until convergence, the case
/// budget or a draw failure; the last two are reported, not thrown.
SessionReport run_autonomous(SessionConfig config, std::vector<Sample> initial, const Oracle& oracle);

/// Final model plus everything needed to audit how it was obtained.
struct ModelArtifact {
    SvrModel model;
    SessionConfig config;
    std::vector<Sample> archive;
    std::vector<IterationRecord> history;
    std::uint64_t archive_digest = 0;
};

/// Throws NotConverged unless converged or forced, InsufficientData without a model.
ModelArtifact export_model(const Session& session, bool force = false);

/// All 2^n corners of the domain, first axis varying slowest.
std::vector<std::vector<double>> domain_corners(const Domain& domain);

/// Corner samples measured with the oracle, tagged initial.
std::vector<Sample> corner_samples(const Domain& domain, const Oracle& oracle);

} // namespace ared

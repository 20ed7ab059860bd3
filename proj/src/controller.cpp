#include "ared/controller.hpp"

#include "ared/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace ared {

std::string_view to_string(ErrorSource s) noexcept {
    return s == ErrorSource::in_sample ? "in_sample" : "cross_validated";
}

ErrorSource error_source_from_string(std::string_view s) {
    if (s == "in_sample") return ErrorSource::in_sample;
    if (s == "cross_validated") return ErrorSource::cross_validated;
    throw Error(Errc::InvalidConfig, "unknown error source '" + std::string(s) + "'");
}

std::string_view to_string(SessionStatus s) noexcept {
    switch (s) {
    case SessionStatus::ready_to_propose: return "ready_to_propose";
    case SessionStatus::awaiting_measurement: return "awaiting_measurement";
    case SessionStatus::converged: return "converged";
    case SessionStatus::failed: return "failed";
    }
    return "failed";
}

SessionStatus session_status_from_string(std::string_view s) {
    if (s == "ready_to_propose") return SessionStatus::ready_to_propose;
    if (s == "awaiting_measurement") return SessionStatus::awaiting_measurement;
    if (s == "converged") return SessionStatus::converged;
    if (s == "failed") return SessionStatus::failed;
    throw Error(Errc::CorruptDocument, "unknown session status '" + std::string(s) + "'");
}

void validate(const SessionConfig& config) {
    validate_domain(config.domain);
    validate(config.draw_params);
    validate(config.feedback_params);
    validate(config.feedback_policy);
    validate(config.svr_config);
    if (config.max_draw_attempts < 1) throw Error(Errc::InvalidConfig, "max_draw_attempts < 1");
    if (config.case_budget < 2) throw Error(Errc::InvalidConfig, "case_budget < 2");
    if (config.diagonal_override && !(*config.diagonal_override > 0.0)) {
        throw Error(Errc::InvalidConfig, "diagonal override must be positive");
    }
}

SessionConfig default_session_config(const Domain& domain, std::uint64_t seed,
                                     std::vector<std::string>* warnings) {
    validate_domain(domain);
    SessionConfig cfg;
    cfg.domain = domain;
    cfg.rng_seed = seed;
    const std::size_t n = domain.dimension();
    if (n == 1) {
        cfg.draw_params = {0.7, 10.0};
        cfg.feedback_params = {1.5, 15.0};
    } else {
        cfg.draw_params = {0.4, 5.0};
        cfg.feedback_params = {0.5, 7.0};
        if (n >= 3 && warnings != nullptr) {
            warnings->push_back("no tuned constraint parameters for " + std::to_string(n) +
                                " independent variables; using the two-variable values, "
                                "set draw/feedback p and q explicitly");
        }
    }
    cfg.feedback_policy.dimension_n = n + 1;
    return cfg;
}

std::vector<std::vector<double>> domain_corners(const Domain& domain) {
    const std::size_t n = domain.dimension();
    std::vector<std::vector<double>> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<double> c(n);
        for (std::size_t i = 0; i < n; ++i) {
            const bool high = (mask >> (n - 1 - i)) & 1U;
            c[i] = high ? domain.ivs[i].high : domain.ivs[i].low;
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Sample> corner_samples(const Domain& domain, const Oracle& oracle) {
    std::vector<Sample> out;
    for (auto& c : domain_corners(domain)) {
        Sample s;
        s.value = oracle(c);
        s.coords = std::move(c);
        s.provenance = Provenance::initial;
        s.sequence_index = out.size();
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<IterationOutcome> outcomes(std::span<const IterationRecord> history) {
    std::vector<IterationOutcome> out;
    out.reserve(history.size());
    for (const auto& h : history) out.push_back(h.outcome);
    return out;
}

Session Session::start(SessionConfig config, std::vector<Sample> initial) {
    validate(config);
    const Domain& domain = config.domain;
    for (std::size_t i = 0; i < initial.size(); ++i) {
        auto& s = initial[i];
        if (s.coords.size() != domain.dimension() || !domain.contains(s.coords)) {
            throw Error(Errc::OutOfDomain, "initial sample " + std::to_string(i) + " outside domain");
        }
        if (!s.value) {
            throw Error(Errc::UnmeasuredInitialSample, "initial sample " + std::to_string(i) +
                                                           " has no measured value");
        }
        if (!std::isfinite(*s.value)) throw Error(Errc::NonFiniteValue, "initial value not finite");
        s.provenance = Provenance::initial;
        s.sequence_index = i;
    }
    for (const auto& corner : domain_corners(domain)) {
        const bool present = std::any_of(initial.begin(), initial.end(),
                                         [&](const Sample& s) { return s.coords == corner; });
        if (!present) {
            throw Error(Errc::MissingEndpoints, "initial samples must include every domain corner");
        }
    }

    Session session;
    session.rng_ = Rng(config.rng_seed);
    session.config_ = std::move(config);
    session.archive_ = std::move(initial);
    Fit fit = refit(nullptr, session.config_.domain, session.archive_, session.config_.svr_config,
                    session.rng_);
    session.model_ = std::move(fit.model);
    session.status_ = SessionStatus::ready_to_propose;
    return session;
}

Session Session::restore(Parts parts) {
    validate(parts.config);
    Session s;
    s.config_ = std::move(parts.config);
    s.archive_ = std::move(parts.archive);
    s.v_ = parts.v;
    s.model_ = std::move(parts.model);
    s.history_ = std::move(parts.history);
    s.pending_ = std::move(parts.pending);
    s.active_center_ = std::move(parts.active_center);
    s.consecutive_passes_ = parts.consecutive_passes;
    s.status_ = parts.status;
    s.rng_.set_state(parts.rng_state);
    s.failure_ = std::move(parts.failure);
    const auto selected = static_cast<std::size_t>(
        std::count_if(s.archive_.begin(), s.archive_.end(),
                      [](const Sample& x) { return x.provenance != Provenance::initial; }));
    if (selected + (s.pending_ ? 1 : 0) != s.v_ || s.pending_.has_value() != (s.status_ == SessionStatus::awaiting_measurement)) {
        throw Error(Errc::CorruptDocument, "session parts violate the state invariants");
    }
    return s;
}

void Session::mark_failed(std::string reason) {
    status_ = SessionStatus::failed;
    failure_ = std::move(reason);
}

const Proposal& Session::propose_next() {
    if (status_ != SessionStatus::ready_to_propose) {
        throw Error(Errc::WrongState, "cannot propose while " + std::string(to_string(status_)));
    }
    const Domain& domain = config_.domain;
    const bool feedback = active_center_.has_value();
    const NormalDrawSpec spec = feedback ? feedback_spec(domain, *active_center_) : exploratory_spec(domain);
    const ConstraintParams& params = feedback ? config_.feedback_params : config_.draw_params;
    // Only one proposal can be outstanding, so the archive already holds every
    // point the candidate must keep its distance from.
    ConstrainedDraw draw = draw_constrained(spec, archive_, v_, params, domain, rng_,
                                            config_.max_draw_attempts, config_.diagonal_override);
    std::optional<double> predicted;
    if (model_) predicted = model_->predict(draw.coords);
    Sample sample{std::move(draw.coords), std::nullopt,
                  feedback ? Provenance::feedback : Provenance::drawn, archive_.size(), 0};
    ++v_;
    pending_.emplace(Proposal{std::move(sample), predicted, draw.distance, draw.threshold,
                              draw.attempts, active_center_});
    status_ = SessionStatus::awaiting_measurement;
    return *pending_;
}

const IterationRecord& Session::record_result(double value, std::optional<std::int64_t> recorded_unix_ms) {
    if (status_ != SessionStatus::awaiting_measurement || !pending_) {
        throw Error(Errc::WrongState, "no proposal awaits a measurement");
    }
    if (!std::isfinite(value)) throw Error(Errc::NonFiniteValue, "measured value is not finite");

    Sample s = pending_->sample;
    s.value = value;
    s.recorded_unix_ms = recorded_unix_ms ? *recorded_unix_ms
                                          : std::chrono::duration_cast<std::chrono::milliseconds>(
                                                std::chrono::system_clock::now().time_since_epoch())
                                                .count();
    archive_.push_back(std::move(s));
    pending_.reset();

    Fit fit = refit(model_ ? &*model_ : nullptr, config_.domain, archive_, config_.svr_config, rng_);
    model_ = std::move(fit.model);

    IterationRecord rec;
    rec.archive_size = archive_.size();
    rec.measured = value;
    rec.hp = fit.search.hp;
    rec.cv_mae = fit.search.cv_mae;
    rec.fingerprint = model_->fingerprint();
    if (config_.error_source == ErrorSource::in_sample) {
        rec.report = case_errors(*model_, archive_);
    } else {
        std::vector<double> actual;
        for (const auto& a : archive_) actual.push_back(*a.value);
        rec.report = error_report(fit.search.out_of_fold, actual);
    }
    const auto& policy = config_.feedback_policy;
    rec.feedback = feedback_check(rec.report, archive_, policy, observed_range(archive_));
    if (archive_.size() <= eligibility_count(policy)) {
        rec.outcome = IterationOutcome::ineligible;
    } else {
        rec.outcome = rec.feedback ? IterationOutcome::fail : IterationOutcome::pass;
    }
    consecutive_passes_ = rec.outcome == IterationOutcome::pass ? consecutive_passes_ + 1 : 0;
    active_center_ = rec.feedback;
    history_.push_back(std::move(rec));

    const auto seq = outcomes(history_);
    if (stopping_check(seq, config_.run_length())) {
        status_ = SessionStatus::converged;
    } else if (archive_.size() >= config_.case_budget) {
        mark_failed("case budget of " + std::to_string(config_.case_budget) + " reached");
    } else {
        status_ = SessionStatus::ready_to_propose;
    }
    return history_.back();
}

SessionReport run_autonomous(SessionConfig config, std::vector<Sample> initial, const Oracle& oracle) {
    SessionReport report{Session::start(std::move(config), std::move(initial)), false, 0, 0, 0, {}};
    Session& s = report.session;
    while (s.status() == SessionStatus::ready_to_propose) {
        try {
            const Proposal& p = s.propose_next();
            const double y = oracle(p.sample.coords);
            s.record_result(y);
        } catch (const Error& e) {
            if (e.code() != Errc::DrawExhausted) throw;
            s.mark_failed(e.what());
        }
    }
    report.converged = s.status() == SessionStatus::converged;
    report.failure = s.failure_reason();
    for (const auto& a : s.archive()) {
        switch (a.provenance) {
        case Provenance::initial: ++report.initial_count; break;
        case Provenance::drawn: ++report.drawn_count; break;
        case Provenance::feedback: ++report.feedback_count; break;
        }
    }
    return report;
}

ModelArtifact export_model(const Session& session, bool force) {
    if (session.status() != SessionStatus::converged && !force) {
        throw Error(Errc::NotConverged, "session has not met the stopping rule");
    }
    if (!session.model()) throw Error(Errc::InsufficientData, "session has no trained model");
    return ModelArtifact{*session.model(), session.config(), session.archive(), session.history(),
                         training_fingerprint(session.archive())};
}

} // namespace ared

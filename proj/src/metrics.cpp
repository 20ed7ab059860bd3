#include "ared/metrics.hpp"

#include "ared/error.hpp"
#include "ared/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ared {

std::string_view to_string(ErrorReference r) noexcept {
    return r == ErrorReference::verification_set ? "verification_set" : "training_archive";
}

PearsonResult pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw Error(Errc::LengthMismatch, "correlation needs two series of equal length >= 2");
    }
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double cov = 0.0, vx = 0.0, vy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
    }
    if (vx == 0.0 || vy == 0.0) {
        const bool same = std::equal(x.begin(), x.end(), y.begin());
        return PearsonResult{same ? 1.0 : 0.0, true};
    }
    const double r = (cov / n) / (std::sqrt(vx / n) * std::sqrt(vy / n));
    return PearsonResult{std::clamp(r, -1.0, 1.0), false};
}

ErrorReport error_report(std::span<const double> predicted, std::span<const double> actual,
                         std::span<const std::size_t> sample_indices, ErrorReference reference) {
    if (predicted.empty()) throw Error(Errc::EmptyArchive, "no cases to evaluate");
    if (predicted.size() != actual.size() ||
        (!sample_indices.empty() && sample_indices.size() != actual.size())) {
        throw Error(Errc::LengthMismatch, "predicted and actual series differ in length");
    }
    ErrorReport rep;
    rep.reference = reference;
    double abs_sum = 0.0;
    double ape_sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        CaseError c;
        c.sample_index = sample_indices.empty() ? i : sample_indices[i];
        c.predicted = predicted[i];
        c.actual = actual[i];
        c.abs_error = std::abs(predicted[i] - actual[i]);
        if (actual[i] != 0.0) {
            c.ape = std::abs((predicted[i] - actual[i]) / actual[i]) * 100.0;
            ape_sum += *c.ape;
            ++rep.mape_cases;
        }
        abs_sum += c.abs_error;
        rep.per_case.push_back(c);
    }
    rep.mae = abs_sum / static_cast<double>(actual.size());
    rep.mape = rep.mape_cases > 0 ? ape_sum / static_cast<double>(rep.mape_cases) : 0.0;
    if (actual.size() >= 2) {
        rep.r = pearson_r(predicted, actual);
    } else {
        rep.r = PearsonResult{1.0, true};
    }
    return rep;
}

ErrorReport case_errors(const SvrModel& model, std::span<const Sample> archive) {
    if (archive.empty()) throw Error(Errc::EmptyArchive, "no archived samples");
    std::vector<double> pred, act;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < archive.size(); ++i) {
        if (!archive[i].value) continue;
        pred.push_back(model.predict(archive[i].coords));
        act.push_back(*archive[i].value);
        idx.push_back(i);
    }
    if (pred.empty()) throw Error(Errc::EmptyArchive, "no measured samples");
    return error_report(pred, act, idx);
}

void validate(const FeedbackPolicy& policy) {
    if (!(policy.ape_threshold > 0.0) || !(policy.range_fraction > 0.0) ||
        !(policy.range_fraction < 1.0) || policy.dimension_n < 1) {
        throw Error(Errc::InvalidConfig, "feedback policy needs E_ape > 0, 0 < r < 1, n >= 1");
    }
}

std::size_t eligibility_count(const FeedbackPolicy& policy) noexcept {
    return policy.dimension_n * policy.dimension_n + 1;
}

double observed_range(std::span<const Sample> archive) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : archive) {
        if (!s.value) continue;
        lo = std::min(lo, *s.value);
        hi = std::max(hi, *s.value);
    }
    return hi >= lo ? hi - lo : 0.0;
}

std::optional<FeedbackCenter> feedback_check(const ErrorReport& report,
                                             std::span<const Sample> archive,
                                             const FeedbackPolicy& policy, double dv_range) {
    if (archive.size() <= eligibility_count(policy)) return std::nullopt;
    const double abs_bound = policy.range_fraction * dv_range;
    const CaseError* best = nullptr;
    auto key_ape = [](const CaseError& c) {
        return c.ape ? *c.ape : -1.0; // zero-actual cases rank last
    };
    for (const auto& c : report.per_case) {
        const bool ape_ok = c.ape ? *c.ape > policy.ape_threshold : policy.zero_actual_abs_trigger;
        if (!ape_ok || !(c.abs_error > abs_bound)) continue;
        if (best == nullptr) {
            best = &c;
            continue;
        }
        const double a = key_ape(c), b = key_ape(*best);
        if (a > b || (a == b && (c.abs_error > best->abs_error ||
                                 (c.abs_error == best->abs_error &&
                                  c.sample_index < best->sample_index)))) {
            best = &c;
        }
    }
    if (best == nullptr) return std::nullopt;
    if (best->sample_index >= archive.size()) {
        throw Error(Errc::LengthMismatch, "error report refers to a sample outside the archive");
    }
    return FeedbackCenter{archive[best->sample_index].coords, best->ape.value_or(0.0),
                          best->sample_index};
}

bool stopping_check(std::span<const IterationOutcome> history, std::size_t run_length) {
    if (run_length == 0 || history.size() < run_length) return false;
    return std::all_of(history.end() - static_cast<std::ptrdiff_t>(run_length), history.end(),
                       [](IterationOutcome o) { return o == IterationOutcome::pass; });
}

} // namespace ared

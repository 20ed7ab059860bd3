#include "ared/io/json_codec.hpp"

#include "ared/error.hpp"

#include <charconv>
#include <cstdio>

namespace ared {

std::string to_hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t from_hex(const std::string& s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw Error(Errc::CorruptDocument, "bad hex value '" + s + "'");
    return v;
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

template <class T>
void get_opt(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end() && !it->is_null())
        out = it->get<T>();
}

template <class T>
json opt_to_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> opt_from_json(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null())
        return std::nullopt;
    return it->get<T>();
}

} // namespace

void to_json(json& j, const VariableRange& v) {
    j = json{{"name", v.name}, {"low", v.low}, {"high", v.high}};
}

void from_json(const json& j, VariableRange& v) {
    j.at("name").get_to(v.name);
    j.at("low").get_to(v.low);
    j.at("high").get_to(v.high);
}

void to_json(json& j, const Domain& d) {
    j = json{{"ivs", d.ivs}, {"dv_name", d.dv_name}};
}

void from_json(const json& j, Domain& d) {
    j.at("ivs").get_to(d.ivs);
    get_opt(j, "dv_name", d.dv_name);
}

void to_json(json& j, const Sample& s) {
    j = json{{"coords", s.coords},
             {"value", opt_to_json(s.value)},
             {"provenance", std::string(to_string(s.provenance))},
             {"sequence_index", s.sequence_index},
             {"recorded_unix_ms", s.recorded_unix_ms}};
}

void from_json(const json& j, Sample& s) {
    j.at("coords").get_to(s.coords);
    s.value = opt_from_json<double>(j, "value");
    s.provenance = Provenance::initial;
    if (auto it = j.find("provenance"); it != j.end())
        s.provenance = provenance_from_string(it->get<std::string>());
    get_opt(j, "sequence_index", s.sequence_index);
    get_opt(j, "recorded_unix_ms", s.recorded_unix_ms);
}

void to_json(json& j, const ConstraintParams& p) {
    j = json{{"p", p.p}, {"q", p.q}};
}

void from_json(const json& j, ConstraintParams& p) {
    j.at("p").get_to(p.p);
    j.at("q").get_to(p.q);
}

void to_json(json& j, const FeedbackPolicy& p) {
    j = json{{"dimension_n", p.dimension_n},
             {"ape_threshold", p.ape_threshold},
             {"range_fraction", p.range_fraction},
             {"zero_actual_abs_trigger", p.zero_actual_abs_trigger}};
}

void from_json(const json& j, FeedbackPolicy& p) {
    get_opt(j, "dimension_n", p.dimension_n);
    get_opt(j, "ape_threshold", p.ape_threshold);
    get_opt(j, "range_fraction", p.range_fraction);
    get_opt(j, "zero_actual_abs_trigger", p.zero_actual_abs_trigger);
}

void to_json(json& j, const SvrConfig& c) {
    j = json{{"grid_log10_min", c.grid_log10_min},
             {"grid_log10_max", c.grid_log10_max},
             {"grid_log10_step", c.grid_log10_step},
             {"cv_folds", c.cv_folds},
             {"epsilon_fraction", c.epsilon_fraction},
             {"solver_tolerance", c.solver_tolerance},
             {"max_solver_iterations", c.max_solver_iterations},
             {"coarse_to_fine", c.coarse_to_fine},
             {"threads", c.threads}};
}

void from_json(const json& j, SvrConfig& c) {
    get_opt(j, "grid_log10_min", c.grid_log10_min);
    get_opt(j, "grid_log10_max", c.grid_log10_max);
    get_opt(j, "grid_log10_step", c.grid_log10_step);
    get_opt(j, "cv_folds", c.cv_folds);
    get_opt(j, "epsilon_fraction", c.epsilon_fraction);
    get_opt(j, "solver_tolerance", c.solver_tolerance);
    get_opt(j, "max_solver_iterations", c.max_solver_iterations);
    get_opt(j, "coarse_to_fine", c.coarse_to_fine);
    get_opt(j, "threads", c.threads);
}

void to_json(json& j, const SvrHyperparams& h) {
    j = json{{"C", h.C}, {"gamma", h.gamma}, {"epsilon", h.epsilon}};
}

void from_json(const json& j, SvrHyperparams& h) {
    j.at("C").get_to(h.C);
    j.at("gamma").get_to(h.gamma);
    j.at("epsilon").get_to(h.epsilon);
}

void to_json(json& j, const FeedbackCenter& c) {
    j = json{{"coords", c.coords}, {"triggering_ape", c.triggering_ape}, {"sample_index", c.sample_index}};
}

void from_json(const json& j, FeedbackCenter& c) {
    j.at("coords").get_to(c.coords);
    j.at("triggering_ape").get_to(c.triggering_ape);
    j.at("sample_index").get_to(c.sample_index);
}

void to_json(json& j, const CaseError& c) {
    j = json{{"sample_index", c.sample_index},
             {"predicted", c.predicted},
             {"actual", c.actual},
             {"ape", opt_to_json(c.ape)},
             {"abs_error", c.abs_error}};
}

void from_json(const json& j, CaseError& c) {
    j.at("sample_index").get_to(c.sample_index);
    j.at("predicted").get_to(c.predicted);
    j.at("actual").get_to(c.actual);
    c.ape = opt_from_json<double>(j, "ape");
    j.at("abs_error").get_to(c.abs_error);
}

void to_json(json& j, const ErrorReport& r) {
    j = json{{"per_case", r.per_case},
             {"mae", r.mae},
             {"mape", r.mape},
             {"mape_cases", r.mape_cases},
             {"r", r.r.value},
             {"r_degenerate", r.r.degenerate},
             {"reference", std::string(to_string(r.reference))}};
}

void from_json(const json& j, ErrorReport& r) {
    j.at("per_case").get_to(r.per_case);
    j.at("mae").get_to(r.mae);
    j.at("mape").get_to(r.mape);
    j.at("mape_cases").get_to(r.mape_cases);
    j.at("r").get_to(r.r.value);
    j.at("r_degenerate").get_to(r.r.degenerate);
    auto ref = j.at("reference").get<std::string>();
    if (ref == to_string(ErrorReference::training_archive))
        r.reference = ErrorReference::training_archive;
    else if (ref == to_string(ErrorReference::verification_set))
        r.reference = ErrorReference::verification_set;
    else
        throw Error(Errc::CorruptDocument, "unknown error reference '" + ref + "'");
}

std::string to_string(IterationOutcome o) {
    switch (o) {
    case IterationOutcome::ineligible: return "ineligible";
    case IterationOutcome::pass: return "pass";
    case IterationOutcome::fail: return "fail";
    }
    return "ineligible";
}

IterationOutcome iteration_outcome_from_string(const std::string& s) {
    if (s == "ineligible") return IterationOutcome::ineligible;
    if (s == "pass") return IterationOutcome::pass;
    if (s == "fail") return IterationOutcome::fail;
    throw Error(Errc::CorruptDocument, "unknown iteration outcome '" + s + "'");
}

void to_json(json& j, const IterationRecord& r) {
    j = json{{"archive_size", r.archive_size},
             {"measured", r.measured},
             {"report", r.report},
             {"outcome", to_string(r.outcome)},
             {"feedback", opt_to_json(r.feedback)},
             {"hp", r.hp},
             {"cv_mae", r.cv_mae},
             {"fingerprint", to_hex(r.fingerprint)}};
}

void from_json(const json& j, IterationRecord& r) {
    j.at("archive_size").get_to(r.archive_size);
    j.at("measured").get_to(r.measured);
    j.at("report").get_to(r.report);
    r.outcome = iteration_outcome_from_string(j.at("outcome").get<std::string>());
    r.feedback = opt_from_json<FeedbackCenter>(j, "feedback");
    j.at("hp").get_to(r.hp);
    j.at("cv_mae").get_to(r.cv_mae);
    r.fingerprint = from_hex(j.at("fingerprint").get<std::string>());
}

void to_json(json& j, const Proposal& p) {
    j = json{{"sample", p.sample},
             {"predicted", opt_to_json(p.predicted)},
             {"distance", p.distance},
             {"threshold", p.threshold},
             {"attempts", p.attempts},
             {"center", opt_to_json(p.center)}};
}

void from_json(const json& j, Proposal& p) {
    j.at("sample").get_to(p.sample);
    p.predicted = opt_from_json<double>(j, "predicted");
    j.at("distance").get_to(p.distance);
    j.at("threshold").get_to(p.threshold);
    j.at("attempts").get_to(p.attempts);
    p.center = opt_from_json<FeedbackCenter>(j, "center");
}

void to_json(json& j, const SessionConfig& c) {
    j = json{{"domain", c.domain},
             {"draw_params", c.draw_params},
             {"feedback_params", c.feedback_params},
             {"feedback_policy", c.feedback_policy},
             {"svr", c.svr_config},
             {"stopping_run_length", c.stopping_run_length},
             {"rng_seed", c.rng_seed},
             {"max_draw_attempts", c.max_draw_attempts},
             {"case_budget", c.case_budget},
             {"diagonal_override", opt_to_json(c.diagonal_override)},
             {"error_source", std::string(to_string(c.error_source))}};
}

void from_json(const json& j, SessionConfig& c) {
    Domain domain = j.at("domain").get<Domain>();
    std::uint64_t seed = 0;
    get_opt(j, "rng_seed", seed);
    c = default_session_config(domain, seed);
    get_opt(j, "draw_params", c.draw_params);
    get_opt(j, "feedback_params", c.feedback_params);
    if (auto it = j.find("feedback_policy"); it != j.end())
        from_json(*it, c.feedback_policy);
    if (auto it = j.find("svr"); it != j.end())
        from_json(*it, c.svr_config);
    get_opt(j, "stopping_run_length", c.stopping_run_length);
    get_opt(j, "max_draw_attempts", c.max_draw_attempts);
    get_opt(j, "case_budget", c.case_budget);
    c.diagonal_override = opt_from_json<double>(j, "diagonal_override");
    if (auto it = j.find("error_source"); it != j.end())
        c.error_source = error_source_from_string(it->get<std::string>());
}

void to_json(json& j, const SvrModel& m) {
    j = json{{"domain", m.domain()},
             {"scaling", {{"mean", m.scaling().mean}, {"scale", m.scaling().scale}}},
             {"hyperparams", m.hyperparams()},
             {"support_unit", m.support_unit()},
             {"coefficients", m.coefficients()},
             {"bias", m.bias()},
             {"fingerprint", to_hex(m.fingerprint())},
             {"training_size", m.training_size()}};
}

void from_json(const json& j, SvrModel& m) {
    DvScaling scaling;
    j.at("scaling").at("mean").get_to(scaling.mean);
    j.at("scaling").at("scale").get_to(scaling.scale);
    m = SvrModel(j.at("domain").get<Domain>(), scaling, j.at("hyperparams").get<SvrHyperparams>(),
                 j.at("support_unit").get<std::vector<double>>(),
                 j.at("coefficients").get<std::vector<double>>(), j.at("bias").get<double>(),
                 from_hex(j.at("fingerprint").get<std::string>()),
                 j.at("training_size").get<std::size_t>());
}

} // namespace ared

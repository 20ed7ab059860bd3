#pragma once

// JSON encodings of the engine's value types. Doubles are written in the
// shortest form that reads back to the identical bit pattern, which is what
// makes saved sessions replay bit-for-bit.

#include "ared/controller.hpp"
#include "ared/domain.hpp"
#include "ared/metrics.hpp"
#include "ared/sampler.hpp"
#include "ared/svr.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace ared {

using json = nlohmann::json;

std::string to_hex(std::uint64_t v);
std::uint64_t from_hex(const std::string& s);
/// FNV-1a 64 over the bytes of a string.
std::uint64_t fnv1a(std::string_view bytes);

void to_json(json& j, const VariableRange& v);
void from_json(const json& j, VariableRange& v);
void to_json(json& j, const Domain& d);
void from_json(const json& j, Domain& d);
void to_json(json& j, const Sample& s);
void from_json(const json& j, Sample& s);
void to_json(json& j, const ConstraintParams& p);
void from_json(const json& j, ConstraintParams& p);
void to_json(json& j, const FeedbackPolicy& p);
void from_json(const json& j, FeedbackPolicy& p);
void to_json(json& j, const SvrConfig& c);
void from_json(const json& j, SvrConfig& c);
void to_json(json& j, const SvrHyperparams& h);
void from_json(const json& j, SvrHyperparams& h);
void to_json(json& j, const FeedbackCenter& c);
void from_json(const json& j, FeedbackCenter& c);
void to_json(json& j, const CaseError& c);
void from_json(const json& j, CaseError& c);
void to_json(json& j, const ErrorReport& r);
void from_json(const json& j, ErrorReport& r);
void to_json(json& j, const IterationRecord& r);
void from_json(const json& j, IterationRecord& r);
void to_json(json& j, const Proposal& p);
void from_json(const json& j, Proposal& p);
void to_json(json& j, const SessionConfig& c);
/// Missing keys keep the defaults of default_session_config(domain).
void from_json(const json& j, SessionConfig& c);
void to_json(json& j, const SvrModel& m);
void from_json(const json& j, SvrModel& m);

std::string to_string(IterationOutcome o);
IterationOutcome iteration_outcome_from_string(const std::string& s);

} // namespace ared

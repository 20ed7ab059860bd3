#pragma once

#include "ared/controller.hpp"
#include "ared/io/json_codec.hpp"

#include <filesystem>
#include <string>

namespace ared {

inline constexpr const char* session_schema = "ared-session/1";
inline constexpr const char* model_schema = "ared-model/1";

/// Complete session state: config, archive, counters, model, history, pending
/// proposal, feedback center, status and RNG state. A document carries an
/// FNV-1a digest of its body and is rejected on mismatch.
json session_to_json(const Session& session);
/// Throws SchemaMismatch, CorruptDocument.
Session session_from_json(const json& doc);

json model_to_json(const ModelArtifact& artifact);
ModelArtifact model_from_json(const json& doc);

/// Writes through a temporary file and renames, so readers never see a partial
/// document. Throws IoFailure.
void save_session(const Session& session, const std::filesystem::path& path);
/// Throws IoFailure, SchemaMismatch, CorruptDocument.
Session load_session(const std::filesystem::path& path);

void save_model(const ModelArtifact& artifact, const std::filesystem::path& path);
ModelArtifact load_model(const std::filesystem::path& path);

/// Atomic text write used by the savers.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

} // namespace ared

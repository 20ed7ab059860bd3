#include "ared/io/documents.hpp"

#include "ared/error.hpp"

#include <fstream>
#include <sstream>

namespace ared {

namespace {

std::string body_digest(const json& body) {
    return to_hex(fnv1a(body.dump()));
}

json wrap(const char* schema, json body) {
    json doc;
    doc["schema"] = schema;
    doc["digest"] = body_digest(body);
    doc["body"] = std::move(body);
    return doc;
}

const json& unwrap(const json& doc, const char* schema) {
    if (!doc.is_object() || !doc.contains("schema"))
        throw Error(Errc::CorruptDocument, "document has no schema tag");
    const auto& tag = doc.at("schema");
    if (!tag.is_string() || tag.get<std::string>() != schema)
        throw Error(Errc::SchemaMismatch,
                    "expected schema " + std::string(schema) + ", found " + tag.dump());
    if (!doc.contains("body") || !doc.contains("digest"))
        throw Error(Errc::CorruptDocument, "document is missing its body or digest");
    const json& body = doc.at("body");
    if (doc.at("digest") != body_digest(body))
        throw Error(Errc::CorruptDocument, "document digest does not match its body");
    return body;
}

// Wraps nlohmann and engine exceptions raised by a decoder as CorruptDocument.
template <class F>
auto decode(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == Errc::SchemaMismatch || e.code() == Errc::CorruptDocument) throw;
        throw Error(Errc::CorruptDocument, std::string("invalid document: ") + e.what());
    } catch (const json::exception& e) {
        throw Error(Errc::CorruptDocument, std::string("invalid document: ") + e.what());
    }
}

json parse(const std::string& text) {
    if (text.empty()) throw Error(Errc::CorruptDocument, "document is empty");
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(Errc::CorruptDocument, std::string("malformed JSON: ") + e.what());
    }
}

} // namespace

json session_to_json(const Session& session) {
    json body;
    body["config"] = session.config();
    body["archive"] = session.archive();
    body["v"] = session.selected_count();
    body["model"] = session.model() ? json(*session.model()) : json(nullptr);
    body["history"] = session.history();
    body["pending"] = session.pending() ? json(*session.pending()) : json(nullptr);
    body["active_feedback"] =
        session.active_feedback() ? json(*session.active_feedback()) : json(nullptr);
    body["consecutive_passes"] = session.consecutive_passes();
    body["status"] = std::string(to_string(session.status()));
    body["failure"] = session.failure_reason();
    body["rng"] = {{"seed", session.config().rng_seed}, {"state", session.rng().state()}};
    return wrap(session_schema, std::move(body));
}

Session session_from_json(const json& doc) {
    const json& body = unwrap(doc, session_schema);
    return decode([&] {
        Session::Parts parts;
        parts.config = body.at("config").get<SessionConfig>();
        parts.archive = body.at("archive").get<std::vector<Sample>>();
        parts.v = body.at("v").get<std::size_t>();
        if (!body.at("model").is_null()) parts.model = body.at("model").get<SvrModel>();
        parts.history = body.at("history").get<std::vector<IterationRecord>>();
        if (!body.at("pending").is_null()) parts.pending = body.at("pending").get<Proposal>();
        if (!body.at("active_feedback").is_null())
            parts.active_center = body.at("active_feedback").get<FeedbackCenter>();
        parts.consecutive_passes = body.at("consecutive_passes").get<std::size_t>();
        parts.status = session_status_from_string(body.at("status").get<std::string>());
        parts.failure = body.at("failure").get<std::string>();
        parts.rng_state = body.at("rng").at("state").get<std::string>();
        return Session::restore(std::move(parts));
    });
}

json model_to_json(const ModelArtifact& a) {
    json body;
    body["model"] = a.model;
    body["config"] = a.config;
    body["archive"] = a.archive;
    body["history"] = a.history;
    body["archive_digest"] = to_hex(a.archive_digest);
    return wrap(model_schema, std::move(body));
}

ModelArtifact model_from_json(const json& doc) {
    const json& body = unwrap(doc, model_schema);
    return decode([&] {
        ModelArtifact a{body.at("model").get<SvrModel>(), body.at("config").get<SessionConfig>(),
                        body.at("archive").get<std::vector<Sample>>(),
                        body.at("history").get<std::vector<IterationRecord>>(),
                        from_hex(body.at("archive_digest").get<std::string>())};
        if (training_fingerprint(a.archive) != a.archive_digest)
            throw Error(Errc::CorruptDocument, "archive does not match its digest");
        return a;
    });
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::IoFailure, "cannot open " + tmp.string() + " for writing");
        out << text;
        out.flush();
        if (!out) throw Error(Errc::IoFailure, "write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(Errc::IoFailure, "cannot move document into " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error(Errc::IoFailure, "read from " + path.string() + " failed");
    return ss.str();
}

void save_session(const Session& session, const std::filesystem::path& path) {
    write_file_atomic(path, session_to_json(session).dump(2) + "\n");
}

Session load_session(const std::filesystem::path& path) {
    return session_from_json(parse(read_file(path)));
}

void save_model(const ModelArtifact& artifact, const std::filesystem::path& path) {
    write_file_atomic(path, model_to_json(artifact).dump(2) + "\n");
}

ModelArtifact load_model(const std::filesystem::path& path) {
    return model_from_json(parse(read_file(path)));
}

} // namespace ared

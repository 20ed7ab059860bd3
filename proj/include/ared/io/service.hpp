#pragma once

#include "ared/controller.hpp"
#include "ared/io/json_codec.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace ared {

/// Session mutations as they appear in a session log. Replaying a log through
/// apply_event() regenerates the session exactly.
json create_event(const SessionConfig& config, const std::vector<Sample>& initial);
json propose_event();
json result_event(double value, std::int64_t recorded_unix_ms);

/// Applies one non-create event. A draw that cannot be placed marks the session
/// failed instead of throwing; other errors propagate.
void apply_event(Session& session, const json& event);
Session replay_log(const std::vector<json>& log);

/// JSON views returned by the HTTP API.
json session_summary(const Session& session);
json proposal_view(const Session& session, const Proposal& proposal);
json history_view(const Session& session);
/// 1 iv: curve of g points. 2+ iv: g x g grid over axes (a, b) with the other
/// ivs held at their midpoints. Includes the archive as an overlay.
json surface_view(const Session& session, std::size_t resolution, std::size_t axis_a = 0,
                  std::size_t axis_b = 1);

/// ARED_DATA_DIR when set, otherwise ./ared-data.
std::filesystem::path default_data_dir();

/// Thread-safe map of live sessions, each behind its own lock and mirrored to
/// <data_dir>/<id>.json plus an append-only <id>.log.jsonl.
class SessionStore {
public:
    explicit SessionStore(std::filesystem::path data_dir);

    struct Entry {
        std::mutex mutex;
        std::optional<Session> session;
        std::vector<json> log;
    };

    /// Starts a session, persists it and returns its id.
    std::string create(const SessionConfig& config, const std::vector<Sample>& initial);
    /// nullptr when unknown.
    std::shared_ptr<Entry> find(const std::string& id) const;
    std::vector<std::string> ids() const;
    /// Applies a logged mutation under the entry lock and persists the result.
    void mutate(const std::string& id, Entry& entry, const json& event);

    const std::filesystem::path& data_dir() const noexcept { return dir_; }

private:
    void persist(const std::string& id, const Entry& entry, const json& event) const;

    std::filesystem::path dir_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

struct ServiceOptions {
    std::filesystem::path data_dir = default_data_dir();
    /// When set, every request must carry it in the X-Ared-Token header.
    std::optional<std::string> token;
    /// Served at / (the dashboard build).
    std::optional<std::filesystem::path> static_dir;
};

class Service {
public:
    explicit Service(ServiceOptions options);
    ~Service();

    /// Port 0 picks a free port. Returns the bound port; throws BindFailure.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void run();
    void stop();
    SessionStore& store() noexcept { return store_; }

private:
    void install_routes();

    ServiceOptions options_;
    SessionStore store_;
    std::unique_ptr<httplib::Server> server_;
};

} // namespace ared

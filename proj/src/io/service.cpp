#include "ared/io/service.hpp"

#include "ared/error.hpp"
#include "ared/io/documents.hpp"
#include "ared/sampler.hpp"

#include <httplib.h>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>

namespace ared {

json create_event(const SessionConfig& config, const std::vector<Sample>& initial) {
    return json{{"op", "create"}, {"config", config}, {"initial", initial}};
}

json propose_event() {
    return json{{"op", "propose"}};
}

json result_event(double value, std::int64_t recorded_unix_ms) {
    return json{{"op", "result"}, {"value", value}, {"recorded_unix_ms", recorded_unix_ms}};
}

void apply_event(Session& session, const json& event) {
    const std::string op = event.at("op").get<std::string>();
    if (op == "propose") {
        try {
            session.propose_next();
        } catch (const Error& e) {
            if (e.code() != Errc::DrawExhausted) throw;
            session.mark_failed(e.what());
        }
    } else if (op == "result") {
        session.record_result(event.at("value").get<double>(),
                              event.at("recorded_unix_ms").get<std::int64_t>());
    } else {
        throw Error(Errc::CorruptDocument, "unexpected log event '" + op + "'");
    }
}

Session replay_log(const std::vector<json>& log) {
    if (log.empty() || log.front().at("op") != "create")
        throw Error(Errc::CorruptDocument, "session log must begin with a create event");
    Session s = Session::start(log.front().at("config").get<SessionConfig>(),
                               log.front().at("initial").get<std::vector<Sample>>());
    for (std::size_t i = 1; i < log.size(); ++i) apply_event(s, log[i]);
    return s;
}

namespace {

json feedback_box(const Domain& domain, const FeedbackCenter& center) {
    const NormalDrawSpec spec = feedback_spec(domain, center);
    return json{{"center", center.coords},
                {"triggering_ape", center.triggering_ape},
                {"sample_index", center.sample_index},
                {"lower", spec.lower},
                {"upper", spec.upper}};
}

json report_view(const ErrorReport& r) {
    return json{{"mae", r.mae}, {"mape", r.mape}, {"mape_cases", r.mape_cases}, {"r", r.r.value},
                {"per_case", r.per_case}};
}

} // namespace

json proposal_view(const Session& session, const Proposal& p) {
    const Domain& domain = session.config().domain;
    return json{{"coords", p.sample.coords},
                {"predicted", p.predicted ? json(*p.predicted) : json(nullptr)},
                {"provenance", std::string(to_string(p.sample.provenance))},
                {"sequence_index", p.sample.sequence_index},
                {"audit",
                 {{"distance", p.distance},
                  {"threshold", p.threshold},
                  {"attempts", p.attempts},
                  {"v", session.selected_count() - 1}}},
                {"feedback", p.center ? feedback_box(domain, *p.center) : json(nullptr)}};
}

json session_summary(const Session& s) {
    json j;
    j["status"] = std::string(to_string(s.status()));
    j["domain"] = s.config().domain;
    j["config"] = s.config();
    j["archive"] = s.archive();
    j["selected_count"] = s.selected_count();
    j["consecutive_passes"] = s.consecutive_passes();
    j["run_length"] = s.config().run_length();
    j["eligibility_count"] = eligibility_count(s.config().feedback_policy);
    j["failure"] = s.failure_reason();
    j["pending"] = s.pending() ? proposal_view(s, *s.pending()) : json(nullptr);
    j["active_feedback"] =
        s.active_feedback() ? feedback_box(s.config().domain, *s.active_feedback()) : json(nullptr);
    if (s.model()) {
        const auto& m = *s.model();
        j["model"] = {{"hyperparams", m.hyperparams()},
                      {"support_count", m.support_count()},
                      {"training_size", m.training_size()}};
    } else {
        j["model"] = nullptr;
    }
    if (!s.history().empty()) {
        const auto& last = s.history().back();
        j["last_iteration"] = {{"report", report_view(last.report)},
                               {"outcome", to_string(last.outcome)},
                               {"feedback", last.feedback ? json(*last.feedback) : json(nullptr)}};
    } else {
        j["last_iteration"] = nullptr;
    }
    return j;
}

json history_view(const Session& s) {
    json rows = json::array();
    for (const auto& h : s.history()) {
        rows.push_back({{"archive_size", h.archive_size},
                        {"mae", h.report.mae},
                        {"mape", h.report.mape},
                        {"r", h.report.r.value},
                        {"outcome", to_string(h.outcome)},
                        {"feedback", h.feedback ? json(*h.feedback) : json(nullptr)},
                        {"C", h.hp.C},
                        {"gamma", h.hp.gamma},
                        {"cv_mae", h.cv_mae}});
    }
    return json{{"history", rows}};
}

json surface_view(const Session& s, std::size_t g, std::size_t a, std::size_t b) {
    if (!s.model()) throw Error(Errc::InsufficientData, "session has no model yet");
    if (g < 2 || g > 501) throw Error(Errc::InvalidConfig, "resolution must be in [2, 501]");
    const Domain& d = s.config().domain;
    const auto& model = *s.model();
    auto axis = [&](std::size_t k) {
        std::vector<double> xs(g);
        const auto& iv = d.ivs[k];
        for (std::size_t i = 0; i < g; ++i)
            xs[i] = i + 1 == g ? iv.high : iv.low + iv.length() * static_cast<double>(i) / (g - 1);
        return xs;
    };
    json overlay = json::array();
    for (const auto& x : s.archive()) {
        overlay.push_back({{"coords", x.coords},
                           {"value", x.value ? json(*x.value) : json(nullptr)},
                           {"provenance", std::string(to_string(x.provenance))}});
    }
    std::vector<double> point(d.dimension());
    for (std::size_t k = 0; k < d.dimension(); ++k) point[k] = 0.5 * (d.ivs[k].low + d.ivs[k].high);

    json j;
    j["archive"] = overlay;
    if (d.dimension() == 1) {
        auto xs = axis(0);
        std::vector<double> ys(g);
        for (std::size_t i = 0; i < g; ++i) {
            point[0] = xs[i];
            ys[i] = model.predict(point);
        }
        j["kind"] = "curve";
        j["x"] = xs;
        j["y"] = ys;
        return j;
    }
    if (a >= d.dimension() || b >= d.dimension() || a == b)
        throw Error(Errc::InvalidConfig, "surface axes must be two distinct ivs");
    auto xs = axis(a);
    auto ys = axis(b);
    std::vector<std::vector<double>> z(g, std::vector<double>(g));
    for (std::size_t r = 0; r < g; ++r) {
        point[b] = ys[r];
        for (std::size_t c = 0; c < g; ++c) {
            point[a] = xs[c];
            z[r][c] = model.predict(point);
        }
    }
    json fixed = json::object();
    for (std::size_t k = 0; k < d.dimension(); ++k)
        if (k != a && k != b) fixed[d.ivs[k].name] = point[k];
    j["kind"] = "grid";
    j["axes"] = {a, b};
    j["x"] = xs;
    j["y"] = ys;
    j["z"] = z;
    j["fixed"] = fixed;
    return j;
}

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("ARED_DATA_DIR"); env && *env) return env;
    return "ared-data";
}

namespace {

std::string new_session_id() {
    static std::mutex m;
    static std::mt19937_64 gen{std::random_device{}()};
    std::lock_guard lock(m);
    return to_hex(gen());
}

std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

} // namespace

SessionStore::SessionStore(std::filesystem::path data_dir) : dir_(std::move(data_dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(Errc::IoFailure, "cannot create data directory " + dir_.string());
    for (const auto& f : std::filesystem::directory_iterator(dir_)) {
        if (f.path().extension() != ".json") continue;
        const std::string id = f.path().stem().string();
        try {
            auto entry = std::make_shared<Entry>();
            entry->session = load_session(f.path());
            std::ifstream log(dir_ / (id + ".log.jsonl"));
            for (std::string line; std::getline(log, line);)
                if (!line.empty()) entry->log.push_back(json::parse(line));
            sessions_.emplace(id, std::move(entry));
        } catch (const std::exception& e) {
            std::cerr << "ared: skipping stored session " << id << ": " << e.what() << "\n";
        }
    }
}

std::string SessionStore::create(const SessionConfig& config, const std::vector<Sample>& initial) {
    auto entry = std::make_shared<Entry>();
    entry->session = Session::start(config, initial);
    json event = create_event(config, initial);
    entry->log.push_back(event);
    std::string id;
    {
        std::unique_lock lock(mutex_);
        do {
            id = new_session_id();
        } while (sessions_.count(id));
        sessions_.emplace(id, entry);
    }
    std::lock_guard guard(entry->mutex);
    persist(id, *entry, event);
    return id;
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::vector<std::string> SessionStore::ids() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : sessions_) out.push_back(id);
    return out;
}

void SessionStore::mutate(const std::string& id, Entry& entry, const json& event) {
    apply_event(*entry.session, event);
    entry.log.push_back(event);
    persist(id, entry, event);
}

void SessionStore::persist(const std::string& id, const Entry& entry, const json& event) const {
    save_session(*entry.session, dir_ / (id + ".json"));
    std::ofstream log(dir_ / (id + ".log.jsonl"), std::ios::app);
    if (!log) throw Error(Errc::IoFailure, "cannot append to the log of session " + id);
    log << event.dump() << "\n";
}

namespace {

int http_status(Errc code) {
    switch (code) {
    case Errc::WrongState:
    case Errc::NotConverged: return 409;
    case Errc::IoFailure:
    case Errc::SolverDiverged:
    case Errc::BindFailure: return 500;
    default: return 400;
    }
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& msg) {
    send_json(res, status, json{{"error", code}, {"message", msg}});
}

// Runs a handler and maps failures to JSON error responses.
template <class F>
void guarded(httplib::Response& res, F&& f) {
    try {
        f();
    } catch (const Error& e) {
        send_error(res, http_status(e.code()), std::string(to_string(e.code())), e.what());
    } catch (const json::exception& e) {
        send_error(res, 400, "BadRequest", e.what());
    } catch (const std::exception& e) {
        send_error(res, 500, "Internal", e.what());
    }
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    return json::parse(req.body);
}

} // namespace

Service::Service(ServiceOptions options)
    : options_(std::move(options)), store_(options_.data_dir),
      server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

Service::~Service() {
    stop();
}

int Service::bind(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = server_->bind_to_any_port(host);
        if (bound < 0) throw Error(Errc::BindFailure, "cannot bind " + host);
    } else if (!server_->bind_to_port(host, port)) {
        throw Error(Errc::BindFailure, "cannot bind " + host + ":" + std::to_string(port));
    }
    return bound;
}

void Service::run() {
    server_->listen_after_bind();
}

void Service::stop() {
    if (server_) server_->stop();
}

void Service::install_routes() {
    auto& svr = *server_;
    if (options_.token) {
        svr.set_pre_routing_handler([token = *options_.token](const httplib::Request& req,
                                                              httplib::Response& res) {
            if (req.get_header_value("X-Ared-Token") == token) return httplib::Server::HandlerResponse::Unhandled;
            send_error(res, 401, "Unauthorized", "missing or wrong X-Ared-Token header");
            return httplib::Server::HandlerResponse::Handled;
        });
    }
    if (options_.static_dir && !svr.set_mount_point("/", options_.static_dir->string()))
        throw Error(Errc::IoFailure, "static directory " + options_.static_dir->string() + " not found");

    // Resolves {id}, locks the session and runs f(entry, id).
    auto with_session = [this](const httplib::Request& req, httplib::Response& res, auto&& f) {
        guarded(res, [&] {
            const std::string id = req.matches[1];
            auto entry = store_.find(id);
            if (!entry) {
                send_error(res, 404, "NotFound", "no session " + id);
                return;
            }
            std::lock_guard lock(entry->mutex);
            f(*entry, id);
        });
    };

    svr.Get("/sessions", [this](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] { send_json(res, 200, json{{"sessions", store_.ids()}}); });
    });

    svr.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            json body = parse_body(req);
            std::vector<std::string> warnings;
            const json& cfg = body.at("config");
            // Applies the defaults so the warnings for untuned dimensions surface.
            default_session_config(cfg.at("domain").get<Domain>(), 0, &warnings);
            SessionConfig config = cfg.get<SessionConfig>();
            auto initial = body.at("initial").get<std::vector<Sample>>();
            for (auto& s : initial) s.provenance = Provenance::initial;
            const std::string id = store_.create(config, initial);
            auto entry = store_.find(id);
            std::lock_guard lock(entry->mutex);
            json out = session_summary(*entry->session);
            out["id"] = id;
            out["warnings"] = warnings;
            send_json(res, 201, out);
        });
    });

    svr.Get(R"(/sessions/([0-9a-f]+))", [with_session](const httplib::Request& req, httplib::Response& res) {
        with_session(req, res, [&](SessionStore::Entry& e, const std::string& id) {
            json out = session_summary(*e.session);
            out["id"] = id;
            send_json(res, 200, out);
        });
    });

    svr.Post(R"(/sessions/([0-9a-f]+)/proposal)",
             [this, with_session](const httplib::Request& req, httplib::Response& res) {
                 with_session(req, res, [&](SessionStore::Entry& e, const std::string& id) {
                     if (e.session->status() != SessionStatus::ready_to_propose)
                         throw Error(Errc::WrongState, "cannot propose while " +
                                                           std::string(to_string(e.session->status())));
                     store_.mutate(id, e, propose_event());
                     const Session& s = *e.session;
                     if (!s.pending()) {
                         send_error(res, 409, "DrawExhausted", s.failure_reason());
                         return;
                     }
                     json out = proposal_view(s, *s.pending());
                     out["status"] = std::string(to_string(s.status()));
                     send_json(res, 200, out);
                 });
             });

    svr.Post(R"(/sessions/([0-9a-f]+)/result)",
             [this, with_session](const httplib::Request& req, httplib::Response& res) {
                 with_session(req, res, [&](SessionStore::Entry& e, const std::string& id) {
                     json body = parse_body(req);
                     const json& value = body.at("value");
                     if (!value.is_number())
                         throw Error(Errc::NonFiniteValue, "value must be a finite number");
                     if (e.session->status() != SessionStatus::awaiting_measurement)
                         throw Error(Errc::WrongState, "no proposal awaits a measurement");
                     store_.mutate(id, e, result_event(value.get<double>(), now_ms()));
                     const Session& s = *e.session;
                     const auto& last = s.history().back();
                     json out{{"report", report_view(last.report)},
                              {"outcome", to_string(last.outcome)},
                              {"feedback", last.feedback ? feedback_box(s.config().domain, *last.feedback)
                                                         : json(nullptr)},
                              {"consecutive_passes", s.consecutive_passes()},
                              {"status", std::string(to_string(s.status()))},
                              {"converged", s.status() == SessionStatus::converged}};
                     send_json(res, 200, out);
                 });
             });

    svr.Get(R"(/sessions/([0-9a-f]+)/surface)", [with_session](const httplib::Request& req, httplib::Response& res) {
        with_session(req, res, [&](SessionStore::Entry& e, const std::string&) {
            auto num = [&](const char* key, std::size_t dflt) -> std::size_t {
                if (!req.has_param(key)) return dflt;
                const std::string v = req.get_param_value(key);
                std::size_t n = 0;
                auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
                if (ec != std::errc{} || p != v.data() + v.size() || v.empty())
                    throw Error(Errc::InvalidConfig, std::string("bad ") + key + " parameter");
                return n;
            };
            send_json(res, 200, surface_view(*e.session, num("resolution", 41), num("x", 0), num("y", 1)));
        });
    });

    svr.Get(R"(/sessions/([0-9a-f]+)/history)", [with_session](const httplib::Request& req, httplib::Response& res) {
        with_session(req, res, [&](SessionStore::Entry& e, const std::string&) {
            send_json(res, 200, history_view(*e.session));
        });
    });

    svr.Get(R"(/sessions/([0-9a-f]+)/model)", [with_session](const httplib::Request& req, httplib::Response& res) {
        with_session(req, res, [&](SessionStore::Entry& e, const std::string&) {
            const bool force = req.has_param("force") && req.get_param_value("force") != "0";
            send_json(res, 200, model_to_json(export_model(*e.session, force)));
        });
    });

    svr.Get(R"(/sessions/([0-9a-f]+)/log)", [with_session](const httplib::Request& req, httplib::Response& res) {
        with_session(req, res, [&](SessionStore::Entry& e, const std::string&) {
            send_json(res, 200, json{{"log", e.log}});
        });
    });
}

} // namespace ared

#include "ared/benchmarks.hpp"
#include "ared/io/documents.hpp"
#include "ared/io/service.hpp"

#include <doctest.h>
#include <httplib.h>

#include <filesystem>
#include <random>
#include <thread>

using namespace ared;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("ared-svc-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

// Runs a service on a free loopback port for the lifetime of the object.
struct LiveService {
    Service service;
    int port = 0;
    std::thread thread;

    explicit LiveService(ServiceOptions opts) : service(std::move(opts)) {
        port = service.bind("127.0.0.1", 0);
        thread = std::thread([this] { service.run(); });
    }
    ~LiveService() {
        service.stop();
        thread.join();
    }
    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(120, 0);
        return c;
    }
};

json create_body(const Domain& domain, std::uint64_t seed) {
    json cfg{{"domain", domain}, {"seed", seed}, {"svr", {{"grid_log10_step", 2.0}}}};
    json initial = json::array();
    for (const auto& s : corner_samples(domain, [](std::span<const double> x) {
             double v = 0;
             for (double c : x) v += c * c;
             return v;
         }))
        initial.push_back(s);
    return json{{"config", cfg}, {"initial", initial}};
}

const Domain square{{{"x", -3, 3}, {"y", -3, 3}}, "z"};
const Domain line{{{"t", 0, 1}}, "y"};

json parse(const httplib::Result& r) {
    REQUIRE(r);
    return json::parse(r->body);
}

} // namespace

TEST_CASE("session lifecycle over http") {
    TempDir dir;
    LiveService live(ServiceOptions{dir.path, std::nullopt, std::nullopt});
    auto cli = live.client();

    auto created = cli.Post("/sessions", create_body(square, 3).dump(), "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    const json c = json::parse(created->body);
    const std::string id = c.at("id");
    CHECK(id.size() == 16);
    CHECK(c.at("status") == "ready_to_propose");
    CHECK(c.at("warnings").empty());

    auto list = parse(cli.Get("/sessions"));
    CHECK(list.at("sessions") == json::array({id}));

    // A result before any proposal is a protocol error.
    auto early = cli.Post("/sessions/" + id + "/result", R"({"value": 1.0})", "application/json");
    REQUIRE(early);
    CHECK(early->status == 409);
    CHECK(json::parse(early->body).at("error") == "WrongState");

    auto prop = cli.Post("/sessions/" + id + "/proposal", "", "application/json");
    REQUIRE(prop);
    CHECK(prop->status == 200);
    const json p = json::parse(prop->body);
    CHECK(p.at("coords").size() == 2);
    CHECK(p.at("provenance") == "drawn");
    CHECK(p.at("audit").at("distance").get<double>() > p.at("audit").at("threshold").get<double>());

    auto twice = cli.Post("/sessions/" + id + "/proposal", "", "application/json");
    REQUIRE(twice);
    CHECK(twice->status == 409);

    auto bad = cli.Post("/sessions/" + id + "/result", R"({"value": "x"})", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);

    const double x = p["coords"][0], y = p["coords"][1];
    auto res = cli.Post("/sessions/" + id + "/result", json{{"value", x * x + y * y}}.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    const json r = json::parse(res->body);
    CHECK(r.at("outcome") == "ineligible");
    CHECK(r.at("report").contains("mae"));

    auto surf = parse(cli.Get("/sessions/" + id + "/surface?resolution=7"));
    CHECK(surf.at("z").size() == 7);
    CHECK(surf.at("z")[0].size() == 7);
    CHECK(surf.at("archive").size() == 5);
    auto bad_res = cli.Get("/sessions/" + id + "/surface?resolution=1");
    REQUIRE(bad_res);
    CHECK(bad_res->status == 400);

    auto hist = parse(cli.Get("/sessions/" + id + "/history"));
    CHECK(hist.at("history").size() == 1);

    auto model = cli.Get("/sessions/" + id + "/model");
    REQUIRE(model);
    CHECK(model->status == 409);
    auto forced = cli.Get("/sessions/" + id + "/model?force=1");
    REQUIRE(forced);
    CHECK(forced->status == 200);
    CHECK(json::parse(forced->body).at("schema") == model_schema);

    auto log = parse(cli.Get("/sessions/" + id + "/log"));
    CHECK(log.at("log").size() == 3);

    auto missing = cli.Get("/sessions/00000000000000ff");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    CHECK(fs::exists(dir.path / (id + ".json")));
    CHECK(fs::exists(dir.path / (id + ".log.jsonl")));
}

TEST_CASE("one-variable surface is a curve") {
    TempDir dir;
    LiveService live(ServiceOptions{dir.path, std::nullopt, std::nullopt});
    auto cli = live.client();
    const json c = parse(cli.Post("/sessions", create_body(line, 1).dump(), "application/json"));
    const std::string id = c.at("id");
    auto surf = parse(cli.Get("/sessions/" + id + "/surface?resolution=11"));
    CHECK(surf.at("x").size() == 11);
    CHECK(surf.at("y").size() == 11);
}

TEST_CASE("token is enforced when configured") {
    TempDir dir;
    LiveService live(ServiceOptions{dir.path, std::string("s3cret"), std::nullopt});
    auto cli = live.client();
    auto denied = cli.Get("/sessions");
    REQUIRE(denied);
    CHECK(denied->status == 401);
    auto ok = cli.Get("/sessions", httplib::Headers{{"X-Ared-Token", "s3cret"}});
    REQUIRE(ok);
    CHECK(ok->status == 200);
}

TEST_CASE("sessions survive a restart and the log replays") {
    TempDir dir;
    std::string id;
    json before;
    {
        LiveService live(ServiceOptions{dir.path, std::nullopt, std::nullopt});
        auto cli = live.client();
        id = parse(cli.Post("/sessions", create_body(square, 9).dump(), "application/json")).at("id");
        for (int i = 0; i < 3; ++i) {
            const json p = parse(cli.Post("/sessions/" + id + "/proposal", "", "application/json"));
            const double x = p["coords"][0], y = p["coords"][1];
            cli.Post("/sessions/" + id + "/result", json{{"value", x * x + y * y}}.dump(), "application/json");
        }
        before = parse(cli.Get("/sessions/" + id));
    }
    LiveService again(ServiceOptions{dir.path, std::nullopt, std::nullopt});
    auto cli = again.client();
    CHECK(parse(cli.Get("/sessions/" + id)) == before);

    auto entry = again.service.store().find(id);
    REQUIRE(entry);
    const Session replayed = replay_log(entry->log);
    CHECK(session_to_json(replayed) == session_to_json(*entry->session));
}

TEST_CASE("bad bodies map to 400") {
    TempDir dir;
    LiveService live(ServiceOptions{dir.path, std::nullopt, std::nullopt});
    auto cli = live.client();
    auto r = cli.Post("/sessions", "{", "application/json");
    REQUIRE(r);
    CHECK(r->status == 400);
    json missing_corner = create_body(square, 1);
    missing_corner["initial"].erase(0);
    auto r2 = cli.Post("/sessions", missing_corner.dump(), "application/json");
    REQUIRE(r2);
    CHECK(r2->status == 400);
    CHECK(json::parse(r2->body).at("error") == "MissingEndpoints");
}

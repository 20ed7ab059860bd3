#include "ared/benchmarks.hpp"
#include "ared/controller.hpp"
#include "ared/error.hpp"
#include "ared/io/csv.hpp"
#include "ared/io/documents.hpp"
#include "ared/io/service.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <csignal>
#include <cstdio>
#include <iostream>

using namespace ared;

namespace {

Service* running_service = nullptr;

void on_signal(int) {
    if (running_service) running_service->stop();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int run_bench(const std::string& function, std::size_t trials, std::uint64_t seed, const std::string& out) {
    const auto id = bench::function_from_string(function);
    const auto table = bench::run_comparison(id, trials, seed);
    const std::string text = csv::comparison_csv(table);
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        csv::export_csv(table, out);
    }
    std::vector<double> ared_mae, base_mae, counts;
    for (const auto& t : table.trials) {
        ared_mae.push_back(t.ared.mae);
        base_mae.push_back(t.baseline.mae);
        counts.push_back(static_cast<double>(t.case_count));
    }
    double mean_count = 0;
    for (double c : counts) mean_count += c;
    if (!counts.empty()) mean_count /= static_cast<double>(counts.size());
    std::fprintf(stderr, "%s: %zu trials, mean cases %.1f, median MAE ared %.4g vs baseline %.4g\n",
                 function.c_str(), trials, mean_count, median(ared_mae), median(base_mae));
    return 0;
}

int session_new(const std::string& cfg_path, const std::string& out) {
    const json doc = json::parse(read_file(cfg_path));
    std::vector<std::string> warnings;
    const json& cfg = doc.at("config");
    default_session_config(cfg.at("domain").get<Domain>(), 0, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    auto initial = doc.at("initial").get<std::vector<Sample>>();
    for (auto& s : initial) s.provenance = Provenance::initial;
    Session s = Session::start(cfg.get<SessionConfig>(), std::move(initial));
    save_session(s, out);
    std::cout << session_summary(s).dump(2) << "\n";
    return 0;
}

int session_propose(const std::string& path) {
    Session s = load_session(path);
    apply_event(s, propose_event());
    save_session(s, path);
    if (!s.pending()) {
        std::cerr << "draw failed: " << s.failure_reason() << "\n";
        return 3;
    }
    std::cout << proposal_view(s, *s.pending()).dump(2) << "\n";
    return 0;
}

int session_record(const std::string& path, double value) {
    Session s = load_session(path);
    s.record_result(value);
    save_session(s, path);
    const auto& last = s.history().back();
    json out{{"mae", last.report.mae},
             {"mape", last.report.mape},
             {"r", last.report.r.value},
             {"outcome", to_string(last.outcome)},
             {"feedback", last.feedback ? json(*last.feedback) : json(nullptr)},
             {"status", std::string(to_string(s.status()))}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int session_export(const std::string& path, const std::string& out, bool force) {
    const Session s = load_session(path);
    save_model(export_model(s, force), out);
    return 0;
}

int session_archive(const std::string& path, const std::string& out) {
    const Session s = load_session(path);
    csv::export_csv(s.config().domain, s.archive(), out);
    return 0;
}

int serve(const std::string& bind, const std::string& data, const std::string& token,
          const std::string& static_dir) {
    const auto colon = bind.rfind(':');
    if (colon == std::string::npos) throw Error(Errc::InvalidConfig, "--bind expects HOST:PORT");
    const std::string host = bind.substr(0, colon);
    const int port = std::stoi(bind.substr(colon + 1));
    ServiceOptions options;
    if (!data.empty()) options.data_dir = data;
    if (!token.empty()) options.token = token;
    if (!static_dir.empty()) options.static_dir = static_dir;
    Service service(options);
    const int bound = service.bind(host, port);
    std::cerr << "ared: serving on " << host << ":" << bound << ", data in "
              << options.data_dir.string() << "\n";
    running_service = &service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    service.run();
    running_service = nullptr;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive random experiment design"};
    app.require_subcommand(1);

    auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark comparison and write the table as CSV");
    std::string function = "gauss2d";
    std::size_t trials = 10;
    std::uint64_t seed = 1;
    std::string bench_out;
    bench_cmd->add_option("--function", function, "gauss2d, surface3d or peaks")
        ->check(CLI::IsMember({"gauss2d", "surface3d", "peaks"}));
    bench_cmd->add_option("--trials", trials)->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", seed);
    bench_cmd->add_option("--out", bench_out, "CSV path, - for stdout");

    auto* session_cmd = app.add_subcommand("session", "Step a session stored in a JSON document");
    session_cmd->require_subcommand(1);
    std::string cfg_path, session_path = "session.json", model_out = "model.json", archive_out = "archive.csv";
    double value = 0;
    bool force = false;
    auto* s_new = session_cmd->add_subcommand("new", "Start a session from config and initial samples");
    s_new->add_option("--config", cfg_path)->required()->check(CLI::ExistingFile);
    s_new->add_option("--out", session_path);
    auto* s_propose = session_cmd->add_subcommand("propose", "Draw the next case");
    s_propose->add_option("--session", session_path)->check(CLI::ExistingFile);
    auto* s_record = session_cmd->add_subcommand("record", "Enter the measured value of the pending case");
    s_record->add_option("--session", session_path)->check(CLI::ExistingFile);
    s_record->add_option("--value", value)->required();
    auto* s_export = session_cmd->add_subcommand("export-model", "Write the trained model document");
    s_export->add_option("--session", session_path)->check(CLI::ExistingFile);
    s_export->add_option("--out", model_out);
    s_export->add_flag("--force", force, "Export before convergence");
    auto* s_archive = session_cmd->add_subcommand("export-archive", "Write the archive as CSV");
    s_archive->add_option("--session", session_path)->check(CLI::ExistingFile);
    s_archive->add_option("--out", archive_out);

    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP session API");
    std::string bind = "127.0.0.1:8080", data, token, static_dir;
    serve_cmd->add_option("--bind", bind, "HOST:PORT");
    serve_cmd->add_option("--data", data, "Session directory (default $ARED_DATA_DIR or ./ared-data)");
    serve_cmd->add_option("--token", token, "Require this X-Ared-Token header");
    serve_cmd->add_option("--static", static_dir, "Directory served at /");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bench_cmd->parsed()) return run_bench(function, trials, seed, bench_out);
        if (s_new->parsed()) return session_new(cfg_path, session_path);
        if (s_propose->parsed()) return session_propose(session_path);
        if (s_record->parsed()) return session_record(session_path, value);
        if (s_export->parsed()) return session_export(session_path, model_out, force);
        if (s_archive->parsed()) return session_archive(session_path, archive_out);
        if (serve_cmd->parsed()) return serve(bind, data, token, static_dir);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

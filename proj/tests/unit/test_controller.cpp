#include "ared/controller.hpp"
#include "ared/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace ared;

namespace {

const Domain line{{{"x", 0, 1}}, "y"};
const Domain square{{{"x", -3, 3}, {"y", -3, 3}}, "z"};

Sample init(std::vector<double> c, std::optional<double> v) {
    Sample s;
    s.coords = std::move(c);
    s.value = v;
    return s;
}

SessionConfig quick(const Domain& d, std::uint64_t seed) {
    SessionConfig c = default_session_config(d, seed);
    c.svr_config.grid_log10_step = 2.0; // small grid keeps the tests fast
    return c;
}

double bump(std::span<const double> x) {
    return std::exp(-40.0 * (x[0] - 0.6) * (x[0] - 0.6)) + 0.1;
}

template <class F>
Errc code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return Errc::IoFailure;
}

} // namespace

TEST_CASE("default parameters by dimension") {
    auto c1 = default_session_config(line, 1);
    CHECK(c1.draw_params.p == 0.7);
    CHECK(c1.draw_params.q == 10.0);
    CHECK(c1.feedback_params.p == 1.5);
    CHECK(c1.feedback_params.q == 15.0);
    CHECK(c1.feedback_policy.dimension_n == 2);
    CHECK(c1.run_length() == 3);
    auto c2 = default_session_config(square, 1);
    CHECK(c2.draw_params.p == 0.4);
    CHECK(c2.draw_params.q == 5.0);
    CHECK(c2.feedback_params.p == 0.5);
    CHECK(c2.feedback_params.q == 7.0);
    CHECK(c2.feedback_policy.dimension_n == 3);
    CHECK(c2.run_length() == 4);
    std::vector<std::string> warn;
    default_session_config(Domain{{{"a", 0, 1}, {"b", 0, 1}, {"c", 0, 1}}, "y"}, 1, &warn);
    CHECK(warn.size() == 1);
    warn.clear();
    default_session_config(square, 1, &warn);
    CHECK(warn.empty());
}

TEST_CASE("corners enumerate with the first axis slowest") {
    const auto c = domain_corners(square);
    REQUIRE(c.size() == 4);
    CHECK(c[0] == std::vector{-3.0, -3.0});
    CHECK(c[1] == std::vector{-3.0, 3.0});
    CHECK(c[2] == std::vector{3.0, -3.0});
    CHECK(c[3] == std::vector{3.0, 3.0});
}

TEST_CASE("start validates the initial samples") {
    CHECK_NOTHROW(Session::start(quick(line, 1), {init({0}, 0.0004), init({1}, 0.0009)}));
    std::vector<Sample> corners;
    for (auto& c : domain_corners(square)) corners.push_back(init(c, c[1] * 1e-6));
    CHECK_NOTHROW(Session::start(quick(square, 1), corners));
    CHECK(code_of([&] { Session::start(quick(line, 1), {init({0}, 1.0)}); }) == Errc::MissingEndpoints);
    CHECK(code_of([&] { Session::start(quick(line, 1), {init({0}, 1.0), init({1}, std::nullopt)}); }) ==
          Errc::UnmeasuredInitialSample);
    auto bad = quick(line, 1);
    bad.max_draw_attempts = 0;
    CHECK(code_of([&] { Session::start(bad, {init({0}, 1.0), init({1}, 2.0)}); }) == Errc::InvalidConfig);
}

TEST_CASE("a fresh session proposes an exploratory point that honours the constraint") {
    Session s = Session::start(quick(line, 3), {init({0}, 0.1), init({1}, 0.2)});
    CHECK(s.status() == SessionStatus::ready_to_propose);
    CHECK(s.selected_count() == 0);
    const Proposal p = s.propose_next();
    CHECK(p.sample.provenance == Provenance::drawn);
    CHECK(line.contains(p.sample.coords));
    CHECK(p.threshold == doctest::Approx(0.1));
    CHECK(p.distance > p.threshold);
    CHECK(p.predicted.has_value());
    CHECK(s.selected_count() == 1);
    CHECK(s.status() == SessionStatus::awaiting_measurement);
    CHECK(code_of([&] { s.propose_next(); }) == Errc::WrongState);
}

TEST_CASE("record enforces the protocol") {
    Session s = Session::start(quick(line, 3), {init({0}, 0.1), init({1}, 0.2)});
    CHECK(code_of([&] { s.record_result(1.0); }) == Errc::WrongState);
    s.propose_next();
    CHECK(code_of([&] { s.record_result(std::nan("")); }) == Errc::NonFiniteValue);
    const auto before = s.model()->fingerprint();
    s.record_result(0.3);
    CHECK(s.archive().size() == 3);
    CHECK(s.archive().back().value == 0.3);
    CHECK(s.archive().back().recorded_unix_ms > 0);
    CHECK(s.model()->fingerprint() != before);
    CHECK(s.history().size() == 1);
    CHECK(s.history().back().outcome == IterationOutcome::ineligible);
    CHECK(code_of([&] { s.record_result(1.0); }) == Errc::WrongState);
}

TEST_CASE("constant oracle converges right after eligibility") {
    auto cfg = quick(line, 5);
    const auto rep = run_autonomous(cfg, {init({0}, 2.0), init({1}, 2.0)}, [](auto) { return 2.0; });
    CHECK(rep.converged);
    CHECK(rep.feedback_count == 0);
    // Eligible from 6 cases (> 2^2 + 1); three passes follow.
    CHECK(rep.case_count() == 8);
    const auto o = outcomes(rep.session.history());
    CHECK(o == std::vector{IterationOutcome::ineligible, IterationOutcome::ineligible,
                           IterationOutcome::ineligible, IterationOutcome::pass, IterationOutcome::pass,
                           IterationOutcome::pass});
}

TEST_CASE("a triggering error makes the next proposal a feedback draw") {
    auto cfg = quick(line, 8);
    cfg.error_source = ErrorSource::in_sample;
    Session s = Session::start(cfg, {init({0}, 1.0), init({1}, 1.0)});
    // Five smooth values, then an outlier the smooth model cannot follow.
    for (int i = 0; i < 4; ++i) {
        s.propose_next();
        s.record_result(1.0);
    }
    REQUIRE(s.archive().size() == 6);
    const Proposal& p = s.propose_next();
    const std::vector<double> x = p.sample.coords;
    const auto& rec = s.record_result(25.0);
    (void)rec;
    // Any model that does not interpolate exactly leaves a case above both bars.
    if (s.active_feedback()) {
        const Proposal& f = s.propose_next();
        CHECK(f.sample.provenance == Provenance::feedback);
        REQUIRE(f.center.has_value());
        const auto spec = feedback_spec(line, *f.center);
        CHECK(spec.contains(f.sample.coords));
        CHECK(f.threshold == doctest::Approx(1.0 / (1.5 * 5 + 15)));
    } else {
        CHECK(s.history().back().outcome == IterationOutcome::pass);
    }
}

TEST_CASE("cross-validated errors trigger feedback on a sharp feature") {
    auto cfg = quick(line, 2);
    const auto rep = run_autonomous(cfg, {init({0}, bump(std::vector{0.0})), init({1}, bump(std::vector{1.0}))}, bump);
    CHECK(rep.feedback_count > 0);
    for (const auto& a : rep.session.archive()) CHECK(line.contains(a.coords));
    // Every feedback sample lies in the box of the centre that was active when it was drawn.
    const auto& hist = rep.session.history();
    for (std::size_t i = 1; i < hist.size(); ++i) {
        const auto& sample = rep.session.archive()[hist[i].archive_size - 1];
        if (sample.provenance != Provenance::feedback) continue;
        REQUIRE(hist[i - 1].feedback.has_value());
        CHECK(feedback_spec(line, *hist[i - 1].feedback).contains(sample.coords));
    }
}

TEST_CASE("identical seed, config and values give identical proposals") {
    std::vector<Sample> corners;
    for (auto& c : domain_corners(square)) corners.push_back(init(c, std::sin(c[0]) + c[1]));
    auto f = [](std::span<const double> x) { return std::sin(x[0]) + x[1] + 0.3 * x[0] * x[1]; };
    Session a = Session::start(quick(square, 77), corners);
    Session b = Session::start(quick(square, 77), corners);
    for (int i = 0; i < 8; ++i) {
        const auto pa = a.propose_next().sample.coords;
        const auto pb = b.propose_next().sample.coords;
        REQUIRE(pa == pb);
        a.record_result(f(pa));
        b.record_result(f(pb));
    }
    CHECK(a.rng() == b.rng());
}

TEST_CASE("case budget ends the run as failed") {
    auto cfg = quick(line, 9);
    cfg.case_budget = 5;
    const auto rep = run_autonomous(cfg, {init({0}, 0.1), init({1}, 0.2)}, bump);
    CHECK_FALSE(rep.converged);
    CHECK(rep.session.status() == SessionStatus::failed);
    CHECK(rep.case_count() == 5);
    CHECK_FALSE(rep.failure.empty());
}

TEST_CASE("convergence implies a full run of passes") {
    auto cfg = quick(square, 4);
    auto f = [](std::span<const double> x) { return x[0] + 2 * x[1]; };
    const auto rep = run_autonomous(cfg, corner_samples(square, f), f);
    REQUIRE(rep.converged);
    const auto o = outcomes(rep.session.history());
    REQUIRE(o.size() >= cfg.run_length());
    for (std::size_t i = o.size() - cfg.run_length(); i < o.size(); ++i) CHECK(o[i] == IterationOutcome::pass);
    CHECK(rep.session.selected_count() == rep.drawn_count + rep.feedback_count);
}

TEST_CASE("export requires convergence unless forced") {
    Session s = Session::start(quick(line, 3), {init({0}, 0.1), init({1}, 0.2)});
    CHECK(code_of([&] { export_model(s); }) == Errc::NotConverged);
    const auto art = export_model(s, true);
    CHECK(art.archive.size() == 2);
    CHECK(art.archive_digest == training_fingerprint(s.archive()));

    auto cfg = quick(line, 5);
    const auto rep = run_autonomous(cfg, {init({0}, 2.0), init({1}, 2.0)}, [](auto) { return 2.0; });
    const auto done = export_model(rep.session);
    for (std::size_t i = 0; i < done.archive.size(); ++i)
        CHECK(done.archive[i].provenance == rep.session.archive()[i].provenance);
    CHECK(done.history.size() == rep.session.history().size());
}

TEST_CASE("restore checks the state invariants") {
    Session s = Session::start(quick(line, 3), {init({0}, 0.1), init({1}, 0.2)});
    s.propose_next();
    Session::Parts parts{s.config(), s.archive(), s.selected_count(), s.model(), s.history(), s.pending(),
                         s.active_feedback(), s.consecutive_passes(), s.status(), s.rng().state(), ""};
    CHECK_NOTHROW(Session::restore(parts));
    auto bad = parts;
    bad.v = 5;
    CHECK(code_of([&] { Session::restore(bad); }) == Errc::CorruptDocument);
    bad = parts;
    bad.pending.reset();
    CHECK(code_of([&] { Session::restore(bad); }) == Errc::CorruptDocument);
}

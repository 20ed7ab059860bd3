#include "ared/benchmarks.hpp"

#include "ared/error.hpp"
#include "ared/svr.hpp"

#include <cmath>
#include <numbers>

namespace ared::bench {

double BimodalGaussianParams::c1() const noexcept {
    return a1 * sig1 / std::sqrt(2.0 * std::numbers::pi);
}

double BimodalGaussianParams::c2() const noexcept {
    return a2 * sig2 / std::sqrt(2.0 * std::numbers::pi);
}

double bimodal_gaussian(double x, const BimodalGaussianParams& p) {
    const double d1 = x - p.m1;
    const double d2 = x - p.m2;
    return p.baseline + p.c1() * std::exp(-d1 * d1 / p.k1()) + p.c2() * std::exp(-d2 * d2 / p.k2());
}

double bimodal_surface(double x, double y) {
    return y * std::exp(-x * x - y * y) * 50.0;
}

double peaks(double x, double y) {
    const double a = 3.0 * (1.0 - x) * (1.0 - x) * std::exp(-x * x - (y + 1.0) * (y + 1.0));
    const double b = 10.0 * (x / 5.0 - x * x * x - std::pow(y, 5)) * std::exp(-x * x - y * y);
    const double c = std::exp(-(x + 1.0) * (x + 1.0) - y * y) / 3.0;
    return a - b - c;
}

std::string_view to_string(FunctionId id) noexcept {
    switch (id) {
    case FunctionId::gauss2d: return "gauss2d";
    case FunctionId::surface3d: return "surface3d";
    case FunctionId::peaks: return "peaks";
    }
    return "gauss2d";
}

FunctionId function_from_string(std::string_view s) {
    if (s == "gauss2d") return FunctionId::gauss2d;
    if (s == "surface3d") return FunctionId::surface3d;
    if (s == "peaks") return FunctionId::peaks;
    throw Error(Errc::InvalidConfig, "unknown benchmark function '" + std::string(s) + "'");
}

Domain function_domain(FunctionId id) {
    if (id == FunctionId::gauss2d) return Domain{{{"x", 0.0, 1.0}}, "p"};
    return Domain{{{"x", -3.0, 3.0}, {"y", -3.0, 3.0}}, "z"};
}

Oracle function_oracle(FunctionId id) {
    switch (id) {
    case FunctionId::gauss2d:
        return [](std::span<const double> c) { return bimodal_gaussian(c[0]); };
    case FunctionId::surface3d:
        return [](std::span<const double> c) { return bimodal_surface(c[0], c[1]); };
    case FunctionId::peaks:
        return [](std::span<const double> c) { return peaks(c[0], c[1]); };
    }
    throw Error(Errc::InvalidConfig, "unknown benchmark function");
}

namespace {

double level(const VariableRange& iv, std::size_t k, std::size_t count) {
    if (k + 1 == count) return iv.high;
    return iv.low + iv.length() * static_cast<double>(k) / static_cast<double>(count - 1);
}

} // namespace

std::vector<std::vector<double>> design_cases(const DesignSpec& spec, const Domain& domain) {
    validate_domain(domain);
    std::vector<std::size_t> counts = spec.counts;
    if (spec.kind == DesignKind::sfe_equidistant) {
        if (domain.dimension() != 1 || counts.size() != 1) {
            throw Error(Errc::InvalidConfig, "equidistant single-factor design needs one variable");
        }
    } else if (counts.size() != domain.dimension()) {
        throw Error(Errc::InvalidConfig, "factorial design needs one level count per variable");
    }
    for (std::size_t c : counts) {
        if (c < 2) throw Error(Errc::InvalidConfig, "design counts must be >= 2");
    }
    std::vector<std::vector<double>> out;
    std::vector<std::size_t> idx(counts.size(), 0);
    for (;;) {
        std::vector<double> point(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i) point[i] = level(domain.ivs[i], idx[i], counts[i]);
        out.push_back(std::move(point));
        std::size_t axis = counts.size();
        while (axis > 0) {
            --axis;
            if (++idx[axis] < counts[axis]) break;
            idx[axis] = 0;
            if (axis == 0) return out;
        }
    }
}

DesignSpec matched_design(const Domain& domain, std::size_t case_count) {
    if (domain.dimension() == 1) {
        return DesignSpec{DesignKind::sfe_equidistant, {std::max<std::size_t>(case_count, 2)}};
    }
    if (domain.dimension() != 2) {
        throw Error(Errc::InvalidConfig, "matched factorial baselines are defined for two variables");
    }
    // Candidates k x k and k x (k+1); pick the smallest product covering the count.
    std::size_t best_a = 0, best_b = 0;
    for (std::size_t k = 2;; ++k) {
        if (k * k >= case_count) {
            best_a = best_b = k;
            break;
        }
        if (k * (k + 1) >= case_count) {
            best_a = k;
            best_b = k + 1;
            break;
        }
    }
    return DesignSpec{DesignKind::factorial, {best_a, best_b}};
}

std::vector<VerificationPoint> verification_set(FunctionId id) {
    const Domain domain = function_domain(id);
    const Oracle f = function_oracle(id);
    const DesignSpec spec = id == FunctionId::gauss2d
                                ? DesignSpec{DesignKind::sfe_equidistant, {50}}
                                : DesignSpec{DesignKind::factorial, {11, 11}};
    std::vector<VerificationPoint> out;
    for (auto& c : design_cases(spec, domain)) {
        const double v = f(c);
        out.push_back(VerificationPoint{std::move(c), v});
    }
    return out;
}

Evaluation evaluate(const SvrModel& model, std::span<const VerificationPoint> points, bool with_mape) {
    std::vector<double> pred, act;
    for (const auto& p : points) {
        pred.push_back(model.predict(p.coords));
        act.push_back(p.value);
    }
    const ErrorReport rep = error_report(pred, act, {}, ErrorReference::verification_set);
    Evaluation e;
    e.mae = rep.mae;
    if (with_mape) e.mape = rep.mape;
    e.r = rep.r.value;
    return e;
}

SessionConfig benchmark_config(FunctionId id, std::uint64_t seed) {
    return default_session_config(function_domain(id), seed);
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
    // splitmix64 of (seed, trial)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(trial + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

TrialDetail run_trial(FunctionId id, std::uint64_t seed, const SvrConfig& svr) {
    SessionConfig cfg = benchmark_config(id, seed);
    cfg.svr_config = svr;
    const Oracle oracle = function_oracle(id);
    const Domain domain = cfg.domain;
    SessionReport rep = run_autonomous(cfg, corner_samples(domain, oracle), oracle);

    const auto verify = verification_set(id);
    const bool with_mape = id == FunctionId::gauss2d;

    TrialDetail t;
    t.seed = seed;
    t.case_count = rep.case_count();
    t.feedback_count = rep.feedback_count;
    t.converged = rep.converged;
    t.ared = evaluate(*rep.session.model(), verify, with_mape);

    const DesignSpec baseline = matched_design(domain, t.case_count);
    std::vector<Sample> design;
    for (auto& c : design_cases(baseline, domain)) {
        Sample s;
        s.value = oracle(c);
        s.coords = std::move(c);
        s.sequence_index = design.size();
        design.push_back(std::move(s));
    }
    t.baseline_count = design.size();
    Rng rng(seed ^ 0x5fe5fe5fe5fe5fe5ULL);
    const Fit fit = refit(nullptr, domain, design, svr, rng);
    t.baseline = evaluate(fit.model, verify, with_mape);
    return t;
}

ComparisonTable run_comparison(FunctionId id, std::size_t trials, std::uint64_t seed,
                               const std::optional<SvrConfig>& svr_override) {
    if (trials < 1) throw Error(Errc::InvalidConfig, "need at least one trial");
    const SvrConfig svr = svr_override.value_or(benchmark_config(id, seed).svr_config);
    const std::string base_name = id == FunctionId::gauss2d ? "SFE" : "FE";
    ComparisonTable table;
    table.function = id;
    for (std::size_t k = 1; k <= trials; ++k) {
        TrialDetail t = run_trial(id, trial_seed(seed, k), svr);
        table.rows.push_back(ComparisonRow{k, t.case_count, "ARED-" + std::to_string(k), t.ared.mae,
                                           t.ared.mape, t.ared.r});
        table.rows.push_back(ComparisonRow{k, t.baseline_count, base_name + "-" + std::to_string(k),
                                           t.baseline.mae, t.baseline.mape, t.baseline.r});
        table.trials.push_back(std::move(t));
    }
    return table;
}

} // namespace ared::bench

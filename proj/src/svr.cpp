#include "ared/svr.hpp"

#include "ared/error.hpp"
#include "ared/simd/kernels.hpp"
#include "ared/smo.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <thread>

namespace ared {

void validate(const SvrHyperparams& hp) {
    if (!(hp.C > 0.0) || !(hp.gamma > 0.0) || !(hp.epsilon >= 0.0) || !std::isfinite(hp.C) ||
        !std::isfinite(hp.gamma) || !std::isfinite(hp.epsilon)) {
        throw Error(Errc::InvalidConfig, "SVR hyperparameters need C > 0, gamma > 0, epsilon >= 0");
    }
}

void validate(const SvrConfig& config) {
    if (!(config.grid_log10_min < config.grid_log10_max) || !(config.grid_log10_step > 0.0)) {
        throw Error(Errc::InvalidConfig, "grid needs min < max and a positive step");
    }
    if (config.cv_folds < 2) throw Error(Errc::InvalidConfig, "cross-validation needs K >= 2");
    if (!(config.epsilon_fraction >= 0.0) || !(config.solver_tolerance > 0.0)) {
        throw Error(Errc::InvalidConfig, "epsilon fraction and solver tolerance out of range");
    }
}

std::vector<double> grid_exponents(double log10_min, double log10_max, double step) {
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor((log10_max - log10_min) / step + 1e-9)) + 1;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.push_back(log10_min + step * static_cast<double>(k));
    return out;
}

SvrModel::SvrModel(Domain domain, DvScaling scaling, SvrHyperparams hp,
                   std::vector<double> support_unit, std::vector<double> coefficients,
                   double bias, std::uint64_t fingerprint, std::size_t training_size)
    : domain_(std::move(domain)), scaling_(scaling), hp_(hp),
      support_unit_(std::move(support_unit)), coef_(std::move(coefficients)), bias_(bias),
      fingerprint_(fingerprint), training_size_(training_size) {
    if (support_unit_.size() != coef_.size() * domain_.dimension()) {
        throw Error(Errc::LengthMismatch, "support vectors and coefficients disagree");
    }
}

double SvrModel::decision(std::span<const double> unit_coords) const {
    const double sum = simd::kernels().rbf_expansion(support_unit_.data(), coef_.size(),
                                                     domain_.dimension(), coef_.data(),
                                                     unit_coords.data(), hp_.gamma);
    return sum + bias_;
}

double SvrModel::predict(std::span<const double> coords) const {
    if (coords.size() != domain_.dimension()) {
        throw Error(Errc::LengthMismatch, "coordinate count does not match the model domain");
    }
    std::vector<double> unit(coords.size());
    normalize_into(domain_, coords, unit);
    return scaling_.mean + scaling_.scale * decision(unit);
}

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
    if (x.size() != y.size()) throw Error(Errc::LengthMismatch, "kernel inputs differ in size");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return std::exp(-gamma * s);
}

std::uint64_t training_fingerprint(std::span<const Sample> samples) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t word) {
        for (int b = 0; b < 8; ++b) {
            h ^= (word >> (8 * b)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    mix(samples.size());
    for (const auto& s : samples) {
        for (double c : s.coords) mix(std::bit_cast<std::uint64_t>(c));
        mix(s.value ? std::bit_cast<std::uint64_t>(*s.value) : 0x7ff8dead7ff8deadULL);
        mix(static_cast<std::uint64_t>(s.provenance));
    }
    return h;
}

namespace {

void require_measured(std::span<const Sample> samples, std::size_t minimum) {
    if (samples.size() < minimum) {
        throw Error(Errc::InsufficientData, "need at least " + std::to_string(minimum) +
                                                " measured samples, have " +
                                                std::to_string(samples.size()));
    }
    for (const auto& s : samples) {
        if (!s.value) throw Error(Errc::InsufficientData, "training sample has no measured value");
        if (!std::isfinite(*s.value)) throw Error(Errc::NonFiniteValue, "non-finite training value");
    }
}

struct Prepared {
    std::vector<double> unit; // N x dim
    std::vector<double> z;    // standardized targets
    DvScaling scaling;
    double epsilon = 0.0;
};

Prepared prepare(const Domain& domain, std::span<const Sample> samples, const SvrConfig& config) {
    Prepared p;
    const std::size_t dim = domain.dimension();
    p.unit.resize(samples.size() * dim);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].coords.size() != dim) {
            throw Error(Errc::LengthMismatch, "sample dimension does not match the domain");
        }
        normalize_into(domain, samples[i].coords, std::span<double>(p.unit).subspan(i * dim, dim));
    }
    p.scaling = dv_scaling(samples);
    p.z.reserve(samples.size());
    for (const auto& s : samples) p.z.push_back((*s.value - p.scaling.mean) / p.scaling.scale);
    p.epsilon = default_epsilon(samples, config);
    return p;
}

} // namespace

DvScaling dv_scaling(std::span<const Sample> samples) {
    DvScaling sc;
    if (samples.empty()) return sc;
    double mean = 0.0;
    for (const auto& s : samples) mean += *s.value;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (const auto& s : samples) var += (*s.value - mean) * (*s.value - mean);
    var /= static_cast<double>(samples.size());
    sc.mean = mean;
    sc.scale = var > 0.0 ? std::sqrt(var) : 1.0;
    return sc;
}

double default_epsilon(std::span<const Sample> samples, const SvrConfig& config) {
    if (samples.empty()) return 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : samples) {
        lo = std::min(lo, *s.value);
        hi = std::max(hi, *s.value);
    }
    return config.epsilon_fraction * (hi - lo) / dv_scaling(samples).scale;
}

SvrModel train(const Domain& domain, std::span<const Sample> samples, const SvrHyperparams& hp,
               const SvrConfig& config, TrainReport* report) {
    validate(hp);
    require_measured(samples, 2);
    const Prepared prep = prepare(domain, samples, config);
    const std::size_t n = samples.size();
    const std::size_t dim = domain.dimension();
    const auto& simd = simd::kernels();

    std::vector<double> kernel(n * n);
    simd.squared_distances(prep.unit.data(), n, dim, kernel.data());
    simd.rbf_from_sqdist(kernel.data(), kernel.size(), hp.gamma, kernel.data());

    const EpsilonSvrProblem problem(kernel, n, prep.z, hp.epsilon);
    const SmoSolution sol =
        problem.solve(hp.C, SmoOptions{config.solver_tolerance, config.max_solver_iterations});
    if (!sol.converged) {
        throw Error(Errc::SolverDiverged, "SMO stopped after " + std::to_string(sol.iterations) +
                                              " iterations with KKT gap " +
                                              std::to_string(sol.kkt_gap));
    }

    std::vector<double> support;
    std::vector<double> coef;
    for (std::size_t i = 0; i < n; ++i) {
        if (sol.beta[i] == 0.0) continue;
        coef.push_back(sol.beta[i]);
        support.insert(support.end(), prep.unit.begin() + static_cast<std::ptrdiff_t>(i * dim),
                       prep.unit.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
    }
    if (report != nullptr) {
        report->dual_objective = sol.objective;
        report->kkt_gap = sol.kkt_gap;
        report->iterations = sol.iterations;
        report->beta_sum = 0.0;
        report->max_abs_beta = 0.0;
        for (double b : sol.beta) {
            report->beta_sum += b;
            report->max_abs_beta = std::max(report->max_abs_beta, std::abs(b));
        }
    }
    return SvrModel(domain, prep.scaling, hp, std::move(support), std::move(coef), sol.bias,
                    training_fingerprint(samples), n);
}

namespace {

struct CandidateScores {
    // Indexed [gamma_index * n_c + c_index].
    std::vector<double> mae;
    std::vector<double> oof; // [candidate * N + sample], standardized
};

CandidateScores evaluate_grid(const Prepared& prep, std::size_t dim,
                              const std::vector<std::size_t>& fold_of, std::size_t folds,
                              std::span<const double> c_exps, std::span<const double> g_exps,
                              const SvrConfig& config) {
    const std::size_t n = prep.z.size();
    const std::size_t nc = c_exps.size();
    const std::size_t ng = g_exps.size();
    const auto& simd = simd::kernels();

    std::vector<double> sqdist(n * n);
    simd.squared_distances(prep.unit.data(), n, dim, sqdist.data());

    std::vector<std::vector<std::size_t>> train_idx(folds), test_idx(folds);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < folds; ++f) {
            (fold_of[i] == f ? test_idx[f] : train_idx[f]).push_back(i);
        }
    }

    CandidateScores scores;
    scores.mae.assign(ng * nc, 0.0);
    scores.oof.assign(ng * nc * n, 0.0);
    const SmoOptions options{config.solver_tolerance, config.max_solver_iterations};

    auto run_gamma = [&](std::size_t gi) {
        const double gamma = std::pow(10.0, g_exps[gi]);
        std::vector<double> kernel(n * n);
        simd.rbf_from_sqdist(sqdist.data(), kernel.size(), gamma, kernel.data());
        // Larger C at a fixed gamma only makes the dual harder to solve, so the
        // first C whose solve hits the iteration cap excludes itself and every
        // larger C at this gamma, in all folds.
        std::size_t c_limit = nc;
        for (std::size_t f = 0; f < folds && c_limit > 0; ++f) {
            const auto& tr = train_idx[f];
            const auto& te = test_idx[f];
            const std::size_t m = tr.size();
            std::vector<double> sub(m * m);
            std::vector<double> zt(m);
            for (std::size_t a = 0; a < m; ++a) {
                zt[a] = prep.z[tr[a]];
                for (std::size_t b = 0; b < m; ++b) sub[a * m + b] = kernel[tr[a] * n + tr[b]];
            }
            const EpsilonSvrProblem problem(sub, m, zt, prep.epsilon);
            std::vector<double> warm;
            for (std::size_t ci = 0; ci < c_limit; ++ci) {
                const SmoSolution sol = problem.solve(std::pow(10.0, c_exps[ci]), options, warm);
                if (!sol.converged) {
                    c_limit = ci;
                    break;
                }
                const std::size_t cand = gi * nc + ci;
                for (std::size_t t : te) {
                    double pred = sol.bias;
                    for (std::size_t a = 0; a < m; ++a) pred += sol.beta[a] * kernel[t * n + tr[a]];
                    scores.oof[cand * n + t] = pred;
                    scores.mae[cand] += std::abs(pred - prep.z[t]);
                }
                warm = sol.alpha;
            }
        }
        for (std::size_t ci = 0; ci < nc; ++ci) {
            auto& s = scores.mae[gi * nc + ci];
            s = ci >= c_limit ? std::numeric_limits<double>::infinity() : s / static_cast<double>(n);
        }
    };

    std::size_t workers = config.threads > 0 ? config.threads : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(workers, 1, ng);
    if (workers == 1) {
        for (std::size_t gi = 0; gi < ng; ++gi) run_gamma(gi);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t gi = next++; gi < ng; gi = next++) run_gamma(gi);
            });
        }
    }
    return scores;
}

struct Pick {
    std::size_t c_index = 0;
    std::size_t g_index = 0;
    double mae = std::numeric_limits<double>::infinity();
};

bool near_equal(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
}

// Candidates ordered by ascending score; ties keep the preferred pair first,
// then smaller C, then smaller gamma.
std::vector<Pick> rank_candidates(const CandidateScores& scores, std::span<const double> c_exps,
                                  std::span<const double> g_exps,
                                  std::optional<SvrHyperparams> preferred) {
    std::vector<Pick> picks;
    for (std::size_t ci = 0; ci < c_exps.size(); ++ci) {
        for (std::size_t gi = 0; gi < g_exps.size(); ++gi) {
            const double s = scores.mae[gi * c_exps.size() + ci];
            if (std::isfinite(s)) picks.push_back(Pick{ci, gi, s});
        }
    }
    auto is_preferred = [&](const Pick& p) {
        return preferred && near_equal(std::pow(10.0, c_exps[p.c_index]), preferred->C) &&
               near_equal(std::pow(10.0, g_exps[p.g_index]), preferred->gamma);
    };
    std::sort(picks.begin(), picks.end(), [](const Pick& a, const Pick& b) {
        if (a.mae != b.mae) return a.mae < b.mae;
        if (a.c_index != b.c_index) return a.c_index < b.c_index;
        return a.g_index < b.g_index;
    });
    // Scores within round-off of the minimum count as ties.
    if (!picks.empty()) {
        const double best = picks.front().mae;
        const auto tied_end = std::find_if(picks.begin(), picks.end(),
                                           [&](const Pick& p) { return !near_equal(p.mae, best); });
        std::stable_sort(picks.begin(), tied_end, [&](const Pick& a, const Pick& b) {
            const bool pa = is_preferred(a);
            const bool pb = is_preferred(b);
            if (pa != pb) return pa;
            if (a.c_index != b.c_index) return a.c_index < b.c_index;
            return a.g_index < b.g_index;
        });
    }
    return picks;
}

struct SearchOutcome {
    GridSearchResult result;
    std::vector<SvrHyperparams> ranked;
};

SearchOutcome search(const Domain& domain, std::span<const Sample> samples, const SvrConfig& config,
                     Rng& rng, std::optional<SvrHyperparams> preferred) {
    validate(config);
    require_measured(samples, 2);
    const Prepared prep = prepare(domain, samples, config);
    const std::size_t n = samples.size();
    const std::size_t folds = std::min(config.cv_folds, n);

    // Fold assignment is fixed before any candidate is evaluated.
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    std::vector<std::size_t> fold_of(n);
    for (std::size_t i = 0; i < n; ++i) fold_of[perm[i]] = i % folds;

    auto exps = grid_exponents(config.grid_log10_min, config.grid_log10_max, config.grid_log10_step);
    std::vector<double> c_exps = exps;
    std::vector<double> g_exps = exps;
    std::size_t evaluated = 0;
    if (config.coarse_to_fine) {
        const auto coarse = grid_exponents(config.grid_log10_min, config.grid_log10_max,
                                           std::max(2.0, config.grid_log10_step));
        const auto s = evaluate_grid(prep, domain.dimension(), fold_of, folds, coarse, coarse, config);
        evaluated += coarse.size() * coarse.size();
        const auto picks = rank_candidates(s, coarse, coarse, preferred);
        if (picks.empty()) throw Error(Errc::SolverDiverged, "no grid candidate converged");
        auto window = [&](double center) {
            std::vector<double> out;
            for (double e : exps) {
                if (e >= center - 2.0 - 1e-9 && e <= center + 2.0 + 1e-9) out.push_back(e);
            }
            return out;
        };
        c_exps = window(coarse[picks.front().c_index]);
        g_exps = window(coarse[picks.front().g_index]);
    }
    const auto scores = evaluate_grid(prep, domain.dimension(), fold_of, folds, c_exps, g_exps, config);
    evaluated += c_exps.size() * g_exps.size();
    const auto picks = rank_candidates(scores, c_exps, g_exps, preferred);
    if (picks.empty()) throw Error(Errc::SolverDiverged, "no grid candidate converged");

    SearchOutcome out;
    for (const auto& p : picks) {
        out.ranked.push_back(SvrHyperparams{std::pow(10.0, c_exps[p.c_index]),
                                            std::pow(10.0, g_exps[p.g_index]), prep.epsilon});
    }
    const Pick& best = picks.front();
    const std::size_t cand = best.g_index * c_exps.size() + best.c_index;
    auto& r = out.result;
    r.hp = out.ranked.front();
    r.cv_mae = best.mae;
    r.folds = folds;
    r.fold_of = std::move(fold_of);
    r.candidates = evaluated;
    r.out_of_fold.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        r.out_of_fold[i] = prep.scaling.mean + prep.scaling.scale * scores.oof[cand * n + i];
    }
    return out;
}

} // namespace

GridSearchResult grid_search(const Domain& domain, std::span<const Sample> samples,
                             const SvrConfig& config, Rng& rng,
                             std::optional<SvrHyperparams> preferred) {
    return search(domain, samples, config, rng, preferred).result;
}

Fit refit(const SvrModel* previous, const Domain& domain, std::span<const Sample> samples,
          const SvrConfig& config, Rng& rng) {
    std::optional<SvrHyperparams> preferred;
    if (previous != nullptr) preferred = previous->hyperparams();
    auto outcome = search(domain, samples, config, rng, preferred);
    // The winner almost always converges on the full set; if it does not, the
    // next-ranked pair is used and recorded as the selection.
    for (const auto& hp : outcome.ranked) {
        try {
            SvrModel model = train(domain, samples, hp, config);
            outcome.result.hp = hp;
            return Fit{std::move(model), std::move(outcome.result)};
        } catch (const Error& e) {
            if (e.code() != Errc::SolverDiverged) throw;
        }
    }
    throw Error(Errc::SolverDiverged, "no ranked candidate trained on the full set");
}

} // namespace ared

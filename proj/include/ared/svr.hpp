#pragma once

#include "ared/domain.hpp"
#include "ared/random.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ared {

/// epsilon is in standardized dv units.
struct SvrHyperparams {
    double C = 1.0;
    double gamma = 1.0;
    double epsilon = 0.01;

    friend bool operator==(const SvrHyperparams&, const SvrHyperparams&) = default;
};

void validate(const SvrHyperparams& hp);

struct SvrConfig {
    double grid_log10_min = -11.0;
    double grid_log10_max = 11.0;
    double grid_log10_step = 0.5;
    std::size_t cv_folds = 10;
    /// Tube half-width as a fraction of the observed (standardized) dv range.
    double epsilon_fraction = 0.01;
    double solver_tolerance = 1e-6;
    /// Per-solve SMO iteration cap (0 = solver default). Grid cells that hit it are
    /// excluded from selection.
    std::size_t max_solver_iterations = 10000;
    /// Two-stage search: exponent step 2 first, then the fine step within +-2 of the winner.
    bool coarse_to_fine = false;
    /// Worker threads for the grid; 0 = hardware concurrency. Results do not depend on it.
    std::size_t threads = 0;
};

void validate(const SvrConfig& config);

/// Exponent grid {min, min+step, ..., max}.
std::vector<double> grid_exponents(double log10_min, double log10_max, double step);

/// Standardization of the dv: scaled = (y - mean) / scale.
struct DvScaling {
    double mean = 0.0;
    double scale = 1.0;
};

/// Trained epsilon-SVR with RBF kernel. Inputs are normalized to the unit box
/// of the domain and the dv is standardized before training; predict() maps
/// back to engineering units.
class SvrModel {
public:
    SvrModel() = default;
    SvrModel(Domain domain, DvScaling scaling, SvrHyperparams hp,
             std::vector<double> support_unit, std::vector<double> coefficients, double bias,
             std::uint64_t fingerprint, std::size_t training_size);

    /// Prediction in dv units. Points outside the domain are extrapolated.
    double predict(std::span<const double> coords) const;
    /// Decision function on already normalized input, standardized output.
    double decision(std::span<const double> unit_coords) const;
    bool extrapolates(std::span<const double> coords) const { return !domain_.contains(coords); }

    const Domain& domain() const noexcept { return domain_; }
    const DvScaling& scaling() const noexcept { return scaling_; }
    const SvrHyperparams& hyperparams() const noexcept { return hp_; }
    /// Row-major support vectors in normalized coordinates.
    const std::vector<double>& support_unit() const noexcept { return support_unit_; }
    const std::vector<double>& coefficients() const noexcept { return coef_; }
    std::size_t support_count() const noexcept { return coef_.size(); }
    double bias() const noexcept { return bias_; }
    std::uint64_t fingerprint() const noexcept { return fingerprint_; }
    std::size_t training_size() const noexcept { return training_size_; }

private:
    Domain domain_;
    DvScaling scaling_;
    SvrHyperparams hp_;
    std::vector<double> support_unit_;
    std::vector<double> coef_;
    double bias_ = 0.0;
    std::uint64_t fingerprint_ = 0;
    std::size_t training_size_ = 0;
};

/// rbf(x, y) = exp(-gamma * ||x - y||^2) on normalized coordinates.
double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma);

/// FNV-1a over coordinates, values and provenance of the samples.
std::uint64_t training_fingerprint(std::span<const Sample> samples);

/// Mean and population standard deviation of the measured values (scale 1 when constant).
DvScaling dv_scaling(std::span<const Sample> samples);

/// epsilon_fraction times the standardized range of the measured values.
double default_epsilon(std::span<const Sample> samples, const SvrConfig& config);

/// Extra solver diagnostics for tests and logs.
struct TrainReport {
    double dual_objective = 0.0;
    double kkt_gap = 0.0;
    std::size_t iterations = 0;
    double beta_sum = 0.0;
    double max_abs_beta = 0.0;
};

/// Trains on measured samples. Throws InsufficientData (< 2 samples or an
/// unmeasured one) and SolverDiverged.
SvrModel train(const Domain& domain, std::span<const Sample> samples, const SvrHyperparams& hp,
               const SvrConfig& config = {}, TrainReport* report = nullptr);

struct GridSearchResult {
    SvrHyperparams hp;
    double cv_mae = 0.0;              // standardized units
    std::size_t folds = 0;
    std::vector<std::size_t> fold_of; // fold index per sample
    /// Out-of-fold prediction of every sample under the selected pair, dv units.
    std::vector<double> out_of_fold;
    std::size_t candidates = 0;
};

/// K-fold cross-validated grid search over (C, gamma). Fewer samples than
/// folds degrades to leave-one-out. Ties prefer `preferred`, then smaller C,
/// then smaller gamma. Throws InsufficientData below 2 samples.
GridSearchResult grid_search(const Domain& domain, std::span<const Sample> samples,
                             const SvrConfig& config, Rng& rng,
                             std::optional<SvrHyperparams> preferred = std::nullopt);

struct Fit {
    SvrModel model;
    GridSearchResult search;
};

/// Grid search plus training on the full set. The previous model only lends its
/// (C, gamma) as tie-break preference, so the result equals a fresh fit with
/// the same preference and RNG stream.
Fit refit(const SvrModel* previous, const Domain& domain, std::span<const Sample> samples,
          const SvrConfig& config, Rng& rng);

} // namespace ared

#include "ared/smo.hpp"

#include "ared/error.hpp"
#include "ared/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ared {

namespace {

constexpr double kTau = 1e-12;

} // namespace

EpsilonSvrProblem::EpsilonSvrProblem(std::span<const double> kernel, std::size_t n,
                                     std::span<const double> targets, double epsilon)
    : n_(n), epsilon_(epsilon), kernel_(kernel.begin(), kernel.end()),
      targets_(targets.begin(), targets.end()) {
    if (kernel.size() != n * n || targets.size() != n) {
        throw Error(Errc::LengthMismatch, "kernel matrix and targets disagree in size");
    }
    const std::size_t l = 2 * n;
    q_.resize(l * l);
    p_.resize(l);
    for (std::size_t s = 0; s < l; ++s) {
        const double ys = s < n ? 1.0 : -1.0;
        const double* krow = kernel_.data() + (s % n) * n;
        double* qrow = q_.data() + s * l;
        for (std::size_t t = 0; t < l; ++t) {
            const double yt = t < n ? 1.0 : -1.0;
            qrow[t] = ys * yt * krow[t % n];
        }
        p_[s] = s < n ? epsilon - targets_[s] : epsilon + targets_[s - n];
    }
}

SmoSolution EpsilonSvrProblem::solve(double C, const SmoOptions& options,
                                     std::span<const double> warm_alpha) const {
    const std::size_t n = n_;
    const std::size_t l = 2 * n;
    const auto& simd = simd::kernels();
    const std::size_t max_iter =
        options.max_iterations > 0 ? options.max_iterations : std::max<std::size_t>(100000, 100 * l);

    std::vector<double> alpha(l, 0.0);
    std::vector<double> grad(p_);
    if (!warm_alpha.empty()) {
        if (warm_alpha.size() != l) throw Error(Errc::LengthMismatch, "warm start has wrong size");
        for (std::size_t s = 0; s < l; ++s) alpha[s] = std::clamp(warm_alpha[s], 0.0, C);
        for (std::size_t s = 0; s < l; ++s) {
            if (alpha[s] == 0.0) continue;
            const double* qrow = q_.data() + s * l;
            for (std::size_t t = 0; t < l; ++t) grad[t] += alpha[s] * qrow[t];
        }
    }
    auto y = [n](std::size_t s) { return s < n ? 1.0 : -1.0; };
    auto diag = [this, l](std::size_t s) { return q_[s * l + s]; };

    SmoSolution sol;
    std::size_t iter = 0;
    double gap = 0.0;
    for (;;) {
        // First index: maximal violation over I_up.
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = l;
        for (std::size_t t = 0; t < l; ++t) {
            if (t < n) {
                if (alpha[t] < C && -grad[t] >= gmax) {
                    gmax = -grad[t];
                    i = t;
                }
            } else if (alpha[t] > 0.0 && grad[t] >= gmax) {
                gmax = grad[t];
                i = t;
            }
        }
        // Second index: best second-order gain over I_low.
        double gmax2 = -std::numeric_limits<double>::infinity();
        double best_gain = std::numeric_limits<double>::infinity();
        std::size_t j = l;
        const double* qi = i < l ? q_.data() + i * l : nullptr;
        const double yi = i < l ? y(i) : 0.0;
        for (std::size_t t = 0; t < l; ++t) {
            const bool in_low = t < n ? alpha[t] > 0.0 : alpha[t] < C;
            if (!in_low) continue;
            const double yg = y(t) * grad[t];
            gmax2 = std::max(gmax2, yg);
            if (qi == nullptr) continue;
            const double b = gmax + yg;
            if (b > 0.0) {
                double a = diag(i) + diag(t) - 2.0 * yi * y(t) * qi[t];
                if (a <= 0.0) a = kTau;
                const double gain = -(b * b) / a;
                if (gain <= best_gain) {
                    best_gain = gain;
                    j = t;
                }
            }
        }
        gap = gmax + gmax2;
        if (i == l || j == l || gap < options.tolerance) {
            sol.converged = true;
            break;
        }
        if (iter >= max_iter) break;
        ++iter;

        const double* qj = q_.data() + j * l;
        const double old_i = alpha[i];
        const double old_j = alpha[j];
        if (y(i) != y(j)) {
            double quad = diag(i) + diag(j) + 2.0 * qi[j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = C - diff;
                }
            } else if (alpha[j] > C) {
                alpha[j] = C;
                alpha[i] = C + diff;
            }
        } else {
            double quad = diag(i) + diag(j) - 2.0 * qi[j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = sum - C;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > C) {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = sum - C;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        simd.axpy2(grad.data(), qi, qj, alpha[i] - old_i, alpha[j] - old_j, l);
    }

    // Bias from the free variables, or the middle of the feasible interval.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t nr_free = 0;
    for (std::size_t t = 0; t < l; ++t) {
        const double yg = y(t) * grad[t];
        if (alpha[t] >= C) {
            if (y(t) < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (y(t) > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++nr_free;
            sum_free += yg;
        }
    }
    const double rho = nr_free > 0 ? sum_free / static_cast<double>(nr_free) : 0.5 * (ub + lb);

    double primal = 0.0;
    for (std::size_t t = 0; t < l; ++t) primal += alpha[t] * (grad[t] + p_[t]);

    sol.beta.resize(n);
    for (std::size_t k = 0; k < n; ++k) sol.beta[k] = alpha[k] - alpha[n + k];
    sol.alpha = std::move(alpha);
    sol.bias = -rho;
    sol.objective = -0.5 * primal;
    sol.kkt_gap = gap;
    sol.iterations = iter;
    return sol;
}

double svr_dual_objective(std::span<const double> kernel, std::size_t n,
                          std::span<const double> targets, std::span<const double> beta,
                          double epsilon) {
    double quad = 0.0;
    double lin = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += kernel[i * n + j] * beta[j];
        quad += beta[i] * row;
        lin += targets[i] * beta[i] - epsilon * std::abs(beta[i]);
    }
    return lin - 0.5 * quad;
}

} // namespace ared

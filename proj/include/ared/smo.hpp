#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ared {

struct SmoOptions {
    double tolerance = 1e-6;
    /// 0 selects max(100000, 100 * variables).
    std::size_t max_iterations = 0;
};

struct SmoSolution {
    /// 2n dual variables: alpha_i (i < n) and alpha*_i (stored at n + i).
    std::vector<double> alpha;
    /// beta_i = alpha_i - alpha*_i, the expansion coefficients.
    std::vector<double> beta;
    double bias = 0.0;
    /// Maximized dual value D(beta) = z.beta - eps*sum|beta| - beta.K.beta / 2.
    double objective = 0.0;
    /// Maximal KKT violation m(alpha) - M(alpha) at exit.
    double kkt_gap = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Dual of epsilon-insensitive support vector regression on a precomputed
/// kernel matrix, solved by two-variable decomposition (SMO).
///
/// The 2n-variable form is: minimize a.Q.a / 2 + p.a subject to y.a = 0 and
/// 0 <= a <= C, with y = (+1..., -1...), p = (eps - z, eps + z) and
/// Q_st = y_s y_t K(s mod n, t mod n). Working pairs are chosen with the
/// maximal-violation rule for the first index and the second-order gain for
/// the second. The problem object holds Q so it can be re-solved for many C.
class EpsilonSvrProblem {
public:
    /// kernel is an n x n row-major symmetric matrix.
    EpsilonSvrProblem(std::span<const double> kernel, std::size_t n,
                      std::span<const double> targets, double epsilon);

    std::size_t size() const noexcept { return n_; }

    /// warm_alpha, when non-empty, must be a feasible 2n vector for this C
    /// (e.g. the solution for a smaller C).
    SmoSolution solve(double C, const SmoOptions& options,
                      std::span<const double> warm_alpha = {}) const;

private:
    std::size_t n_;
    double epsilon_;
    std::vector<double> kernel_;  // n x n
    std::vector<double> q_;       // 2n x 2n signed
    std::vector<double> p_;       // 2n
    std::vector<double> targets_; // n
};

/// D(beta) evaluated directly from the kernel matrix.
double svr_dual_objective(std::span<const double> kernel, std::size_t n,
                          std::span<const double> targets, std::span<const double> beta,
                          double epsilon);

} // namespace ared

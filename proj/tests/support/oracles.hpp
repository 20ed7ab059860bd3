#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library's solver or metric code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

inline double rbf(const std::vector<double>& a, const std::vector<double>& b, double gamma) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::exp(-gamma * s);
}

inline std::vector<double> gram(const std::vector<std::vector<double>>& pts, double gamma) {
    const std::size_t n = pts.size();
    std::vector<double> k(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) k[i * n + j] = rbf(pts[i], pts[j], gamma);
    return k;
}

// D(beta) = z.beta - eps * sum|beta| - beta.K.beta / 2
inline double dual_value(const std::vector<double>& K, const std::vector<double>& z,
                         const std::vector<double>& beta, double eps) {
    const std::size_t n = z.size();
    double lin = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        lin += z[i] * beta[i] - eps * std::abs(beta[i]);
        for (std::size_t j = 0; j < n; ++j) quad += beta[i] * K[i * n + j] * beta[j];
    }
    return lin - 0.5 * quad;
}

// Dense solve with partial pivoting; nullopt when (near) singular.
inline std::optional<std::vector<double>> solve_linear(std::vector<double> a, std::vector<double> b,
                                                       std::size_t m) {
    for (std::size_t c = 0; c < m; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < m; ++r)
            if (std::abs(a[r * m + c]) > std::abs(a[piv * m + c])) piv = r;
        if (std::abs(a[piv * m + c]) < 1e-11) return std::nullopt;
        if (piv != c) {
            for (std::size_t k = 0; k < m; ++k) std::swap(a[c * m + k], a[piv * m + k]);
            std::swap(b[c], b[piv]);
        }
        for (std::size_t r = c + 1; r < m; ++r) {
            const double f = a[r * m + c] / a[c * m + c];
            for (std::size_t k = c; k < m; ++k) a[r * m + k] -= f * a[c * m + k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(m);
    for (std::size_t r = m; r-- > 0;) {
        double s = b[r];
        for (std::size_t k = r + 1; k < m; ++k) s -= a[r * m + k] * x[k];
        x[r] = s / a[r * m + r];
    }
    return x;
}

struct DualOptimum {
    std::vector<double> beta;
    double bias = 0.0;
    double objective = -std::numeric_limits<double>::infinity();
    bool has_free = false;
};

// Exhaustive active-set enumeration of the epsilon-SVR dual. Every variable is
// at -C, in (-C, 0), at 0, in (0, C) or at C; for each of the 5^n patterns the
// stationarity equations of the free variables plus sum(beta) = 0 are solved,
// infeasible or singular patterns are dropped, and the best feasible point
// wins. The optimum is one of these points, so the maximum is exact up to
// round-off. Practical for n <= 8.
inline DualOptimum brute_force_svr_dual(const std::vector<double>& K, const std::vector<double>& z,
                                        double eps, double C) {
    const std::size_t n = z.size();
    std::size_t patterns = 1;
    for (std::size_t i = 0; i < n; ++i) patterns *= 5;
    DualOptimum best;
    std::vector<int> state(n);
    const double feas = 1e-9 * std::max(1.0, C);
    for (std::size_t code = 0; code < patterns; ++code) {
        std::size_t c = code;
        std::vector<std::size_t> free;
        std::vector<double> beta(n, 0.0);
        double fixed_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            state[i] = static_cast<int>(c % 5) - 2; // -2 at -C, -1 free neg, 0 zero, 1 free pos, 2 at C
            c /= 5;
            if (state[i] == -2) beta[i] = -C;
            if (state[i] == 2) beta[i] = C;
            if (state[i] == -1 || state[i] == 1) free.push_back(i);
            fixed_sum += beta[i];
        }
        double bias = 0.0;
        if (!free.empty()) {
            // Unknowns: beta_free..., b. Rows: (K beta)_i + b = z_i - s_i eps; sum beta = 0.
            const std::size_t m = free.size() + 1;
            std::vector<double> a(m * m, 0.0), rhs(m, 0.0);
            for (std::size_t r = 0; r < free.size(); ++r) {
                const std::size_t i = free[r];
                double known = 0.0;
                for (std::size_t j = 0; j < n; ++j) known += K[i * n + j] * beta[j];
                for (std::size_t q = 0; q < free.size(); ++q) a[r * m + q] = K[i * n + free[q]];
                a[r * m + free.size()] = 1.0;
                rhs[r] = z[i] - (state[i] > 0 ? eps : -eps) - known;
            }
            for (std::size_t q = 0; q < free.size(); ++q) a[free.size() * m + q] = 1.0;
            rhs[free.size()] = -fixed_sum;
            auto x = solve_linear(a, rhs, m);
            if (!x) continue;
            bool ok = true;
            for (std::size_t q = 0; q < free.size(); ++q) {
                const double v = (*x)[q];
                const std::size_t i = free[q];
                if (state[i] > 0 && (v < -feas || v > C + feas)) ok = false;
                if (state[i] < 0 && (v > feas || v < -C - feas)) ok = false;
                beta[i] = std::clamp(v, -C, C);
            }
            if (!ok) continue;
            bias = (*x)[free.size()];
        } else if (std::abs(fixed_sum) > feas) {
            continue;
        }
        double sum = 0.0;
        for (double b : beta) sum += b;
        if (std::abs(sum) > 1e-7 * std::max(1.0, C)) continue;
        const double d = dual_value(K, z, beta, eps);
        if (d > best.objective) {
            best.objective = d;
            best.beta = beta;
            best.bias = bias;
            best.has_free = !free.empty();
        }
    }
    if (best.beta.empty()) return best;
    // Bias from the KKT conditions: the mean residual over strictly free
    // variables, else the midpoint of the interval left by the bound ones.
    const double tol = 1e-9 * std::max(1.0, C);
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = 0.0;
        for (std::size_t j = 0; j < n; ++j) f += K[i * n + j] * best.beta[j];
        const double r = z[i] - f;
        const double b = best.beta[i];
        if (std::abs(b) > tol && std::abs(b) < C - tol) {
            free_sum += b > 0 ? r - eps : r + eps;
            ++free_count;
        } else if (std::abs(b) <= tol) {
            lo = std::max(lo, r - eps);
            hi = std::min(hi, r + eps);
        } else if (b > 0) {
            hi = std::min(hi, r - eps);
        } else {
            lo = std::max(lo, r + eps);
        }
    }
    best.has_free = free_count > 0;
    if (free_count > 0) {
        best.bias = free_sum / static_cast<double>(free_count);
    } else {
        best.bias = std::isfinite(lo) && std::isfinite(hi) ? 0.5 * (lo + hi) : (std::isfinite(lo) ? lo : hi);
    }
    return best;
}

// Two-sample dual: beta = (t, -t). Dense grid over t in [-C, C] followed by
// golden-section refinement of the best bracket.
inline double two_point_dual_argmax(double k11, double k22, double k12, double z1, double z2,
                                    double eps, double C) {
    auto d = [&](double t) {
        return (z1 - z2) * t - 2.0 * eps * std::abs(t) - 0.5 * t * t * (k11 + k22 - 2.0 * k12);
    };
    const int steps = 200000;
    double best_t = -C, best = d(-C);
    for (int s = 1; s <= steps; ++s) {
        const double t = -C + 2.0 * C * s / steps;
        if (d(t) > best) {
            best = d(t);
            best_t = t;
        }
    }
    double a = std::max(-C, best_t - 2.0 * C / steps), b = std::min(C, best_t + 2.0 * C / steps);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200; ++it) {
        const double x1 = b - g * (b - a), x2 = a + g * (b - a);
        if (d(x1) < d(x2)) a = x1; else b = x2;
    }
    return 0.5 * (a + b);
}

inline double naive_mae(const std::vector<double>& p, const std::vector<double>& a) {
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - a[i]);
    return s / p.size();
}

inline double naive_mape(const std::vector<double>& p, const std::vector<double>& a) {
    double s = 0;
    int c = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (a[i] == 0) continue;
        s += std::fabs((p[i] - a[i]) / a[i]) * 100;
        ++c;
    }
    return c ? s / c : 0;
}

inline double naive_r(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double cxy = 0, vx = 0, vy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cxy += (x[i] - mx) * (y[i] - my);
        vx += (x[i] - mx) * (x[i] - mx);
        vy += (y[i] - my) * (y[i] - my);
    }
    return cxy / std::sqrt(vx * vy);
}

} // namespace oracle

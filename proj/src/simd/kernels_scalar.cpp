#include "ared/simd/kernels.hpp"

#include <cmath>

namespace ared::simd::detail {

namespace {

void squared_distances(const double* points, std::size_t n, std::size_t dim, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i * n + i] = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double diff = points[i * dim + d] - points[j * dim + d];
                s += diff * diff;
            }
            out[i * n + j] = s;
            out[j * n + i] = s;
        }
    }
}

void rbf_from_sqdist(const double* sqdist, std::size_t count, double gamma, double* out) {
    for (std::size_t k = 0; k < count; ++k) out[k] = std::exp(-gamma * sqdist[k]);
}

double rbf_expansion(const double* sv, std::size_t n_sv, std::size_t dim, const double* coef,
                     const double* x, double gamma) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n_sv; ++i) {
        double s = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double diff = sv[i * dim + d] - x[d];
            s += diff * diff;
        }
        sum += coef[i] * std::exp(-gamma * s);
    }
    return sum;
}

void axpy2(double* g, const double* u, const double* w, double a, double b, std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) g[k] += a * u[k] + b * w[k];
}

} // namespace

const KernelTable& scalar_table() noexcept {
    static const KernelTable table{Isa::scalar, squared_distances, rbf_from_sqdist,
                                   rbf_expansion, axpy2};
    return table;
}

} // namespace ared::simd::detail

// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include "ared/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace ared::simd::detail {

namespace {

// exp(x) for four lanes: Cody-Waite reduction by ln2 then a degree-13 Taylor
// polynomial on |r| <= ln2/2. Lanes below -708.39 flush to zero.
inline __m256d exp4(__m256d x) {
    const __m256d lo_limit = _mm256_set1_pd(-708.39);
    const __m256d hi_limit = _mm256_set1_pd(709.7);
    const __m256d underflow = _mm256_cmp_pd(x, lo_limit, _CMP_LT_OQ);
    x = _mm256_max_pd(_mm256_min_pd(x, hi_limit), lo_limit);

    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-01), x);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);

    __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

    const __m128i ni = _mm256_cvtpd_epi32(n);
    __m256i bits = _mm256_add_epi64(_mm256_cvtepi32_epi64(ni), _mm256_set1_epi64x(1023));
    bits = _mm256_slli_epi64(bits, 52);
    const __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
    return _mm256_andnot_pd(underflow, result);
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline __m256d gather4(const double* base, std::size_t stride) {
    return _mm256_set_pd(base[3 * stride], base[2 * stride], base[stride], base[0]);
}

void squared_distances(const double* points, std::size_t n, std::size_t dim, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* pi = points + i * dim;
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
            __m256d s = _mm256_setzero_pd();
            for (std::size_t d = 0; d < dim; ++d) {
                const __m256d diff =
                    _mm256_sub_pd(gather4(points + j * dim + d, dim), _mm256_set1_pd(pi[d]));
                s = _mm256_fmadd_pd(diff, diff, s);
            }
            _mm256_storeu_pd(out + i * n + j, s);
        }
        for (; j < n; ++j) {
            double s = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double diff = points[j * dim + d] - pi[d];
                s = std::fma(diff, diff, s);
            }
            out[i * n + j] = s;
        }
        out[i * n + i] = 0.0;
    }
}

void rbf_from_sqdist(const double* sqdist, std::size_t count, double gamma, double* out) {
    const __m256d neg_gamma = _mm256_set1_pd(-gamma);
    std::size_t k = 0;
    for (; k + 4 <= count; k += 4) {
        const __m256d s = _mm256_loadu_pd(sqdist + k);
        _mm256_storeu_pd(out + k, exp4(_mm256_mul_pd(neg_gamma, s)));
    }
    if (k < count) {
        alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t t = 0; k + t < count; ++t) buf[t] = sqdist[k + t];
        alignas(32) double res[4];
        _mm256_store_pd(res, exp4(_mm256_mul_pd(neg_gamma, _mm256_load_pd(buf))));
        for (std::size_t t = 0; k + t < count; ++t) out[k + t] = res[t];
    }
}

double rbf_expansion(const double* sv, std::size_t n_sv, std::size_t dim, const double* coef,
                     const double* x, double gamma) {
    const __m256d neg_gamma = _mm256_set1_pd(-gamma);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n_sv; i += 4) {
        __m256d s = _mm256_setzero_pd();
        for (std::size_t d = 0; d < dim; ++d) {
            const __m256d diff = _mm256_sub_pd(gather4(sv + i * dim + d, dim), _mm256_set1_pd(x[d]));
            s = _mm256_fmadd_pd(diff, diff, s);
        }
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(coef + i), exp4(_mm256_mul_pd(neg_gamma, s)), acc);
    }
    if (i < n_sv) {
        alignas(32) double sq[4] = {0.0, 0.0, 0.0, 0.0};
        alignas(32) double cf[4] = {0.0, 0.0, 0.0, 0.0};
        for (std::size_t t = 0; i + t < n_sv; ++t) {
            double s = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double diff = sv[(i + t) * dim + d] - x[d];
                s = std::fma(diff, diff, s);
            }
            sq[t] = s;
            cf[t] = coef[i + t];
        }
        const __m256d e = exp4(_mm256_mul_pd(neg_gamma, _mm256_load_pd(sq)));
        acc = _mm256_fmadd_pd(_mm256_load_pd(cf), e, acc);
    }
    return hsum(acc);
}

void axpy2(double* g, const double* u, const double* w, double a, double b, std::size_t count) {
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    std::size_t k = 0;
    for (; k + 4 <= count; k += 4) {
        __m256d acc = _mm256_loadu_pd(g + k);
        acc = _mm256_fmadd_pd(va, _mm256_loadu_pd(u + k), acc);
        acc = _mm256_fmadd_pd(vb, _mm256_loadu_pd(w + k), acc);
        _mm256_storeu_pd(g + k, acc);
    }
    for (; k < count; ++k) g[k] = std::fma(b, w[k], std::fma(a, u[k], g[k]));
}

} // namespace

const KernelTable& avx2_table() noexcept {
    static const KernelTable table{Isa::avx2, squared_distances, rbf_from_sqdist, rbf_expansion,
                                   axpy2};
    return table;
}

} // namespace ared::simd::detail

#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

// Data-parallel inner loops of the surrogate: pairwise squared distances,
// elementwise RBF evaluation, kernel expansions and the SMO gradient update.
// Each loop has a portable scalar reference and an AVX2+FMA variant; the
// variant is picked once at runtime from CPUID and can be pinned with the
// ARED_SIMD environment variable ("scalar" or "avx2").

namespace ared::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
    Isa isa;

    /// out[i*n + j] = ||p_i - p_j||^2 for row-major points p (n x dim).
    void (*squared_distances)(const double* points, std::size_t n, std::size_t dim, double* out);

    /// out[k] = exp(-gamma * sqdist[k]). In-place use (out == sqdist) is allowed.
    void (*rbf_from_sqdist)(const double* sqdist, std::size_t count, double gamma, double* out);

    /// sum_i coef[i] * exp(-gamma * ||sv_i - x||^2) over row-major sv (n_sv x dim).
    double (*rbf_expansion)(const double* sv, std::size_t n_sv, std::size_t dim,
                            const double* coef, const double* x, double gamma);

    /// g[k] += a * u[k] + b * w[k]
    void (*axpy2)(double* g, const double* u, const double* w, double a, double b,
                  std::size_t count);
};

bool cpu_supports(Isa isa) noexcept;

/// Variant in use: ARED_SIMD override if set and supported, else the best supported.
Isa active_isa() noexcept;

/// Pins the variant for the rest of the process (tests, benchmarks). nullopt restores
/// automatic selection. Requests for an unsupported ISA fall back to scalar.
void force_isa(std::optional<Isa> isa) noexcept;

const KernelTable& kernels() noexcept;
const KernelTable& kernels(Isa isa) noexcept;

namespace detail {
const KernelTable& scalar_table() noexcept;
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table() noexcept;
#endif
} // namespace detail

} // namespace ared::simd

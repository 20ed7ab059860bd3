#include "ared/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace ared::simd {

namespace {

// -1: automatic; otherwise the forced Isa value.
std::atomic<int> g_forced{-1};

Isa best_supported() noexcept {
    return cpu_supports(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

Isa from_environment() noexcept {
    static const Isa chosen = [] {
        const char* env = std::getenv("ARED_SIMD");
        if (env != nullptr) {
            const std::string_view v(env);
            if (v == "scalar") return Isa::scalar;
            if (v == "avx2" && cpu_supports(Isa::avx2)) return Isa::avx2;
        }
        return best_supported();
    }();
    return chosen;
}

} // namespace

std::string_view to_string(Isa isa) noexcept {
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

bool cpu_supports(Isa isa) noexcept {
    switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    }
    return false;
}

Isa active_isa() noexcept {
    const int forced = g_forced.load(std::memory_order_relaxed);
    if (forced >= 0) return static_cast<Isa>(forced);
    return from_environment();
}

void force_isa(std::optional<Isa> isa) noexcept {
    if (!isa) {
        g_forced.store(-1, std::memory_order_relaxed);
        return;
    }
    const Isa effective = cpu_supports(*isa) ? *isa : Isa::scalar;
    g_forced.store(static_cast<int>(effective), std::memory_order_relaxed);
}

const KernelTable& kernels(Isa isa) noexcept {
#if defined(__x86_64__) || defined(_M_X64)
    if (isa == Isa::avx2 && cpu_supports(Isa::avx2)) return detail::avx2_table();
#endif
    (void)isa;
    return detail::scalar_table();
}

const KernelTable& kernels() noexcept { return kernels(active_isa()); }

} // namespace ared::simd

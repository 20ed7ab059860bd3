#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace ared {

/// Session-owned random stream.
///
/// Wraps std::mt19937_64 (whose output sequence is fixed by the standard)
/// and derives uniforms, normals and bounded integers by hand so that the
/// draw sequence does not depend on the standard library vendor. The full
/// engine state round-trips through a text string.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal via the Box-Muller transform, one value per call.
    double normal();
    double normal(double mu, double sigma) { return mu + sigma * normal(); }
    /// Uniform integer in [0, bound), unbiased by rejection.
    std::uint64_t below(std::uint64_t bound);

    std::string state() const;
    void set_state(const std::string& text);

    friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace ared

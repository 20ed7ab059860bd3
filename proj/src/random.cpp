#include "ared/random.hpp"

#include "ared/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace ared {

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
}

std::string Rng::state() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
}

void Rng::set_state(const std::string& text) {
    std::istringstream is(text);
    std::mt19937_64 e;
    is >> e;
    if (is.fail()) throw Error(Errc::CorruptDocument, "unreadable RNG state");
    engine_ = e;
}

} // namespace ared

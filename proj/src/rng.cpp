#include "tollsplit/rng.hpp"

#include <cmath>

namespace tollsplit {

double Rng::exponential(double rate) { return -std::log1p(-uniform()) / rate; }

std::uint64_t Rng::below(std::uint64_t n) {
    // Rejection on the low end keeps x % n unbiased.
    const std::uint64_t limit = -n % n;
    for (;;) {
        const std::uint64_t x = engine_();
        if (x >= limit) return x % n;
    }
}

}  // namespace tollsplit

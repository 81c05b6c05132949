#pragma once

#include <cstdint>
#include <random>

namespace tollsplit {

// splitmix64 finalizer; used to derive independent stream seeds from a master seed.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix64(mix64(master) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t domain, std::uint64_t stream) {
    return derive_seed(derive_seed(master, domain), stream);
}

// Stream domains.
inline constexpr std::uint64_t kArrivalDomain = 1;
inline constexpr std::uint64_t kSizeDomain = 2;
inline constexpr std::uint64_t kReplicationDomain = 3;
inline constexpr std::uint64_t kHuntDomain = 4;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1) with 53 random bits. Written out so draws do not depend on
    // the standard library's distribution implementations.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double exponential(double rate);
    std::uint64_t below(std::uint64_t n);  // uniform on [0, n)
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace tollsplit

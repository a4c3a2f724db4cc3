#include "napmin/rng.hpp"

#include <cmath>

namespace napmin {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) : root_(seed) {
    std::uint64_t s = seed;
    engine_.seed(splitmix64(s));
}

Rng Rng::split(std::uint64_t label) const {
    std::uint64_t s = root_;
    std::uint64_t a = splitmix64(s);
    s = a ^ (label * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    return Rng(splitmix64(s));
}

double Rng::uniform01() {
    // 53-bit mantissa; avoids distribution-object portability concerns.
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

std::uint64_t Rng::uniform_int(std::uint64_t n) {
    // Rejection sampling for an unbiased draw in [0, n).
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = engine_();
    } while (v >= limit);
    return v % n;
}

double Rng::normal(double mean, double stddev) {
    // Box-Muller on our own uniforms keeps the stream portable across
    // standard-library implementations.
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(6.283185307179586477 * u2);
}

bool Rng::bernoulli(double p) {
    return uniform01() < p;
}

}  // namespace napmin

#pragma once

#include <cstdint>
#include <random>

namespace napmin {

// All randomness in the artifact flows through this wrapper. Seeds are expanded
// with SplitMix64 so that derived streams (per trial, per row, per restart) are
// decorrelated and independent of thread scheduling.
std::uint64_t splitmix64(std::uint64_t& state);

class Rng {
public:
    explicit Rng(std::uint64_t seed);

    // Derive an independent stream identified by a label. Deterministic in
    // (seed, label); used to give each subtask its own generator so that
    // parallel execution cannot reorder draws.
    Rng split(std::uint64_t label) const;

    double uniform01();                          // [0, 1)
    double uniform(double lo, double hi);        // [lo, hi)
    std::uint64_t uniform_int(std::uint64_t n);  // [0, n)
    double normal(double mean, double stddev);
    bool bernoulli(double p);

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t root_;
    std::mt19937_64 engine_;
};

}  // namespace napmin

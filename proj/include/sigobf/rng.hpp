#pragma once

#include <cstdint>
#include <random>

#include "sigobf/types.hpp"

namespace sigobf {

// Seeded generator with a platform-independent Gaussian sampler, so that
// datasets are byte-identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53 bits of resolution.
    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t next_u64() noexcept { return engine_(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) noexcept;

    double gaussian() noexcept;

    // Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    cplx complex_gaussian(double variance) noexcept;

    int bit() noexcept { return static_cast<int>(engine_() >> 63); }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// SplitMix64 finalizer over (master, index); used to give every frame or
// sweep point an independent stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

} // namespace sigobf

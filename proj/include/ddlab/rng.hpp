#pragma once

#include <cstdint>

namespace ddlab {

// SplitMix64 finalizer. Stateless avalanche of a 64-bit word.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Derives an independent generator state for one simulated path.
// Identical across platforms and independent of evaluation order, so any
// path can be regenerated in isolation from (base_seed, path_index).
std::uint64_t seed_for_path(std::uint64_t base_seed, std::uint64_t path_index) noexcept;

// Inverse of the standard normal CDF (Wichura's PPND16, ~1e-15 accurate).
double inv_normal_cdf(double p);

// Standard normal CDF.
double normal_cdf(double x);

// Counter-based uniform/normal stream: draw j is a pure function of
// (state, j). Gaussians come from the inverse CDF so the stream is
// bit-stable across platforms (no rejection sampling).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t state) noexcept : state_(state), counter_(0) {}
    CounterRng(std::uint64_t base_seed, std::uint64_t path_index) noexcept
        : CounterRng(seed_for_path(base_seed, path_index)) {}

    std::uint64_t next_u64() noexcept;
    // Uniform on (0,1), never returns 0 or 1.
    double next_uniform() noexcept;
    double next_normal() noexcept;

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t state_;
    std::uint64_t counter_;
};

}  // namespace ddlab

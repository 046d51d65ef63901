#pragma once

// Reproducible Rayleigh fading draws. Every trial owns a generator whose
// state is a pure function of (master_seed, trial_index), so a realization
// never depends on which worker produced it or in what order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>

#include "noma/core.hpp"

namespace noma {

struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t trial_index = 0;
};

namespace detail {

// SplitMix64 finalizer (Steele, Lea and Flood).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// SplitMix64 stream keyed by a SeedSpec. Satisfies UniformRandomBitGenerator.
class TrialStream {
public:
    using result_type = std::uint64_t;

    explicit constexpr TrialStream(SeedSpec seed)
        : state_(detail::mix64(detail::mix64(seed.master_seed) +
                               detail::mix64(seed.trial_index ^ 0x6a09e667f3bcc909ULL))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }

    constexpr result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return detail::mix64(state_);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Unit-mean exponential by inversion.
    double exponential() { return -std::log1p(-uniform()); }

private:
    std::uint64_t state_;
};

/// Fills `out` with one realization; h2 is resized to params.m and sorted.
inline void sample_realization(const SystemParams& params, SeedSpec seed, ChannelRealization& out) {
    TrialStream rng(seed);
    out.g2 = rng.exponential();
    out.h2.resize(params.m);
    for (double& h : out.h2) h = rng.exponential();
    std::sort(out.h2.begin(), out.h2.end());
}

inline ChannelRealization sample_realization(const SystemParams& params, SeedSpec seed) {
    ChannelRealization ch;
    sample_realization(params, seed, ch);
    return ch;
}

}  // namespace noma

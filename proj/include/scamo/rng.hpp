#pragma once

#include <cstdint>
#include <random>

namespace scamo {

/// Portable seeded generator. The integer stream is std::mt19937_64, whose
/// output sequence is fixed by the C++ standard; the conversions below are
/// spelled out here rather than delegated to the implementation-defined
/// std distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), unbiased by rejection.
    std::uint64_t below(std::uint64_t n);

    /// Standard normal by Box-Muller; the second variate is cached.
    double normal();

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace scamo

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ellreg/grid.hpp"

namespace ellreg {

/// Seeded mt19937_64 stream. Draws are produced by hand from raw engine
/// output so that the sequence does not depend on the standard library's
/// distribution implementations. Independent streams come from `split`.
class Rng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64/seed_seq(seed,stream); uniform=(x>>11+0.5)*2^-53; normal=Box-Muller";

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    Rng split(std::uint64_t stream) const { return Rng(seed_, stream + 1); }

    /// Uniform on (0, 1).
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [lo, hi].
    int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }
    double normal() {
        const double u = uniform(), v = uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * kPi * v);
    }
    cplx complex_normal() {
        const double a = normal();
        return {a, normal()};
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace ellreg

#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "slantkit/linalg.hpp"

namespace slantkit {

inline constexpr std::uint64_t default_seed = 20240601;

// Derives an independent stream seed from a base seed and up to two indices, so
// per-point / per-trial draws do not depend on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

    Vec gaussian(Eigen::Index n) {
        std::normal_distribution<double> normal(0.0, 1.0);
        Vec v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(engine_);
        return v;
    }

    // Unit vector (in g) drawn uniformly from the span of g-orthonormal columns.
    Vec unit_in(const Mat& orthonormal_cols) {
        Vec c = gaussian(orthonormal_cols.cols());
        while (c.norm() < 1e-8) c = gaussian(orthonormal_cols.cols());
        return orthonormal_cols * (c / c.norm());
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace slantkit

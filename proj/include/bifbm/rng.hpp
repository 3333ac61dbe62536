#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace bifbm {

/// Name and version of the normal-variate algorithm. Bump on any change that
/// alters the stream for a given seed.
inline constexpr const char* kNormalStreamId = "bifbm-normal-v1";

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Per-task seed: seed XOR hash(path_index, component_index).
///
/// hash(p, c) = splitmix64(splitmix64(p + 1) ^ (c * 0x9E3779B97F4A7C15 + 0xD1B54A32D192ED03)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t path_index, std::uint64_t component_index) noexcept;

/// Reproducible standard-normal stream (bifbm-normal-v1).
///
/// std::mt19937_64 seeded with splitmix64(seed), 53-bit uniforms on (0,1],
/// Box-Muller pairs (cosine branch first). Every step is fixed by the C++
/// standard or by this file, so the stream is identical across library vendors.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed);

    double operator()();
    void fill(std::span<double> out);
    /// Uniform on (0, 1].
    double uniform();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace bifbm

#include "bifbm/rng.hpp"

#include <cmath>
#include <numbers>

namespace bifbm {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t path_index, std::uint64_t component_index) noexcept {
    const std::uint64_t h =
        splitmix64(splitmix64(path_index + 1) ^ (component_index * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL));
    return seed ^ h;
}

NormalStream::NormalStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

double NormalStream::uniform() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double NormalStream::operator()() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

void NormalStream::fill(std::span<double> out) {
    for (double& v : out) {
        v = (*this)();
    }
}

}  // namespace bifbm

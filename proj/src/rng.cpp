#include "znsim/rng.h"

#include <cmath>
#include <numbers>

namespace znsim {

namespace {

// Finalizer of the splitmix64 generator; a strong 64-bit mixer.
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

} // namespace

std::uint64_t RngStream::derive_state(std::uint64_t seed, std::uint64_t stream_index) {
    // Two mixing rounds decorrelate nearby (seed, index) pairs.
    return mix64(mix64(seed + kGolden) + (stream_index + 1) * kGolden);
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

double RngStream::exponential() {
    return -std::log(uniform());
}

} // namespace znsim

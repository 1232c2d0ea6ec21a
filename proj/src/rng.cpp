#include "seqrar/rng.hpp"

#include <cmath>

namespace seqrar {

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
} // namespace

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    return mix64(master_seed + kGolden * (index + 1));
}

Rng::Rng(std::uint64_t seed) {
    // splitmix64 stream fills the state; all-zero state is unreachable
    std::uint64_t x = seed;
    for (auto& s : s_) {
        x += kGolden;
        s = mix64(x);
    }
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    // Box-Muller; u is bumped off exact zero so log() stays finite
    double u = uniform();
    if (u <= 0.0) u = 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u));
    double theta = 6.283185307179586477 * uniform();
    cached_normal_ = r * std::sin(theta);
    has_cached_normal_ = true;
    return r * std::cos(theta);
}

std::uint64_t Rng::below(std::uint64_t bound) {
    // rejection sampling, no modulo bias
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        std::uint64_t r = next_u64();
        if (r >= threshold) return r % bound;
    }
}

} // namespace seqrar

#pragma once

#include <cstdint>
#include <vector>

namespace seqrar {

// splitmix64 finalizer; also used to derive per-replication seeds.
std::uint64_t mix64(std::uint64_t x);

// Seed for replication `index` under a master seed. Stable across versions:
// reports quote the master seed and every replication is reproducible from it.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

// xoshiro256** seeded via splitmix64. Hand-rolled so the draw sequence is
// bit-exact for a given seed regardless of standard-library implementation.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // uniform on [0,1) with 53 random bits
    double uniform();

    bool bernoulli(double p) { return uniform() < p; }

    // standard normal via Box-Muller; the paired draw is cached
    double normal();

    // unbiased integer on [0, bound), bound >= 1
    std::uint64_t below(std::uint64_t bound);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            T tmp = v[i - 1];
            v[i - 1] = v[j];
            v[j] = tmp;
        }
    }

  private:
    std::uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

} // namespace seqrar

#ifndef STEPREG_RNG_HPP
#define STEPREG_RNG_HPP

#include <cstdint>

namespace stepreg {

// splitmix64 finalizer. Used to expand seeds and to derive independent
// stream seeds; never used as the main generator.
std::uint64_t mix64(std::uint64_t x);

// Deterministic seed for an independent stream identified by (a, b),
// e.g. (sample size, replication index). No global state anywhere.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

// xoshiro256++ with explicit seeding. Distributions are implemented here
// rather than via <random> so that a seed fixes the byte-exact output
// stream independent of the standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();

    // Uniform on [0,1) with 53-bit resolution.
    double uniform01();

    // Standard normal via Box-Muller; the paired deviate is cached.
    double normal();

    // Uniform on {0, ..., bound-1}, unbiased (rejection). bound >= 1.
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace stepreg

#endif

#ifndef AEPLAB_RNG_HPP
#define AEPLAB_RNG_HPP

#include <cstdint>

namespace aeplab {

// Counter-based generator in the splitmix64 family.  Output i depends only on
// (seed, i), so a fixed seed reproduces the identical stream on every platform
// regardless of how many values earlier callers consumed from other instances.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64() { return at(counter_++); }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Stateless access: value of the stream at position i.
    std::uint64_t at(std::uint64_t i) const {
        std::uint64_t z = seed_ + (i + 1) * 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace aeplab

#endif

#ifndef CDOLD_RNG_HPP
#define CDOLD_RNG_HPP

#include <cstdint>

namespace cdold {

// Stateless counter-based generator: every variate is a hash of
// (seed, sample_index, name_index, draw_index).  Streams are independent per
// coordinate, so results do not depend on how samples are split across
// workers.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t word(std::uint64_t sample, std::uint64_t name, std::uint64_t draw) const {
        std::uint64_t z = seed_;
        z = mix(z + 0x9E3779B97F4A7C15ULL * (sample + 1));
        z = mix(z + 0xC2B2AE3D27D4EB4FULL * (name + 1));
        z = mix(z + 0x165667B19E3779F9ULL * (draw + 1));
        return z;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform(std::uint64_t sample, std::uint64_t name, std::uint64_t draw) const {
        return static_cast<double>(word(sample, name, draw) >> 11) * 0x1.0p-53;
    }

  private:
    // SplitMix64 finalizer.
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t seed_;
};

}  // namespace cdold

#endif

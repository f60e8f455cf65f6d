#pragma once

#include <cstdint>

namespace wfsim {

// Deterministic splittable random stream built on the splitmix64 generator.
// Every run of a sampling experiment draws from its own child stream, derived
// from the master seed and the run index alone, so results are byte-identical
// no matter how runs are scheduled.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed), origin_(seed) {}

    // Next raw 64-bit draw.
    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    // Uniform double in [0, 1) with 53 bits of precision.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Independent child stream for the given index.  Children of distinct
    // indices (and of distinct parents) do not collide in practice: the
    // origin seed and index are pushed through two rounds of the finalizer.
    RngStream child(std::uint64_t index) const {
        std::uint64_t h = mix64(origin_ + 0x9E3779B97F4A7C15ULL);
        h = mix64(h ^ mix64(index + 0xBF58476D1CE4E5B9ULL));
        return RngStream(h, h);
    }

    std::uint64_t origin() const { return origin_; }

private:
    RngStream(std::uint64_t seed, std::uint64_t origin)
        : state_(seed), origin_(origin) {}

    // Stafford/splitmix64 finalizer: bijective avalanche on 64 bits.
    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    std::uint64_t origin_;
};

}  // namespace wfsim

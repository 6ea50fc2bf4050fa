#pragma once

#include <cstdint>

namespace kloostpath {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Seedable counter-based generator.  Sequential draws walk a splitmix64
// stream; stream_draw gives random access by (stream, index) so that draws
// attached to a frequency are reproducible independently of evaluation order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(splitmix64(seed ^ 0x6a09e667f3bcc909ull)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return splitmix64(state_);
    }

    // uniform in [0, 1)
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, bound)
    std::uint64_t next_below(std::uint64_t bound) {
        // rejection keeps the distribution exactly uniform
        std::uint64_t limit = ~0ull - ~0ull % bound;
        std::uint64_t v;
        do { v = next_u64(); } while (v >= limit);
        return v % bound;
    }

    static std::uint64_t stream_draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
        return splitmix64(splitmix64(seed ^ splitmix64(stream)) + index);
    }

    static double stream_unit(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
        return static_cast<double>(stream_draw(seed, stream, index) >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

} // namespace kloostpath

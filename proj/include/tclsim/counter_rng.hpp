#pragma once

// Stateless counter-based random numbers. A draw is a pure function of
// (seed, stream, counter), so parallel scheduling or evaluation order cannot
// change the value any load sees.

#include <cstdint>

namespace tclsim {

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept
{
    std::uint64_t z = splitmix64(seed ^ 0x6A09E667F3BCC909ULL);
    z = splitmix64(z ^ (stream * 0xD1B54A32D192ED03ULL));
    z = splitmix64(z ^ (counter * 0x8CB92BA72F3D8DD7ULL));
    return z;
}

/// Uniform double in the open interval (0, 1).
constexpr double to_unit_open(std::uint64_t bits) noexcept
{
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

constexpr double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept
{
    return to_unit_open(counter_hash(seed, stream, counter));
}

/// Sequential view over one stream.
class CounterStream {
public:
    constexpr CounterStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter = 0) noexcept
        : seed_(seed), stream_(stream), counter_(counter) {}

    constexpr double uniform() noexcept { return counter_uniform(seed_, stream_, counter_++); }
    constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_;
};

}  // namespace tclsim

#pragma once

#include <cstdint>

namespace mlsteg {

// SplitMix64 (Steele, Lea & Flood). Every random decision in a run is drawn
// from one of these, so a run is a pure function of its seed:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// uniform() maps the top 53 bits of the next output onto [0, 1).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept
    {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

/// Independent sub-stream seeds for one run.
enum class SeedPurpose : std::uint64_t {
    start_seq = 1,
    overt_payload = 2,
    selection = 3,
    channel = 4,
    message = 5,
    key = 6,
    fault = 7,
};

/// First output of SplitMix64 seeded with `seed ^ (purpose * golden gamma)`.
inline std::uint64_t derive_seed(std::uint64_t seed, SeedPurpose purpose) noexcept
{
    SplitMix64 g(seed ^ (static_cast<std::uint64_t>(purpose) * 0x9E3779B97F4A7C15ULL));
    return g.next();
}

} // namespace mlsteg

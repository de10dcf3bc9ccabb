#ifndef PTWA_RANDOM_HPP
#define PTWA_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ptwa {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stream identifier for a pair of counters (e.g. step and agent).
constexpr std::uint64_t stream_key(std::uint64_t a, std::uint64_t b) noexcept
{
    return mix64(a ^ 0x632be59bd9b4e019ULL) ^ b;
}

/// Counter-based SplitMix64 stream. Streams for distinct (seed, stream) pairs
/// are independent of each other and of evaluation order, which is what
/// makes parallel runs reproducible.
class StreamRng
{
public:
    StreamRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : state_(mix64(mix64(seed) ^ mix64(stream ^ 0xd1b54a32d192ed03ULL)))
    {
    }

    std::uint64_t next_u64() noexcept
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept
    {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal by Box-Muller; the second variate is kept for the next call.
    double normal() noexcept
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace ptwa

#endif // PTWA_RANDOM_HPP

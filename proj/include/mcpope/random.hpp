#pragma once

#include <cstdint>
#include <random>

namespace mcpope {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of an independent stream derived from `seed`:
/// splitmix64(splitmix64(seed) ^ stream). Worker w of a parallel run uses stream w.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
    return splitmix64(splitmix64(seed) ^ stream);
}

/// 64-bit Mersenne Twister whose uniform draws never touch 0 or 1.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// (top 53 bits + 1/2) * 2^-53, so the result lies in [2^-54, 1 - 2^-54].
    double open_uniform() noexcept
    {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { return normal_(engine_); }

    double chi_squared(double dof)
    {
        return std::chi_squared_distribution<double>(dof)(engine_);
    }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace mcpope

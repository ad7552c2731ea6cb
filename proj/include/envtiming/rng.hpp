#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include <boost/random/normal_distribution.hpp>

namespace envtiming {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/**
 * xoshiro256** generator (Blackman and Vigna). Satisfies UniformRandomBitGenerator.
 *
 * Streams are addressed by (seed, domain, stream, index): every Monte Carlo path
 * gets its own generator so results do not depend on thread scheduling.
 */
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed = 0) { reseed(seed); }

    static Xoshiro256 for_stream(std::uint64_t seed, std::uint64_t domain, std::uint64_t stream,
                                 std::uint64_t index)
    {
        std::uint64_t h = seed;
        h = splitmix64(h) ^ domain;
        h = splitmix64(h) ^ stream;
        h = splitmix64(h) ^ index;
        return Xoshiro256(splitmix64(h));
    }

    void reseed(std::uint64_t seed)
    {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
};

/// Per-path random source: uniforms in (0, 1) and standard normals.
class PathRng {
public:
    explicit PathRng(Xoshiro256 engine) : engine_(engine) {}

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform()
    {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { return normal_(engine_); }

private:
    Xoshiro256 engine_;
    boost::random::normal_distribution<double> normal_{0.0, 1.0};
};

/// Stream domains keep operator, residual and policy draws disjoint for the same seed.
enum class StreamDomain : std::uint64_t {
    Operator = 0x6f70,
    Residual = 0x7265,
    Policy = 0x706f,
    Check = 0x6368,
};

inline PathRng make_path_rng(std::uint64_t seed, StreamDomain domain, std::uint64_t stream,
                             std::uint64_t index)
{
    return PathRng(Xoshiro256::for_stream(seed, static_cast<std::uint64_t>(domain), stream, index));
}

} // namespace envtiming

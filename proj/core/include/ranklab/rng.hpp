#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace ranklab {

// Counter-based generator (Philox 4x64, 10 rounds). A draw is a pure
// function of (counter, key), so streams can be sliced by particle index,
// step index and purpose without any shared state. Matches the reference
// implementation word for word; see tests for frozen vectors.
struct Philox4x64 {
    using Block = std::array<std::uint64_t, 4>;

    static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
    static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ull;
    static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

    static Block block(const Block& counter, std::uint64_t key0, std::uint64_t key1) {
        Block c = counter;
        std::uint64_t k0 = key0, k1 = key1;
        for (int round = 0; round < 10; ++round) {
            const unsigned __int128 p0 = static_cast<unsigned __int128>(kMul0) * c[0];
            const unsigned __int128 p1 = static_cast<unsigned __int128>(kMul1) * c[2];
            const std::uint64_t hi0 = static_cast<std::uint64_t>(p0 >> 64);
            const std::uint64_t lo0 = static_cast<std::uint64_t>(p0);
            const std::uint64_t hi1 = static_cast<std::uint64_t>(p1 >> 64);
            const std::uint64_t lo1 = static_cast<std::uint64_t>(p1);
            c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return c;
    }
};

/// Purpose tags keep independent uses of the same (seed, stream) apart.
enum class RngPurpose : std::uint64_t {
    StepNoise = 0,
    InitialSample = 1,
    Generic = 2,
};

/// Uniform in (0,1]: strictly positive so log() is always safe.
inline double uniform_open_closed(std::uint64_t word) {
    return (static_cast<double>(word >> 11) + 1.0) * 0x1.0p-53;
}

/// Uniform in [0,1).
inline double uniform_closed_open(std::uint64_t word) {
    return static_cast<double>(word >> 11) * 0x1.0p-53;
}

/// One standard Gaussian from the block keyed by (seed, stream) at
/// (counter, purpose). Box-Muller on the first two words.
inline double gaussian_draw(std::uint64_t seed, std::uint64_t stream,
                            std::uint64_t counter, RngPurpose purpose) {
    const auto b = Philox4x64::block(
        {counter, 0, static_cast<std::uint64_t>(purpose), 0}, seed, stream);
    const double u1 = uniform_open_closed(b[0]);
    const double u2 = uniform_closed_open(b[1]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// One uniform [0,1) draw from the same keying scheme.
inline double uniform_draw(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t counter, RngPurpose purpose) {
    const auto b = Philox4x64::block(
        {counter, 0, static_cast<std::uint64_t>(purpose), 0}, seed, stream);
    return uniform_closed_open(b[0]);
}

/// Two independent Gaussians from one block (both Box-Muller branches).
inline std::array<double, 2> gaussian_pair(std::uint64_t seed, std::uint64_t stream,
                                           std::uint64_t counter, RngPurpose purpose) {
    const auto b = Philox4x64::block(
        {counter, 0, static_cast<std::uint64_t>(purpose), 0}, seed, stream);
    const double u1 = uniform_open_closed(b[0]);
    const double u2 = uniform_closed_open(b[1]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
}

}  // namespace ranklab

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "common.hpp"

namespace edgelab {

// Philox4x32-10 (Salmon et al., Random123). Stateless: block = f(key, counter).
struct Philox4x32 {
    using block = std::array<std::uint32_t, 4>;

    static block generate(block ctr, std::array<std::uint32_t, 2> key)
    {
        constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
        constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
        for (int r = 0; r < 10; ++r) {
            const std::uint64_t p0 = std::uint64_t(m0) * ctr[0];
            const std::uint64_t p1 = std::uint64_t(m1) * ctr[2];
            ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
                   std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
            key[0] += w0;
            key[1] += w1;
        }
        return ctr;
    }
};

// One 128-bit block per (seed, stream, index) triple.
struct CounterRng {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    Philox4x32::block at(std::uint64_t index) const
    {
        return Philox4x32::generate(
            {std::uint32_t(index), std::uint32_t(index >> 32), std::uint32_t(stream), std::uint32_t(stream >> 32)},
            {std::uint32_t(seed), std::uint32_t(seed >> 32)});
    }
};

// 52-bit uniform strictly inside (0,1).
inline double u01(std::uint32_t a, std::uint32_t b)
{
    const std::uint64_t v = (std::uint64_t(a >> 6) << 26) | std::uint64_t(b >> 6);
    return (double(v) + 0.5) * 0x1.0p-52;
}

inline std::array<double, 2> uniform_pair(const Philox4x32::block& b)
{
    return {u01(b[0], b[1]), u01(b[2], b[3])};
}

// Box-Muller: two independent N(0,1).
inline std::array<double, 2> normal_pair(const Philox4x32::block& b)
{
    const auto u = uniform_pair(b);
    const double r = std::sqrt(-2.0 * std::log(u[0]));
    const double th = 2.0 * pi * u[1];
    return {r * std::cos(th), r * std::sin(th)};
}

} // namespace edgelab

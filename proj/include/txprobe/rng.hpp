// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef TXPROBE_RNG_HPP
#define TXPROBE_RNG_HPP

#include <txprobe/u256.hpp>

#include <cstdint>
#include <string_view>

namespace txprobe {

/** Deterministic xoshiro256++ generator. std::uniform_int_distribution is not
 * portable across standard libraries, so sampling is done by hand; identical
 * seeds must produce identical traces on every platform. */
class Rng
{
public:
    explicit Rng(uint64_t seed)
    {
        uint64_t s = seed;
        for (auto& limb : m_state) limb = splitmix64(s);
    }

    /** Derive an independent stream from a master seed and a stream name, so
     * topology, latency, behavior and ensemble draws can vary independently. */
    static Rng substream(uint64_t seed, std::string_view name)
    {
        uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
        for (char c : name) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return Rng(seed ^ h);
    }

    uint64_t next()
    {
        const uint64_t result = rotl(m_state[0] + m_state[3], 23) + m_state[0];
        const uint64_t t = m_state[1] << 17;
        m_state[2] ^= m_state[0];
        m_state[3] ^= m_state[1];
        m_state[1] ^= m_state[2];
        m_state[0] ^= m_state[3];
        m_state[2] ^= t;
        m_state[3] = rotl(m_state[3], 45);
        return result;
    }

    /** Unbiased draw from [0, n). n must be > 0. */
    uint64_t randrange(uint64_t n)
    {
        const uint64_t threshold = (0 - n) % n;
        for (;;) {
            uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    /** Inclusive range draw. */
    int64_t uniform_int(int64_t lo, int64_t hi)
    {
        return lo + static_cast<int64_t>(randrange(static_cast<uint64_t>(hi - lo) + 1));
    }

    /** Uniform in [0, 1) with 53 random bits. */
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return uniform01() < p; }

    U256 rand256()
    {
        return U256::from_limbs(next(), next(), next(), next());
    }

private:
    static uint64_t splitmix64(uint64_t& x)
    {
        uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t m_state[4];
};

} // namespace txprobe

#endif // TXPROBE_RNG_HPP

// Copyright (c) 2026 The txprobe-sim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef TXPROBE_U256_HPP
#define TXPROBE_U256_HPP

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>

namespace txprobe {

/** 256-bit unsigned integer with wrapping arithmetic, used for transaction
 * identifiers and points on the circular hash space the orphan-pool eviction
 * policy draws from. Limbs are stored least-significant first. */
class U256
{
public:
    constexpr U256() = default;

    static constexpr U256 from_limbs(uint64_t l0, uint64_t l1, uint64_t l2, uint64_t l3)
    {
        U256 v;
        v.m_limbs = {l0, l1, l2, l3};
        return v;
    }

    static constexpr U256 zero() { return U256{}; }

    static constexpr U256 max()
    {
        return from_limbs(~0ULL, ~0ULL, ~0ULL, ~0ULL);
    }

    /** Interpret 32 bytes as little-endian limbs. */
    static U256 from_bytes(const unsigned char* data)
    {
        U256 v;
        for (int i = 0; i < 4; ++i) {
            uint64_t limb = 0;
            for (int b = 7; b >= 0; --b) limb = (limb << 8) | data[i * 8 + b];
            v.m_limbs[i] = limb;
        }
        return v;
    }

    void to_bytes(unsigned char* out) const
    {
        for (int i = 0; i < 4; ++i) {
            uint64_t limb = m_limbs[i];
            for (int b = 0; b < 8; ++b) {
                out[i * 8 + b] = static_cast<unsigned char>(limb & 0xff);
                limb >>= 8;
            }
        }
    }

    /** Largest value v such that v <= fraction * 2^256, for fraction in [0, 1].
     * Used to build grinding target ranges of a requested density. */
    static U256 fraction_of_range(double fraction)
    {
        if (fraction < 0.0) throw std::invalid_argument("fraction < 0");
        if (fraction >= 1.0) return max();
        U256 v;
        double f = fraction;
        for (int i = 3; i >= 0; --i) {
            f = std::ldexp(f, 64);
            double limb = std::floor(f);
            v.m_limbs[i] = static_cast<uint64_t>(limb);
            f -= limb;
        }
        return v;
    }

    friend constexpr bool operator==(const U256& a, const U256& b) = default;

    friend constexpr std::strong_ordering operator<=>(const U256& a, const U256& b)
    {
        for (int i = 3; i >= 0; --i) {
            if (a.m_limbs[i] != b.m_limbs[i]) {
                return a.m_limbs[i] < b.m_limbs[i] ? std::strong_ordering::less
                                                   : std::strong_ordering::greater;
            }
        }
        return std::strong_ordering::equal;
    }

    /** Wrapping subtraction; (a - b) mod 2^256 gives circular gaps. */
    friend constexpr U256 operator-(const U256& a, const U256& b)
    {
        U256 r;
        uint64_t borrow = 0;
        for (int i = 0; i < 4; ++i) {
            uint64_t bi = b.m_limbs[i] + borrow;
            uint64_t nb = (bi < borrow) || (a.m_limbs[i] < bi) ? 1 : 0;
            r.m_limbs[i] = a.m_limbs[i] - bi;
            borrow = nb;
        }
        return r;
    }

    friend constexpr U256 operator+(const U256& a, const U256& b)
    {
        U256 r;
        uint64_t carry = 0;
        for (int i = 0; i < 4; ++i) {
            uint64_t s = a.m_limbs[i] + b.m_limbs[i];
            uint64_t c = s < a.m_limbs[i] ? 1 : 0;
            r.m_limbs[i] = s + carry;
            carry = c + (r.m_limbs[i] < s ? 1 : 0);
        }
        return r;
    }

    double to_double() const
    {
        double r = 0.0;
        for (int i = 3; i >= 0; --i) r = std::ldexp(r, 64) + static_cast<double>(m_limbs[i]);
        return r;
    }

    /** Value divided by 2^256, in [0, 1). */
    double as_unit_fraction() const { return std::ldexp(to_double(), -256); }

    std::string to_hex() const
    {
        static const char* digits = "0123456789abcdef";
        std::string s(64, '0');
        for (int i = 0; i < 4; ++i) {
            uint64_t limb = m_limbs[3 - i];
            for (int n = 0; n < 16; ++n) {
                s[i * 16 + n] = digits[(limb >> (60 - 4 * n)) & 0xf];
            }
        }
        return s;
    }

    /** Short prefix used in trace lines. */
    std::string to_hex16() const { return to_hex().substr(0, 16); }

    static U256 from_hex(const std::string& hex)
    {
        if (hex.size() > 64) throw std::invalid_argument("hex too long for 256 bits");
        std::string padded(64 - hex.size(), '0');
        padded += hex;
        U256 v;
        for (int i = 0; i < 4; ++i) {
            uint64_t limb = 0;
            for (int n = 0; n < 16; ++n) {
                char c = padded[i * 16 + n];
                uint64_t d;
                if (c >= '0' && c <= '9') d = c - '0';
                else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
                else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
                else throw std::invalid_argument("bad hex digit");
                limb = (limb << 4) | d;
            }
            v.m_limbs[3 - i] = limb;
        }
        return v;
    }

    const std::array<uint64_t, 4>& limbs() const { return m_limbs; }

private:
    std::array<uint64_t, 4> m_limbs{0, 0, 0, 0};
};

} // namespace txprobe

#endif // TXPROBE_U256_HPP

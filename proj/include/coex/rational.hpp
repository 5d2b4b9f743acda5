#pragma once

#include <numeric>

#include "coex/common.hpp"

namespace coex {

// exact rationals; numerators stay small here (BCH coefficients), so i64
// with an overflow guard on the 128-bit intermediates is plenty
struct Rat {
    i64 n = 0;
    i64 d = 1;

    Rat() = default;
    Rat(i64 num) : n(num), d(1) {}
    Rat(i64 num, i64 den) : n(num), d(den) { normalize(); }

    void normalize() {
        if (d == 0) fail(Errc::ParameterViolation, "zero denominator");
        if (d < 0) { n = -n; d = -d; }
        i64 g = std::gcd(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        if (n == 0) d = 1;
    }

    bool is_zero() const { return n == 0; }
    bool operator==(const Rat& o) const { return n == o.n && d == o.d; }
};

inline i64 checked_i64(__int128 v) {
    if (v > (static_cast<__int128>(1) << 62) || v < -(static_cast<__int128>(1) << 62))
        fail(Errc::TooLarge, "rational overflow");
    return static_cast<i64>(v);
}

inline Rat operator+(const Rat& a, const Rat& b) {
    __int128 n = static_cast<__int128>(a.n) * b.d + static_cast<__int128>(b.n) * a.d;
    __int128 d = static_cast<__int128>(a.d) * b.d;
    return Rat(checked_i64(n), checked_i64(d));
}

inline Rat operator-(const Rat& a) { return Rat(-a.n, a.d); }
inline Rat operator-(const Rat& a, const Rat& b) { return a + (-b); }

inline Rat operator*(const Rat& a, const Rat& b) {
    __int128 n = static_cast<__int128>(a.n) * b.n;
    __int128 d = static_cast<__int128>(a.d) * b.d;
    return Rat(checked_i64(n), checked_i64(d));
}

inline Rat operator/(const Rat& a, const Rat& b) {
    if (b.n == 0) fail(Errc::ParameterViolation, "division by zero rational");
    __int128 n = static_cast<__int128>(a.n) * b.d;
    __int128 d = static_cast<__int128>(a.d) * b.n;
    return Rat(checked_i64(n), checked_i64(d));
}

/* Reduce a rational mod p^e: the denominator must be a unit there.  Used when
 * specializing formal coefficients into residue arithmetic. */
inline u64 rat_mod(const Rat& a, u64 p, u64 modulus) {
    if (a.d % p == 0) fail(Errc::DenominatorNotInvertible, "denominator divisible by p");
    u64 num = a.n >= 0 ? static_cast<u64>(a.n) % modulus
                       : negmod(static_cast<u64>(-a.n) % modulus, modulus);
    return mulmod(num, unit_inverse(static_cast<u64>(a.d) % modulus, modulus), modulus);
}

}  // namespace coex

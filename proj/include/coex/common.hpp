#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace coex {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u32 = std::uint32_t;

enum class Errc {
    NotAUnit,
    OrderIncompat,
    JacobiFail,
    NotAnIdeal,
    NoPureBasis,
    TooLarge,
    TypeMismatch,
    NotNilpotent,
    SpecViolation,
    ParameterViolation,
    DegreeUnsupported,
    ClassTooHigh,
    DenominatorNotInvertible,
    ReconstructionDivergence,
    FormatError,
    Mismatch,
    UnsupportedPartition,
    Internal,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::NotAUnit: return "NotAUnit";
        case Errc::OrderIncompat: return "OrderIncompat";
        case Errc::JacobiFail: return "JacobiFail";
        case Errc::NotAnIdeal: return "NotAnIdeal";
        case Errc::NoPureBasis: return "NoPureBasis";
        case Errc::TooLarge: return "TooLarge";
        case Errc::TypeMismatch: return "TypeMismatch";
        case Errc::NotNilpotent: return "NotNilpotent";
        case Errc::SpecViolation: return "SpecViolation";
        case Errc::ParameterViolation: return "ParameterViolation";
        case Errc::DegreeUnsupported: return "DegreeUnsupported";
        case Errc::ClassTooHigh: return "ClassTooHigh";
        case Errc::DenominatorNotInvertible: return "DenominatorNotInvertible";
        case Errc::ReconstructionDivergence: return "ReconstructionDivergence";
        case Errc::FormatError: return "FormatError";
        case Errc::Mismatch: return "Mismatch";
        case Errc::UnsupportedPartition: return "UnsupportedPartition";
        case Errc::Internal: return "Internal";
    }
    return "?";
}

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc c, const std::string& msg) { throw Error(c, msg); }

inline u64 mulmod(u64 a, u64 b, u64 m) {
    return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % m);
}

inline u64 addmod(u64 a, u64 b, u64 m) {
    u64 s = a + b;
    if (s >= m || s < a) s -= m;
    return s;
}

inline u64 submod(u64 a, u64 b, u64 m) { return a >= b ? a - b : m - (b - a); }

inline u64 negmod(u64 a, u64 m) { return a == 0 ? 0 : m - a; }

inline u64 powmod(u64 base, u64 exp, u64 m) {
    if (m == 1) return 0;
    u64 r = 1;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

inline u64 gcd_u64(u64 a, u64 b) {
    while (b) {
        u64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Smallest x with x*a = g (mod m) is not what we need; this is plain extended Euclid.
inline i64 egcd(i64 a, i64 b, i64& x, i64& y) {
    if (b == 0) {
        x = 1;
        y = 0;
        return a;
    }
    i64 x1, y1;
    i64 g = egcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

inline u64 unit_inverse(u64 a, u64 m) {
    a %= m;
    i64 x, y;
    i64 g = egcd(static_cast<i64>(a), static_cast<i64>(m), x, y);
    if (g != 1) fail(Errc::NotAUnit, std::to_string(a) + " mod " + std::to_string(m));
    i64 r = x % static_cast<i64>(m);
    if (r < 0) r += static_cast<i64>(m);
    return static_cast<u64>(r);
}

// p-adic valuation of x in Z/p^e; by convention val(0) = e.
inline u32 valuation(u64 x, u64 p, u32 e) {
    if (x == 0) return e;
    u32 v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

inline u64 pow_u64_checked(u64 p, u32 k) {
    u64 r = 1;
    for (u32 i = 0; i < k; ++i) {
        if (r > (u64(1) << 62) / p) fail(Errc::TooLarge, "prime power overflows 64 bits");
        r *= p;
    }
    return r;
}

}  // namespace coex

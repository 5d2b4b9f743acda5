#pragma once

#include <vector>

#include "coex/common.hpp"

namespace coex {

inline bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Residue arithmetic lives in Z/p^k throughout; this bundles the modulus with
// its factorization so callers cannot mix p with a composite base.
struct PrimePower {
    u64 p = 0;
    u32 k = 0;
    u64 modulus = 0;

    PrimePower() = default;
    PrimePower(u64 p_, u32 k_) : p(p_), k(k_) {
        if (!is_prime_u64(p)) fail(Errc::ParameterViolation, "p = " + std::to_string(p) + " is not prime");
        if (k == 0) fail(Errc::ParameterViolation, "k must be positive");
        modulus = pow_u64_checked(p, k);
    }
};

inline u64 unit_inverse(const PrimePower& q, u64 a) { return unit_inverse(a, q.modulus); }

inline bool is_unit(u64 a, u64 p) { return a % p != 0; }

// Legendre symbol of a mod p, p odd.
inline int quadratic_character(u64 a, u64 p) {
    if (p == 2) fail(Errc::ParameterViolation, "quadratic character needs odd p");
    a %= p;
    if (a == 0) return 0;
    u64 e = powmod(a, (p - 1) / 2, p);
    return e == 1 ? 1 : -1;
}

inline std::vector<u64> prime_factors(u64 n) {
    std::vector<u64> fs;
    for (u64 d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            fs.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) fs.push_back(n);
    return fs;
}

// Least generator of the unit group of Z/p^k.
inline u64 primitive_root(const PrimePower& q) {
    u64 phi = q.modulus / q.p * (q.p - 1);
    if (q.p == 2 && q.k >= 3) fail(Errc::ParameterViolation, "unit group of Z/2^k is not cyclic for k >= 3");
    auto fs = prime_factors(phi);
    for (u64 h = 2; h < q.modulus; ++h) {
        if (h % q.p == 0) continue;
        bool ok = true;
        for (u64 f : fs) {
            if (powmod(h, phi / f, q.modulus) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return h;
    }
    fail(Errc::Internal, "no primitive root found");
}

inline u64 primitive_root(u64 p) { return primitive_root(PrimePower(p, 1)); }

inline u64 least_nonresidue(u64 p) {
    for (u64 v = 2; v < p; ++v)
        if (quadratic_character(v, p) == -1) return v;
    fail(Errc::ParameterViolation, "no quadratic nonresidue mod " + std::to_string(p));
}

}  // namespace coex

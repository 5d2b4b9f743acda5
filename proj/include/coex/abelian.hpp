#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "coex/residue.hpp"

namespace coex {

using Elem = std::vector<u64>;

/* A finite abelian p-group presented as a direct sum of cyclic factors.
 * CoordShape allows the exponents in any order (needed for flattened matrix
 * coordinates); AbelianType additionally enforces the non-increasing
 * convention used for ring carriers. */
struct CoordShape {
    u64 p = 0;
    std::vector<u32> exps;
    std::vector<u64> mods;

    CoordShape() = default;
    CoordShape(u64 p_, std::vector<u32> exps_) : p(p_), exps(std::move(exps_)) {
        if (!is_prime_u64(p)) fail(Errc::ParameterViolation, "p not prime");
        mods.reserve(exps.size());
        for (u32 e : exps) {
            if (e == 0) fail(Errc::ParameterViolation, "zero exponent in type");
            mods.push_back(pow_u64_checked(p, e));
        }
    }

    std::size_t rank() const { return exps.size(); }
    u32 n() const { return std::accumulate(exps.begin(), exps.end(), u32(0)); }

    u64 order() const {
        u64 r = 1;
        for (u64 m : mods) r = r * m;  // callers keep this within 64 bits
        return r;
    }

    bool operator==(const CoordShape& o) const { return p == o.p && exps == o.exps; }
};

struct AbelianType : CoordShape {
    AbelianType() = default;
    AbelianType(u64 p_, std::vector<u32> exps_) : CoordShape(p_, std::move(exps_)) {
        if (exps.empty()) fail(Errc::ParameterViolation, "empty type");
        for (std::size_t i = 1; i < exps.size(); ++i)
            if (exps[i] > exps[i - 1])
                fail(Errc::ParameterViolation, "type exponents must be non-increasing");
    }

    u32 mu1() const { return exps[0]; }
    u64 exponent() const { return mods[0]; }
};

inline Elem zero_elem(const CoordShape& A) { return Elem(A.rank(), 0); }

inline Elem basis_elem(const CoordShape& A, std::size_t i) {
    Elem e(A.rank(), 0);
    e[i] = 1;
    return e;
}

inline bool reduced(const CoordShape& A, const Elem& x) {
    if (x.size() != A.rank()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] >= A.mods[i]) return false;
    return true;
}

inline Elem add(const CoordShape& A, const Elem& x, const Elem& y) {
    Elem r(A.rank());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = addmod(x[i], y[i], A.mods[i]);
    return r;
}

inline Elem sub(const CoordShape& A, const Elem& x, const Elem& y) {
    Elem r(A.rank());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = submod(x[i], y[i], A.mods[i]);
    return r;
}

inline Elem neg(const CoordShape& A, const Elem& x) {
    Elem r(A.rank());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = negmod(x[i], A.mods[i]);
    return r;
}

inline Elem scalar_mul(const CoordShape& A, u64 c, const Elem& x) {
    Elem r(A.rank());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = mulmod(c % A.mods[i], x[i], A.mods[i]);
    return r;
}

inline bool is_zero(const Elem& x) {
    for (u64 v : x)
        if (v) return false;
    return true;
}

// Least p-power killing x.
inline u64 element_order(const CoordShape& A, const Elem& x) {
    u32 need = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        u32 v = valuation(x[i], A.p, A.exps[i]);
        need = std::max(need, A.exps[i] - v);
    }
    return pow_u64_checked(A.p, need);
}

inline u64 elem_index(const CoordShape& A, const Elem& x) {
    u64 idx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) idx = idx * A.mods[i] + x[i];
    return idx;
}

inline Elem elem_at(const CoordShape& A, u64 idx) {
    Elem x(A.rank());
    for (std::size_t i = A.rank(); i-- > 0;) {
        x[i] = idx % A.mods[i];
        idx /= A.mods[i];
    }
    return x;
}

/* Type invariants of an abelian p-group of type mu: the dual partition omega,
 * the exponent p^mu1 and the coexponent n - mu1. */
struct TypeInvariants {
    std::vector<u32> mu;
    std::vector<u32> omega;
    u32 n = 0;
    u32 exponent_exp = 0;
    u32 coexponent = 0;
};

inline std::vector<u32> dual_partition(const std::vector<u32>& mu) {
    std::vector<u32> omega;
    if (mu.empty()) return omega;
    for (u32 i = 1; i <= mu[0]; ++i) {
        u32 c = 0;
        for (u32 m : mu)
            if (m >= i) ++c;
        omega.push_back(c);
    }
    return omega;
}

inline TypeInvariants type_invariants(const AbelianType& A) {
    TypeInvariants t;
    t.mu = std::vector<u32>(A.exps.begin(), A.exps.end());
    t.omega = dual_partition(t.mu);
    t.n = A.n();
    t.exponent_exp = A.mu1();
    t.coexponent = t.n - t.exponent_exp;
    return t;
}

}  // namespace coex

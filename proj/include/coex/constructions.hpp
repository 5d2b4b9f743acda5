#pragma once

#include "coex/graded.hpp"

namespace coex {

/* Both constructions extend a ring U, whose first basis vector z is central,
 * by a cyclic summand of order p^m acting through a derivation sigma (given as
 * a graded matrix with zero first row, so z sigma = 0). */

inline void check_extension_data(const LieRing& U, const Elem& sigma, u32 m) {
    if (m < U.A.mu1()) fail(Errc::ParameterViolation, "cyclic part must dominate the type");
    if (!is_graded(U.A, sigma)) fail(Errc::ParameterViolation, "sigma is not a graded matrix");
    for (std::size_t j = 0; j < U.rank(); ++j)
        if (sigma[j]) fail(Errc::ParameterViolation, "sigma must kill the distinguished generator");
    if (!is_derivation(U, sigma)) fail(Errc::ParameterViolation, "sigma is not a derivation");
    if (!is_central(U, basis_elem(U.A, 0)))
        fail(Errc::ParameterViolation, "distinguished generator is not central");
}

/* U + (Z/p^m) w with [x, w] = x sigma; basis (w, e_1, ..., e_r). */
inline LieRing semidirect_cyclic(const LieRing& U, const Elem& sigma, u32 m) {
    check_extension_data(U, sigma, m);
    std::size_t r = U.rank();
    std::vector<u32> exps{m};
    exps.insert(exps.end(), U.A.exps.begin(), U.A.exps.end());
    AbelianType A(U.A.p, exps);

    auto embed = [&](const Elem& x) {
        Elem v(r + 1, 0);
        for (std::size_t i = 0; i < r; ++i) v[i + 1] = x[i];
        return v;
    };

    std::vector<Elem> table;
    for (std::size_t i = 0; i < r + 1; ++i)
        for (std::size_t j = i + 1; j < r + 1; ++j) {
            if (i == 0) {
                // [w, e_j] = -(e_j sigma)
                table.push_back(embed(neg(U.A, apply_mat(U.A, basis_elem(U.A, j - 1), sigma))));
            } else {
                table.push_back(embed(U.c(i - 1, j - 1)));
            }
        }
    return make_liering(A, table);
}

/* Replaces z by p^{m - e_1} w inside the carrier: the coordinate substitution
 *   iota(c_1, c_2, ..., c_r) = (c_1 p^{m - e_1} mod p^m, c_2, ..., c_r)
 * on basis (w, e_2, ..., e_r).  Same ring as quotienting the semidirect sum
 * by <p^{m - e_1} w - z>. */
inline LieRing u_construction(const LieRing& U, const Elem& sigma, u32 m) {
    check_extension_data(U, sigma, m);
    std::size_t r = U.rank();
    u32 e1 = U.A.exps[0];
    std::vector<u32> exps{m};
    exps.insert(exps.end(), U.A.exps.begin() + 1, U.A.exps.end());
    AbelianType A(U.A.p, exps);
    u64 lift = pow_u64_checked(U.A.p, m - e1);

    auto iota = [&](const Elem& x) {
        Elem v(r, 0);
        v[0] = mulmod(x[0] % A.mods[0], lift, A.mods[0]);
        for (std::size_t i = 1; i < r; ++i) v[i] = x[i];
        return v;
    };

    std::vector<Elem> table;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j) {
            if (i == 0) {
                table.push_back(iota(neg(U.A, apply_mat(U.A, basis_elem(U.A, j), sigma))));
            } else {
                table.push_back(iota(U.c(i, j)));
            }
        }
    return make_liering(A, table);
}

}  // namespace coex

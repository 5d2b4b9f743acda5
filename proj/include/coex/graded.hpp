#pragma once

#include "coex/liering.hpp"

namespace coex {

/* Additive endomorphisms of A = sum Z/p^{e_i} are exactly the matrices with
 * m_ij in p^max(0, e_j - e_i) * Z/p^{e_j}, acting on row vectors from the
 * right.  A matrix is stored flat, row-major, as an Elem over mat_shape(A),
 * so the abelian helpers (add, sub, scalar_mul, elem ordering) apply as-is.
 */

inline CoordShape mat_shape(const AbelianType& A) {
    std::size_t r = A.rank();
    std::vector<u32> exps;
    exps.reserve(r * r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) exps.push_back(A.exps[j]);
    return CoordShape(A.p, exps);
}

// required divisibility of entry (i,j)
inline u32 grade_step(const AbelianType& A, std::size_t i, std::size_t j) {
    return A.exps[j] > A.exps[i] ? A.exps[j] - A.exps[i] : 0;
}

inline bool is_graded(const AbelianType& A, const Elem& m) {
    std::size_t r = A.rank();
    if (m.size() != r * r) return false;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            if (m[i * r + j] >= A.mods[j]) return false;
            u32 s = grade_step(A, i, j);
            if (s && m[i * r + j] % pow_u64_checked(A.p, s) != 0) return false;
        }
    return true;
}

inline Elem zero_mat(const AbelianType& A) { return Elem(A.rank() * A.rank(), 0); }

inline Elem identity_mat(const AbelianType& A) {
    std::size_t r = A.rank();
    Elem m = zero_mat(A);
    for (std::size_t i = 0; i < r; ++i) m[i * r + i] = 1;
    return m;
}

inline Elem mat_row(const AbelianType& A, const Elem& m, std::size_t i) {
    std::size_t r = A.rank();
    return Elem(m.begin() + static_cast<std::ptrdiff_t>(i * r),
                m.begin() + static_cast<std::ptrdiff_t>((i + 1) * r));
}

inline Elem apply_mat(const AbelianType& A, const Elem& x, const Elem& m) {
    std::size_t r = A.rank();
    Elem y(r, 0);
    for (std::size_t j = 0; j < r; ++j) {
        u64 acc = 0, mod = A.mods[j];
        for (std::size_t i = 0; i < r; ++i)
            if (x[i] && m[i * r + j]) acc = addmod(acc, mulmod(x[i] % mod, m[i * r + j], mod), mod);
        y[j] = acc;
    }
    return y;
}

// matrix of x -> (x m) n
inline Elem compose_mat(const AbelianType& A, const Elem& m, const Elem& n) {
    std::size_t r = A.rank();
    Elem out = zero_mat(A);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            u64 acc = 0, mod = A.mods[j];
            for (std::size_t k = 0; k < r; ++k)
                if (m[i * r + k] && n[k * r + j])
                    acc = addmod(acc, mulmod(m[i * r + k] % mod, n[k * r + j], mod), mod);
            out[i * r + j] = acc;
        }
    return out;
}

/* ---- mod p reduction; nilpotency and invertibility are detected there ---- */

inline std::vector<u64> fp_of(const AbelianType& A, const Elem& m) {
    std::vector<u64> f(m.size());
    for (std::size_t k = 0; k < m.size(); ++k) f[k] = m[k] % A.p;
    return f;
}

inline std::vector<u64> fp_mul(u64 p, std::size_t r, const std::vector<u64>& a,
                               const std::vector<u64>& b) {
    std::vector<u64> c(r * r, 0);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t k = 0; k < r; ++k) {
            if (!a[i * r + k]) continue;
            for (std::size_t j = 0; j < r; ++j)
                c[i * r + j] = (c[i * r + j] + a[i * r + k] * b[k * r + j]) % p;
        }
    return c;
}

inline bool fp_is_zero(const std::vector<u64>& a) {
    for (u64 x : a)
        if (x) return false;
    return true;
}

// reduction mod p is a ring map, and M is nilpotent iff its reduction is
inline bool is_nilpotent_mat(const AbelianType& A, const Elem& m) {
    std::size_t r = A.rank();
    std::vector<u64> f = fp_of(A, m);
    for (std::size_t k = 1; k < r; k <<= 1) {
        if (fp_is_zero(f)) return true;
        f = fp_mul(A.p, r, f, f);
    }
    if (!fp_is_zero(f)) f = fp_mul(A.p, r, f, fp_of(A, m));
    return fp_is_zero(f);
}

inline u64 fp_det(u64 p, std::size_t r, std::vector<u64> a) {
    u64 det = 1;
    for (std::size_t c = 0; c < r; ++c) {
        std::size_t piv = c;
        while (piv < r && a[piv * r + c] % p == 0) ++piv;
        if (piv == r) return 0;
        if (piv != c) {
            for (std::size_t j = 0; j < r; ++j) std::swap(a[piv * r + j], a[c * r + j]);
            det = negmod(det, p);
        }
        det = mulmod(det, a[c * r + c], p);
        u64 inv = unit_inverse(a[c * r + c] % p, p);
        for (std::size_t i = c + 1; i < r; ++i) {
            u64 f = mulmod(a[i * r + c] % p, inv, p);
            if (!f) continue;
            for (std::size_t j = c; j < r; ++j)
                a[i * r + j] = submod(a[i * r + j] % p, mulmod(f, a[c * r + j] % p, p), p);
        }
    }
    return det;
}

inline bool is_invertible_mat(const AbelianType& A, const Elem& m) {
    return fp_det(A.p, A.rank(), fp_of(A, m)) != 0;
}

/* ---- solving x * M = t and kernels of additive maps ---- */

/* Echelonizes generator pairs (l_i | r_i) over the stacked shape L + R.  solve
 * finds, for a target t in the left factor, a right part y with (t | y) in the
 * generated subgroup.  With generators (f(b_i) | b_i) for a homomorphism f this
 * yields preimages; rows whose pivot lies in the right factor span ker f. */
class AugmentedEchelon {
  public:
    AugmentedEchelon(CoordShape left, CoordShape right, const std::vector<std::pair<Elem, Elem>>& gens)
        : left_(std::move(left)), right_(std::move(right)) {
        std::vector<u32> exps = left_.exps;
        exps.insert(exps.end(), right_.exps.begin(), right_.exps.end());
        combined_ = CoordShape(left_.p, exps);
        SubgroupBuilder b(combined_);
        for (const auto& [l, r] : gens) {
            Elem v = l;
            v.insert(v.end(), r.begin(), r.end());
            b.insert(std::move(v));
        }
        ech_ = b.take();
        ech_.shape = &combined_;
    }

    AugmentedEchelon(const AugmentedEchelon&) = delete;
    AugmentedEchelon& operator=(const AugmentedEchelon&) = delete;

    std::optional<Elem> solve(const Elem& t) const {
        std::size_t nl = left_.rank();
        Elem v = t;
        v.resize(nl + right_.rank(), 0);
        for (std::size_t i = 0; i < ech_.rows.size(); ++i) {
            std::size_t c = ech_.pivcol[i];
            if (c >= nl) break;
            if (v[c] == 0) continue;
            if (valuation(v[c], combined_.p, combined_.exps[c]) < ech_.pivval[i]) return std::nullopt;
            u64 m = v[c] / pow_u64_checked(combined_.p, ech_.pivval[i]);
            v = sub(combined_, v, scalar_mul(combined_, m, ech_.rows[i]));
        }
        for (std::size_t c = 0; c < nl; ++c)
            if (v[c]) return std::nullopt;
        Elem y(v.begin() + static_cast<std::ptrdiff_t>(nl), v.end());
        return neg(right_, y);
    }

    // generators of {x : f(x) = 0} when built from graph pairs (f(b_i) | b_i)
    std::vector<Elem> kernel_generators() const {
        std::size_t nl = left_.rank();
        std::vector<Elem> out;
        for (std::size_t i = 0; i < ech_.rows.size(); ++i) {
            if (ech_.pivcol[i] < nl) continue;
            out.emplace_back(ech_.rows[i].begin() + static_cast<std::ptrdiff_t>(nl),
                             ech_.rows[i].end());
        }
        return out;
    }

  private:
    CoordShape left_, right_, combined_;
    Subgroup ech_;
};

inline Elem inverse_mat(const AbelianType& A, const Elem& m) {
    if (!is_invertible_mat(A, m)) fail(Errc::NotAUnit, "matrix is not invertible");
    std::size_t r = A.rank();
    std::vector<std::pair<Elem, Elem>> gens;
    for (std::size_t i = 0; i < r; ++i) gens.emplace_back(mat_row(A, m, i), basis_elem(A, i));
    AugmentedEchelon solver(A, A, gens);
    Elem inv = zero_mat(A);
    for (std::size_t k = 0; k < r; ++k) {
        auto x = solver.solve(basis_elem(A, k));
        if (!x) fail(Errc::Internal, "invertible matrix failed to solve");
        for (std::size_t j = 0; j < r; ++j) inv[k * r + j] = (*x)[j];
    }
    return inv;
}

/* ---- structured endomorphisms of a Lie ring ---- */

inline bool is_derivation(const LieRing& L, const Elem& m) {
    std::size_t r = L.rank();
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j) {
            Elem lhs = apply_mat(L.A, L.c(i, j), m);
            Elem rhs = add(L.A, bracket(L, mat_row(L.A, m, i), basis_elem(L.A, j)),
                           bracket(L, basis_elem(L.A, i), mat_row(L.A, m, j)));
            if (lhs != rhs) return false;
        }
    return true;
}

// right adjoint action: row i is [e_i, x]
inline Elem inner_derivation(const LieRing& L, const Elem& x) {
    std::size_t r = L.rank();
    Elem m = zero_mat(L.A);
    for (std::size_t i = 0; i < r; ++i) {
        Elem b = bracket(L, basis_elem(L.A, i), x);
        for (std::size_t j = 0; j < r; ++j) m[i * r + j] = b[j];
    }
    return m;
}

inline bool is_lie_automorphism(const LieRing& L, const Elem& m) {
    if (!is_invertible_mat(L.A, m)) return false;
    std::size_t r = L.rank();
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j) {
            Elem lhs = apply_mat(L.A, L.c(i, j), m);
            Elem rhs = bracket(L, mat_row(L.A, m, i), mat_row(L.A, m, j));
            if (lhs != rhs) return false;
        }
    return true;
}

// if row 0 is (a, 0, ..., 0) with a unit, returns a
inline std::optional<u64> zline_scalar(const AbelianType& A, const Elem& m) {
    std::size_t r = A.rank();
    if (m[0] % A.p == 0) return std::nullopt;
    for (std::size_t j = 1; j < r; ++j)
        if (m[j]) return std::nullopt;
    return m[0];
}

/* Derivations as the kernel of the linear defect map
 *   M -> (M applied to c_ij - [M e_i, e_j] - [e_i, M e_j])_{i<j},
 * computed on the graded generators p^{s_ij} E_ij.  With zrow_zero the first
 * row is pinned to zero (endomorphisms killing the distinguished generator).
 */
inline Subgroup derivation_space(const LieRing& L, bool zrow_zero, CoordShape& mshape_out) {
    std::size_t r = L.rank();
    mshape_out = mat_shape(L.A);
    std::size_t npairs = r * (r - 1) / 2;
    std::vector<u32> texps;
    for (std::size_t q = 0; q < npairs; ++q)
        texps.insert(texps.end(), L.A.exps.begin(), L.A.exps.end());
    CoordShape target(L.A.p, texps);

    auto defect = [&](const Elem& m) {
        Elem out;
        out.reserve(npairs * r);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = i + 1; j < r; ++j) {
                Elem d = apply_mat(L.A, L.c(i, j), m);
                d = sub(L.A, d, bracket(L, mat_row(L.A, m, i), basis_elem(L.A, j)));
                d = sub(L.A, d, bracket(L, basis_elem(L.A, i), mat_row(L.A, m, j)));
                out.insert(out.end(), d.begin(), d.end());
            }
        return out;
    };

    std::vector<std::pair<Elem, Elem>> gens;
    for (std::size_t i = zrow_zero ? 1 : 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            Elem g = zero_mat(L.A);
            g[i * r + j] = pow_u64_checked(L.A.p, grade_step(L.A, i, j));
            gens.emplace_back(defect(g), g);
        }
    AugmentedEchelon ech(target, mshape_out, gens);
    std::vector<Elem> kg = ech.kernel_generators();
    return subgroup_closure(mshape_out, kg);
}

}  // namespace coex

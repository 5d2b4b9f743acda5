#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "coex/subgroup.hpp"

namespace coex {

/* A finite nilpotent Lie ring over Z: additive group of AbelianType A,
 * bracket determined by the constants c_ij = [e_i, e_j] for i < j.
 * Bilinearity is well defined because validate enforces
 * p^min(e_i, e_j) * c_ij = 0.
 */
struct LieRing {
    AbelianType A;
    std::vector<Elem> table;  // index pair_index(i, j), i < j

    std::size_t rank() const { return A.rank(); }

    std::size_t pair_index(std::size_t i, std::size_t j) const {
        // row-major over the strict upper triangle
        return i * A.rank() - i * (i + 1) / 2 + (j - i - 1);
    }

    const Elem& c(std::size_t i, std::size_t j) const { return table[pair_index(i, j)]; }
};

struct ValidationReport {
    bool ok = true;
    Errc code = Errc::Internal;
    std::string detail;
};

inline Elem bracket(const LieRing& L, const Elem& x, const Elem& y) {
    Elem r = zero_elem(L.A);
    for (std::size_t i = 0; i < L.rank(); ++i) {
        if (x[i] == 0 && y[i] == 0) continue;
        for (std::size_t j = i + 1; j < L.rank(); ++j) {
            const Elem& cij = L.c(i, j);
            if (is_zero(cij)) continue;
            // the scalar only matters mod the annihilator of c_ij
            u64 m = std::min(L.A.mods[i], L.A.mods[j]);
            u64 s = submod(mulmod(x[i] % m, y[j] % m, m), mulmod(x[j] % m, y[i] % m, m), m);
            if (s) r = add(L.A, r, scalar_mul(L.A, s, cij));
        }
    }
    return r;
}

inline ValidationReport validate_table(const AbelianType& A, const std::vector<Elem>& table) {
    ValidationReport rep;
    std::size_t r = A.rank();
    if (table.size() != r * (r - 1) / 2) {
        rep = {false, Errc::TypeMismatch, "bracket table has wrong number of entries"};
        return rep;
    }
    for (const Elem& c : table) {
        if (!reduced(A, c)) {
            rep = {false, Errc::TypeMismatch, "bracket constant not reduced"};
            return rep;
        }
    }
    LieRing L{A, table};
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = i + 1; j < r; ++j) {
            u64 m = std::min(A.mods[i], A.mods[j]);
            if (!is_zero(scalar_mul(A, m, L.c(i, j)))) {
                rep = {false, Errc::OrderIncompat,
                       "p^min(e_i,e_j) * c(" + std::to_string(i) + "," + std::to_string(j) + ") != 0"};
                return rep;
            }
        }
    }
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j)
            for (std::size_t k = j + 1; k < r; ++k) {
                Elem s = bracket(L, L.c(i, j), basis_elem(A, k));
                s = add(A, s, bracket(L, L.c(j, k), basis_elem(A, i)));
                s = add(A, s, bracket(L, neg(A, L.c(i, k)), basis_elem(A, j)));
                if (!is_zero(s)) {
                    rep = {false, Errc::JacobiFail,
                           "Jacobi fails on (" + std::to_string(i) + "," + std::to_string(j) + "," +
                               std::to_string(k) + ")"};
                    return rep;
                }
            }
    return rep;
}

inline LieRing make_liering(AbelianType A, std::vector<Elem> table) {
    ValidationReport rep = validate_table(A, table);
    if (!rep.ok) fail(rep.code, rep.detail);
    return LieRing{std::move(A), std::move(table)};
}

inline ValidationReport validate(const LieRing& L) { return validate_table(L.A, L.table); }

inline LieRing abelian_ring(AbelianType A) {
    std::size_t r = A.rank();
    std::vector<Elem> t(r * (r - 1) / 2, zero_elem(A));
    return LieRing{std::move(A), std::move(t)};
}

// gamma_1 = L, gamma_{k+1} = < [gamma_k, L] >.  Throws NotNilpotent if the
// series stalls above zero.
inline std::vector<Subgroup> lower_central_series(const LieRing& L) {
    std::vector<Subgroup> out;
    std::vector<Elem> gens;
    for (std::size_t i = 0; i < L.rank(); ++i) gens.push_back(basis_elem(L.A, i));
    out.push_back(subgroup_closure(L.A, gens));
    while (true) {
        const Subgroup& g = out.back();
        std::vector<Elem> next;
        for (const Elem& r : g.rows)
            for (std::size_t i = 0; i < L.rank(); ++i) {
                Elem b = bracket(L, r, basis_elem(L.A, i));
                if (!is_zero(b)) next.push_back(b);
            }
        Subgroup ng = subgroup_closure(L.A, next);
        if (ng.order() == 1) {
            out.push_back(std::move(ng));
            return out;
        }
        if (ng.order() == g.order()) fail(Errc::NotNilpotent, "lower central series stalls");
        out.push_back(std::move(ng));
        if (out.size() > L.A.n() + 2) fail(Errc::NotNilpotent, "lower central series too long");
    }
}

inline u32 nilpotency_class(const LieRing& L) {
    auto s = lower_central_series(L);
    return static_cast<u32>(s.size() - 1);  // gamma_{c+1} = 0
}

inline Subgroup derived_subring(const LieRing& L) {
    std::vector<Elem> gens;
    for (std::size_t i = 0; i < L.rank(); ++i)
        for (std::size_t j = i + 1; j < L.rank(); ++j)
            if (!is_zero(L.c(i, j))) gens.push_back(L.c(i, j));
    return subgroup_closure(L.A, gens);
}

inline bool is_central(const LieRing& L, const Elem& x) {
    for (std::size_t i = 0; i < L.rank(); ++i)
        if (!is_zero(bracket(L, x, basis_elem(L.A, i)))) return false;
    return true;
}

/* Center as the kernel of x -> ([x,e_1], ..., [x,e_r]).  Echelonize the rows
 * (f(e_i) | e_i) over the stacked shape B + A; echelon rows with zero B-part
 * have kernel elements as their A-part, and those generate the kernel. */
inline Subgroup center(const LieRing& L) {
    std::size_t r = L.rank();
    std::vector<u32> stacked;
    for (std::size_t k = 0; k <= r; ++k)
        stacked.insert(stacked.end(), L.A.exps.begin(), L.A.exps.end());
    CoordShape S(L.A.p, stacked);

    SubgroupBuilder b(S);
    for (std::size_t i = 0; i < r; ++i) {
        Elem v;
        v.reserve((r + 1) * r);
        for (std::size_t j = 0; j < r; ++j) {
            Elem bij = bracket(L, basis_elem(L.A, i), basis_elem(L.A, j));
            v.insert(v.end(), bij.begin(), bij.end());
        }
        Elem ei = basis_elem(L.A, i);
        v.insert(v.end(), ei.begin(), ei.end());
        b.insert(std::move(v));
    }
    Subgroup big = b.take();

    std::vector<Elem> gens;
    for (std::size_t i = 0; i < big.rows.size(); ++i) {
        if (big.pivcol[i] < r * r) continue;
        gens.emplace_back(big.rows[i].end() - static_cast<std::ptrdiff_t>(r), big.rows[i].end());
    }
    return subgroup_closure(L.A, gens);
}

struct RingFingerprint {
    u32 n = 0;
    std::vector<u32> type;
    u32 cls = 0;
    u64 derived_order = 0;
    u64 center_order = 0;
    // largest i with [L,L] inside p^i A, and the same relative to the center
    // (-1 when [L,L] is not even contained in the center)
    int derived_depth_ambient = 0;
    int derived_depth_center = 0;

    bool operator==(const RingFingerprint& o) const {
        return n == o.n && type == o.type && cls == o.cls && derived_order == o.derived_order &&
               center_order == o.center_order && derived_depth_ambient == o.derived_depth_ambient &&
               derived_depth_center == o.derived_depth_center;
    }
    bool operator<(const RingFingerprint& o) const {
        auto key = [](const RingFingerprint& f) {
            return std::make_tuple(f.n, f.type, f.cls, f.derived_order, f.center_order,
                                   f.derived_depth_ambient, f.derived_depth_center);
        };
        return key(*this) < key(o);
    }
};

inline RingFingerprint fingerprint(const LieRing& L) {
    RingFingerprint f;
    f.n = L.A.n();
    f.type.assign(L.A.exps.begin(), L.A.exps.end());
    f.cls = nilpotency_class(L);
    Subgroup der = derived_subring(L);
    f.derived_order = der.order();
    Subgroup z = center(L);
    f.center_order = z.order();

    int da = 0;
    for (u32 i = 1; i <= L.A.mu1(); ++i) {
        Subgroup ag = agemo_subgroup(L.A, i);
        if (subgroup_leq(der, ag)) da = static_cast<int>(i);
        else break;
    }
    if (f.derived_order == 1) da = static_cast<int>(L.A.mu1());
    f.derived_depth_ambient = da;

    int dc = -1;
    if (subgroup_leq(der, z)) {
        dc = 0;
        for (u32 i = 1; i <= L.A.mu1(); ++i) {
            Subgroup ag = agemo_of(L.A, z, i);
            if (subgroup_leq(der, ag)) dc = static_cast<int>(i);
            else break;
        }
        if (f.derived_order == 1) dc = static_cast<int>(L.A.mu1());
    }
    f.derived_depth_center = dc;
    return f;
}

/* Exponent-independent part of the fingerprint, used when comparing censuses
 * taken at different n. */
inline std::tuple<u32, u64, int, u64> stable_fingerprint(const LieRing& L) {
    RingFingerprint f = fingerprint(L);
    u64 center_index = L.A.order() / f.center_order;
    return {f.cls, f.derived_order, f.derived_depth_ambient, center_index};
}

/* ---- isomorphism testing for small rings ---- */

/* Backtracking search for a bracket-preserving additive isomorphism, returned
 * as the matrix of basis images (rows in the coordinates of `R`).  Basis
 * vectors touched by brackets are assigned first so the structure constraints
 * prune early; the first basis vector goes last.  Only for small carriers. */
inline std::optional<std::vector<Elem>> find_isomorphism(const LieRing& L, const LieRing& R,
                                                         u64 cap = u64(1) << 20) {
    if (!(L.A == R.A)) return std::nullopt;
    if (L.A.order() > cap) fail(Errc::TooLarge, "carrier too large for isomorphism search");
    std::size_t r = L.rank();
    if (r == 1) return std::vector<Elem>{basis_elem(L.A, 0)};

    Subgroup zl = center(L), zr = center(R);
    if (zl.order() != zr.order()) return std::nullopt;

    // assignment order: rows 1..r-1, then row 0
    std::vector<std::size_t> order;
    for (std::size_t i = 1; i < r; ++i) order.push_back(i);
    order.push_back(0);
    std::vector<std::size_t> level_of(r);
    for (std::size_t l = 0; l < r; ++l) level_of[order[l]] = l;

    struct PairCheck {
        std::size_t a, b;
        std::size_t order_level;  // both endpoints assigned
        std::size_t exact_level;  // endpoints and bracket support assigned
    };
    std::vector<PairCheck> pairs;
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = a + 1; b < r; ++b) {
            PairCheck pc{a, b, std::max(level_of[a], level_of[b]), 0};
            pc.exact_level = pc.order_level;
            for (std::size_t k = 0; k < r; ++k)
                if (L.c(a, b)[k] != 0) pc.exact_level = std::max(pc.exact_level, level_of[k]);
            pairs.push_back(pc);
        }

    std::vector<Elem> img(r);

    auto apply = [&](const Elem& x) {
        Elem out = zero_elem(R.A);
        for (std::size_t k = 0; k < r; ++k)
            if (x[k]) out = add(R.A, out, scalar_mul(R.A, x[k], img[k]));
        return out;
    };

    u64 n = L.A.order();
    std::function<bool(std::size_t)> rec = [&](std::size_t lvl) -> bool {
        if (lvl == r) {
            std::vector<Elem> rows(img.begin(), img.end());
            return subgroup_closure(R.A, rows).order() == R.A.order();
        }
        std::size_t i = order[lvl];
        u64 want_ord = R.A.mods[i];
        bool central = zl.contains(basis_elem(L.A, i));
        for (u64 idx = 1; idx < n; ++idx) {
            Elem m = elem_at(R.A, idx);
            if (element_order(R.A, m) != want_ord) continue;
            if (zr.contains(m) != central) continue;
            img[i] = m;
            bool ok = true;
            for (const PairCheck& pc : pairs) {
                if (pc.exact_level == lvl) {
                    Elem lhs = bracket(R, img[pc.a], img[pc.b]);
                    if (lhs != apply(L.c(pc.a, pc.b))) { ok = false; break; }
                } else if (pc.order_level == lvl && pc.exact_level > lvl) {
                    Elem lhs = bracket(R, img[pc.a], img[pc.b]);
                    if (element_order(R.A, lhs) != element_order(L.A, L.c(pc.a, pc.b))) {
                        ok = false;
                        break;
                    }
                }
            }
            if (ok && rec(lvl + 1)) return true;
        }
        return false;
    };

    if (!rec(0)) return std::nullopt;
    return img;
}

inline bool isomorphic_small(const LieRing& L, const LieRing& R, bool fingerprint_prefilter = true) {
    if (!(L.A == R.A)) return false;
    if (fingerprint_prefilter && !(fingerprint(L) == fingerprint(R))) return false;
    return find_isomorphism(L, R).has_value();
}

/* ---- subrings on an echelon basis ---- */

struct SubringResult {
    LieRing ring;
    std::vector<Elem> basis;  // rows of the ambient carrier, aligned with ring basis order
};

// The subgroup must be closed under the bracket; its echelon rows become the
// new basis, reordered so the type is non-increasing.
inline SubringResult subring_on(const LieRing& L, const Subgroup& S) {
    std::size_t r = S.rows.size();
    std::vector<u32> ords;
    for (std::size_t i = 0; i < r; ++i) ords.push_back(S.shape->exps[S.pivcol[i]] - S.pivval[i]);
    // echelon rows only serve as a basis when each generates a pure cyclic summand
    for (std::size_t i = 0; i < r; ++i)
        if (element_order(*S.shape, S.rows[i]) != pow_u64_checked(S.shape->p, ords[i]))
            fail(Errc::NoPureBasis, "echelon row order exceeds its pivot range");
    std::vector<std::size_t> perm(r);
    for (std::size_t i = 0; i < r; ++i) perm[i] = i;
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return ords[a] > ords[b]; });

    std::vector<u32> exps;
    std::vector<Elem> basis;
    for (std::size_t i = 0; i < r; ++i) {
        exps.push_back(ords[perm[i]]);
        basis.push_back(S.rows[perm[i]]);
    }
    AbelianType T(L.A.p, exps);

    auto to_coords = [&](const Elem& v) {
        auto cs = S.coeffs(v);
        if (!cs) fail(Errc::SpecViolation, "subgroup not closed under bracket");
        Elem out(r, 0);
        for (std::size_t i = 0; i < r; ++i) out[i] = (*cs)[perm[i]] % T.mods[i];
        return out;
    };

    std::vector<Elem> table;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j)
            table.push_back(to_coords(bracket(L, basis[i], basis[j])));
    return SubringResult{make_liering(T, table), basis};
}

/* ---- quotients ---- */

struct QuotientResult {
    LieRing ring;
    // image of each ambient basis vector in quotient coordinates
    std::vector<Elem> projection;
};

namespace detail {

struct Reduction {
    // one substitution step: coordinate `col` either has its exponent cut to
    // `newexp`, or (when `subst` is nonempty) is eliminated via e_col = subst.
    std::size_t col;
    u32 newexp;       // used when subst empty; 0 means drop the coordinate
    Elem subst;       // expressed in the remaining coordinates (old indexing)
};

}  // namespace detail

inline bool ideal_check(const LieRing& L, const Subgroup& I) {
    for (const Elem& r : I.rows)
        for (std::size_t i = 0; i < L.rank(); ++i)
            if (!I.contains(bracket(L, r, basis_elem(L.A, i)))) return false;
    return true;
}

/* Quotient by an ideal.  Handles the ideals the census produces: echelon rows
 * that are either a p-power multiple of one basis vector, or carry a unit
 * coefficient at some basis vector (which is then substituted away).  Anything
 * else raises NoPureBasis. */
inline QuotientResult quotient(const LieRing& L, const Subgroup& I) {
    if (!ideal_check(L, I)) fail(Errc::NotAnIdeal, "subgroup is not an ideal");

    // current presentation: exponents + bracket table + projection of original basis
    std::vector<u32> exps(L.A.exps.begin(), L.A.exps.end());
    std::vector<Elem> rows;  // ideal generators still to process, in current coords
    for (const Elem& r : I.rows) rows.push_back(r);

    std::vector<std::vector<u64>> proj;  // original basis -> current coords
    for (std::size_t i = 0; i < L.rank(); ++i) {
        Elem e(L.rank(), 0);
        e[i] = 1;
        proj.push_back(e);
    }
    // bracket constants in current coords, full square for convenience
    std::vector<std::vector<Elem>> cc(L.rank(), std::vector<Elem>(L.rank()));
    for (std::size_t i = 0; i < L.rank(); ++i)
        for (std::size_t j = 0; j < L.rank(); ++j) {
            if (i == j) { cc[i][j] = Elem(L.rank(), 0); continue; }
            Elem v = i < j ? L.c(i, j) : neg(L.A, L.c(j, i));
            cc[i][j] = v;
        }

    std::vector<bool> alive(L.rank(), true);
    std::vector<u64> cmod(L.A.mods.begin(), L.A.mods.end());

    auto reduce_elem = [&](Elem& v) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = alive[i] ? v[i] % cmod[i] : 0;
    };

    auto apply_subst = [&](std::size_t col, const Elem& repl) {
        // e_col := repl in every stored vector; repl has zero at col
        auto rewrite = [&](Elem& v) {
            u64 c = v[col];
            if (c) {
                v[col] = 0;
                for (std::size_t k = 0; k < v.size(); ++k)
                    if (k != col && repl[k]) v[k] = addmod(v[k], mulmod(c % cmod[k], repl[k], cmod[k]), cmod[k]);
            }
        };
        for (auto& r : rows) rewrite(r);
        for (auto& pr : proj) rewrite(pr);
        for (auto& rowv : cc)
            for (auto& e : rowv) rewrite(e);
        alive[col] = false;
    };

    std::size_t guard = 0;
    while (!rows.empty()) {
        if (++guard > 4 * L.rank() * L.A.mu1() + 8) fail(Errc::Internal, "quotient reduction loop");
        Elem r = rows.back();
        rows.pop_back();
        reduce_elem(r);
        if (is_zero(r)) continue;

        std::vector<std::size_t> supp;
        for (std::size_t i = 0; i < r.size(); ++i)
            if (r[i]) supp.push_back(i);

        std::optional<std::size_t> unitcol;
        for (std::size_t i : supp)
            if (r[i] % L.A.p != 0) { unitcol = i; break; }

        if (supp.size() == 1 && !unitcol) {
            std::size_t c0 = supp[0];
            u32 v = valuation(r[c0], L.A.p, exps[c0]);
            // <p^v e_c>: exponent drops to v
            exps[c0] = v;
            cmod[c0] = pow_u64_checked(L.A.p, v);
            if (v == 0) {
                alive[c0] = false;
            }
            for (auto& rr : rows) reduce_elem(rr);
            continue;
        }
        if (unitcol) {
            std::size_t c0 = *unitcol;
            // order of r must match the coordinate it eliminates
            u32 need = 0;
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (!alive[i] || exps[i] == 0 || r[i] == 0) continue;
                u32 v = valuation(r[i], L.A.p, exps[i]);
                need = std::max(need, exps[i] - v);
            }
            if (pow_u64_checked(L.A.p, need) != cmod[c0])
                fail(Errc::NoPureBasis, "relation order does not match eliminated coordinate");
            u64 inv = unit_inverse(r[c0] % cmod[c0], cmod[c0]);
            Elem repl(L.rank(), 0);
            for (std::size_t k = 0; k < r.size(); ++k) {
                if (k == c0 || !r[k]) continue;
                repl[k] = negmod(mulmod(inv % cmod[k], r[k], cmod[k]), cmod[k]);
            }
            apply_subst(c0, repl);
            for (auto& rr : rows) reduce_elem(rr);
            continue;
        }
        fail(Errc::NoPureBasis, "ideal generator has no unit coordinate and mixed support");
    }

    // assemble surviving coordinates, sorted by exponent descending
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < L.rank(); ++i)
        if (alive[i] && exps[i] > 0) keep.push_back(i);
    std::stable_sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) { return exps[a] > exps[b]; });
    if (keep.empty()) fail(Errc::SpecViolation, "quotient is trivial");

    std::vector<u32> qexps;
    for (std::size_t i : keep) qexps.push_back(exps[i]);
    AbelianType QA(L.A.p, qexps);

    auto project = [&](const Elem& v) {
        Elem out(keep.size(), 0);
        for (std::size_t t = 0; t < keep.size(); ++t) out[t] = v[keep[t]] % QA.mods[t];
        return out;
    };

    std::vector<Elem> table;
    for (std::size_t a = 0; a < keep.size(); ++a)
        for (std::size_t b = a + 1; b < keep.size(); ++b) table.push_back(project(cc[keep[a]][keep[b]]));

    QuotientResult qr;
    qr.ring = make_liering(QA, table);
    for (std::size_t i = 0; i < L.rank(); ++i) qr.projection.push_back(project(proj[i]));

    u64 expect = L.A.order() / I.order();
    if (qr.ring.A.order() != expect) fail(Errc::Internal, "quotient order mismatch");
    return qr;
}

}  // namespace coex

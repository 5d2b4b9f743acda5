#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <tuple>

#include "coex/graded.hpp"
#include "coex/residue.hpp"

namespace coex {

/* Equivalence of nilpotent centralizing derivations.
 *
 *   sigma ~ tau   iff   sigma * pi = pi * (ad_r x + alpha * tau)
 *
 * for some Lie automorphism pi fixing the line through the distinguished
 * central generator z (so z pi = alpha z, alpha read off pi) and some inner
 * source x.  Two independent decision procedures live here: a breadth-first
 * orbit partition driven by a small generator move set, and a witness search
 * over the fully enumerated automorphism set.  The test suite plays them
 * against each other and against published orbit counts.
 */

constexpr u64 kAutScanCap = u64(1) << 31;

namespace detail {

inline void require_marked_ring(const LieRing& U, const Elem& z) {
    const AbelianType& A = U.A;
    std::size_t r = A.rank();
    bool ok = z.size() == r && z[0] % A.p != 0 && z[0] < A.mods[0];
    for (std::size_t j = 1; ok && j < r; ++j) ok = (z[j] == 0);
    if (!ok) fail(Errc::ParameterViolation, "z must generate the distinguished central line");
    for (std::size_t j = 1; j < r; ++j)
        if (!is_zero(U.c(0, j)))
            fail(Errc::SpecViolation, "distinguished generator must be central");
}

/* Hot-loop helpers working on raw u64 buffers.  All moduli here are p-powers
 * bounded by p^2 for the rings this engine serves, so plain multiply followed
 * by one division is safe and much cheaper than 128-bit modmul; the guard in
 * CodePacker and the small_math check keep us honest if that ever changes. */

inline bool small_math_ok(const CoordShape& S) {
    u64 m = 1;
    for (u64 v : S.mods) m = std::max(m, v);
    return m <= (u64(1) << 20);
}

inline void mat_mul_flat(std::size_t r, const u64* colmod, const u64* a, const u64* b,
                         u64* out) {
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            u64 acc = 0;
            for (std::size_t k = 0; k < r; ++k) acc += a[i * r + k] * b[k * r + j];
            out[i * r + j] = acc % colmod[j];
        }
}

struct CodePacker {
    std::vector<u64> w;
    u64 total = 1;
    explicit CodePacker(const CoordShape& S) {
        std::size_t n = S.rank();
        w.assign(n, 1);
        u64 acc = 1;
        for (std::size_t k = n; k-- > 0;) {
            w[k] = acc;
            if (acc > ~u64(0) / S.mods[k]) fail(Errc::TooLarge, "state codes exceed 64 bits");
            acc *= S.mods[k];
        }
        total = acc;
    }
    u64 pack(const u64* m) const {
        u64 s = 0;
        for (std::size_t k = 0; k < w.size(); ++k) s += m[k] * w[k];
        return s;
    }
    void unpack(const CoordShape& S, u64 code, u64* m) const {
        for (std::size_t k = 0; k < w.size(); ++k) m[k] = (code / w[k]) % S.mods[k];
    }
};

/* Allocation-free version of the SubgroupBuilder sweep for a handful of
 * generators, plus a canonicalizing coset reduction.  reduce() brings the
 * pivot coordinate of every row below p^pivval; two inputs reduce to the same
 * buffer exactly when they lie in the same coset of the span (rows are zero
 * left of their pivot, so later sweeps never disturb finished columns). */
struct FlatSpan {
    std::size_t n = 0;
    u64 p = 1, maxmod = 1;
    const u64* mods = nullptr;
    const u32* exps = nullptr;
    std::vector<u64> rows;
    std::vector<std::size_t> pivcol, order;
    std::vector<u64> pivpow;
    std::vector<u64> work, scratch;

    void reset(const CoordShape& S) {
        n = S.rank();
        p = S.p;
        mods = S.mods.data();
        exps = S.exps.data();
        maxmod = 1;
        for (u64 v : S.mods) maxmod = std::max(maxmod, v);
        rows.clear();
        pivcol.clear();
        order.clear();
        pivpow.clear();
        work.clear();
        if (!small_math_ok(S)) fail(Errc::TooLarge, "moduli too large for the flat span kernel");
    }

    std::size_t size() const { return pivcol.size(); }

    void insert(const u64* v) {
        work.insert(work.end(), v, v + n);
        drain();
    }

    void reduce(u64* m) const {
        for (std::size_t oi : order) {
            std::size_t c = pivcol[oi];
            u64 q = m[c] / pivpow[oi];
            if (!q) continue;
            const u64* R = rows.data() + oi * n;
            for (std::size_t t = c; t < n; ++t) {
                if (!R[t]) continue;
                u64 s = (q % mods[t]) * R[t] % mods[t];
                m[t] = m[t] >= s ? m[t] - s : m[t] + mods[t] - s;
            }
        }
    }

    bool contains(const u64* m) {
        scratch.assign(m, m + n);
        reduce(scratch.data());
        for (u64 v : scratch)
            if (v) return false;
        return true;
    }

  private:
    static u32 val_of(u64 x, u64 p_, u32 cap) {
        u32 v = 0;
        while (v < cap && x % p_ == 0) { x /= p_; ++v; }
        return v;
    }

    void drain() {
        while (!work.empty()) {
            scratch.assign(work.end() - static_cast<std::ptrdiff_t>(n), work.end());
            work.resize(work.size() - n);
            sweep(scratch.data());
        }
    }

    void push_work(const u64* v) { work.insert(work.end(), v, v + n); }

    void scale_into(u64 c, const u64* v, u64* out) const {
        for (std::size_t t = 0; t < n; ++t) out[t] = (c % mods[t]) * v[t] % mods[t];
    }

    void install(std::size_t c, u32 vv, const u64* v) {
        u64 pk = 1;
        for (u32 t = 0; t < vv; ++t) pk *= p;
        u64 unit = v[c] / pk;
        u64 winv = unit_inverse(unit % maxmod, maxmod);
        std::size_t ri = pivcol.size();
        rows.resize(rows.size() + n);
        scale_into(winv, v, rows.data() + ri * n);
        pivcol.push_back(c);
        pivpow.push_back(pk);
        order.insert(std::upper_bound(order.begin(), order.end(), ri,
                                      [&](std::size_t a, std::size_t b) {
                                          return pivcol[a] < pivcol[b];
                                      }),
                     ri);
        // shadow keeps the sweep sound over Z/p^e
        u64 mult = 1;
        for (u32 t = 0; t < exps[c] - vv; ++t) mult *= p;
        std::vector<u64> sh(n);
        scale_into(mult, rows.data() + ri * n, sh.data());
        bool nz = false;
        for (u64 x : sh) nz |= (x != 0);
        if (nz) push_work(sh.data());
    }

    void sweep(u64* v) {
        for (std::size_t c = 0; c < n; ++c) {
            if (v[c] == 0) continue;
            u32 vv = val_of(v[c], p, exps[c]);
            std::size_t ri = pivcol.size();
            for (std::size_t k = 0; k < pivcol.size(); ++k)
                if (pivcol[k] == c) { ri = k; break; }
            if (ri == pivcol.size()) {
                install(c, vv, v);
                return;
            }
            if (pivpow[ri] > 1 && v[c] % pivpow[ri] != 0) {
                // smaller valuation: the new row takes the pivot slot
                std::vector<u64> displaced(rows.begin() + static_cast<std::ptrdiff_t>(ri * n),
                                           rows.begin() + static_cast<std::ptrdiff_t>((ri + 1) * n));
                u64 pk = 1;
                for (u32 t = 0; t < vv; ++t) pk *= p;
                u64 winv = unit_inverse((v[c] / pk) % maxmod, maxmod);
                scale_into(winv, v, rows.data() + ri * n);
                pivpow[ri] = pk;
                u64 mult = 1;
                for (u32 t = 0; t < exps[c] - vv; ++t) mult *= p;
                std::vector<u64> sh(n);
                scale_into(mult, rows.data() + ri * n, sh.data());
                bool nz = false;
                for (u64 x : sh) nz |= (x != 0);
                if (nz) push_work(sh.data());
                push_work(displaced.data());
                return;
            }
            u64 q = v[c] / pivpow[ri];
            const u64* R = rows.data() + ri * n;
            for (std::size_t t = c; t < n; ++t) {
                if (!R[t]) continue;
                u64 s = (q % mods[t]) * R[t] % mods[t];
                v[t] = v[t] >= s ? v[t] - s : v[t] + mods[t] - s;
            }
        }
    }
};

}  // namespace detail

/* ---- the state set: nilpotent derivations killing z ---- */

struct StateSpace {
    CoordShape mshape;
    std::vector<u64> codes;  // sorted packed matrices, row-major mixed radix
    u64 der_order = 0;       // |Der(U)_z| before the nilpotency filter

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t size() const { return codes.size(); }

    std::size_t index_of(u64 code) const {
        auto it = std::lower_bound(codes.begin(), codes.end(), code);
        return (it != codes.end() && *it == code) ? static_cast<std::size_t>(it - codes.begin())
                                                  : npos;
    }

    Elem matrix_at(std::size_t k) const { return elem_at(mshape, codes[k]); }
};

/* Walks the derivation space in slices: the coefficients of echelon rows with
 * nonzero mod-p reduction are split off and enumerated outermost, because the
 * mod-p image of the matrix (hence nilpotency) depends on nothing else.  A
 * non-nilpotent slice is skipped wholesale. */
inline StateSpace nilpotent_states(const LieRing& U) {
    StateSpace out;
    Subgroup S = derivation_space(U, true, out.mshape);
    out.der_order = S.order();
    const CoordShape& M = out.mshape;
    std::size_t n2 = M.rank();
    detail::CodePacker pk(M);

    std::vector<std::size_t> rel, irr;
    std::vector<u64> range(S.rows.size());
    for (std::size_t i = 0; i < S.rows.size(); ++i) {
        range[i] = pow_u64_checked(M.p, M.exps[S.pivcol[i]] - S.pivval[i]);
        bool modp = false;
        for (u64 v : S.rows[i]) modp |= (v % M.p != 0);
        (modp ? rel : irr).push_back(i);
    }

    // inner odometer: leftover freedom once the mod-p class of each relevant
    // coefficient is pinned
    struct Digit {
        Elem step, back;  // back = (range-1) * step, for the rollover
        u64 range;
    };
    std::vector<Digit> dig;
    for (std::size_t i : rel) {
        u64 rg = range[i] / M.p;
        if (rg == 1) continue;
        Elem st = scalar_mul(M, M.p, S.rows[i]);
        dig.push_back({st, scalar_mul(M, rg - 1, st), rg});
    }
    for (std::size_t i : irr)
        dig.push_back({S.rows[i], scalar_mul(M, range[i] - 1, S.rows[i]), range[i]});

    std::vector<u64> kbar(rel.size(), 0);
    std::vector<u64> dcount(dig.size(), 0);
    Elem base = zero_elem(M), cur = zero_elem(M);
    for (;;) {
        std::fill(base.begin(), base.end(), 0);
        for (std::size_t i = 0; i < rel.size(); ++i)
            if (kbar[i]) base = add(M, base, scalar_mul(M, kbar[i], S.rows[rel[i]]));
        if (is_nilpotent_mat(U.A, base)) {
            cur = base;
            std::fill(dcount.begin(), dcount.end(), 0);
            for (;;) {
                out.codes.push_back(pk.pack(cur.data()));
                std::size_t k = dig.size();
                while (k-- > 0) {
                    if (++dcount[k] < dig[k].range) {
                        for (std::size_t t = 0; t < n2; ++t) {
                            cur[t] += dig[k].step[t];
                            if (cur[t] >= M.mods[t]) cur[t] -= M.mods[t];
                        }
                        break;
                    }
                    dcount[k] = 0;
                    cur = sub(M, cur, dig[k].back);
                }
                if (k == static_cast<std::size_t>(-1)) break;
            }
        }
        std::size_t k = kbar.size();
        while (k-- > 0) {
            if (++kbar[k] < M.p) break;
            kbar[k] = 0;
        }
        if (k == static_cast<std::size_t>(-1)) break;
    }

    std::sort(out.codes.begin(), out.codes.end());
    for (std::size_t i = 1; i < out.codes.size(); ++i)
        if (out.codes[i] == out.codes[i - 1])
            fail(Errc::Internal, "state enumeration produced a duplicate");
    return out;
}

/* ---- generator moves for the orbit BFS ---- */

struct AutMove {
    Elem g, g_inv;
    u64 alpha = 1;
};

inline std::vector<AutMove> line_aut_moves(const LieRing& U) {
    const AbelianType& A = U.A;
    std::size_t r = A.rank();
    std::vector<AutMove> out;
    auto try_push = [&](Elem g) {
        auto a = zline_scalar(A, g);
        if (!a || !is_lie_automorphism(U, g)) return false;
        Elem gi = inverse_mat(A, g);
        out.push_back({std::move(g), std::move(gi), *a});
        return true;
    };
    // one bump per off-diagonal entry, at the first admissible p-power
    for (std::size_t i = 1; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            if (i == j) continue;
            for (u32 s = grade_step(A, i, j); s < A.exps[j]; ++s) {
                Elem g = identity_mat(A);
                g[i * r + j] = pow_u64_checked(A.p, s);
                if (try_push(std::move(g))) break;
            }
        }
    // diagonal moves from a per-slot candidate list; the bracket filter keeps
    // exactly the combinations the ring allows (they come linked for W)
    std::vector<std::vector<u64>> cand(r);
    for (std::size_t i = 0; i < r; ++i) {
        cand[i] = {1, primitive_root(PrimePower(A.p, A.exps[i]))};
        if (A.exps[i] >= 2) cand[i].push_back(1 + A.p);
    }
    std::vector<std::size_t> pick(r, 0);
    for (;;) {
        bool all_one = true;
        for (std::size_t i = 0; i < r; ++i) all_one &= (pick[i] == 0);
        if (!all_one) {
            Elem g = zero_mat(A);
            for (std::size_t i = 0; i < r; ++i) g[i * r + i] = cand[i][pick[i]];
            try_push(std::move(g));
        }
        std::size_t k = r;
        while (k-- > 0) {
            if (++pick[k] < cand[k].size()) break;
            pick[k] = 0;
        }
        if (k == static_cast<std::size_t>(-1)) break;
    }
    return out;
}

inline std::vector<AutMove> random_line_auts(const LieRing& U, std::size_t count, u64 seed) {
    const AbelianType& A = U.A;
    std::size_t r = A.rank();
    std::mt19937_64 rng(seed);
    std::vector<AutMove> out;
    u64 mod0 = A.mods[0];
    for (u64 tries = 0; out.size() < count; ++tries) {
        if (tries > 200000 * static_cast<u64>(count))
            fail(Errc::Internal, "automorphism rejection sampling exhausted");
        Elem g = zero_mat(A);
        u64 a = 0;
        while (a % A.p == 0) a = rng() % mod0;
        g[0] = a;
        for (std::size_t i = 1; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) {
                u64 step = pow_u64_checked(A.p, grade_step(A, i, j));
                g[i * r + j] = (rng() % (A.mods[j] / step)) * step;
            }
        if (!is_lie_automorphism(U, g)) continue;
        Elem gi = inverse_mat(A, g);
        out.push_back({std::move(g), std::move(gi), a});
    }
    return out;
}

/* ---- orbit partition by breadth-first closure ---- */

struct OrbitPartition {
    StateSpace states;
    std::vector<int> class_of;         // state index -> class id
    std::vector<u64> sizes;            // class id -> orbit size
    std::vector<u64> representatives;  // class id -> least packed code in the orbit

    std::size_t classes() const { return sizes.size(); }

    std::size_t class_of_code(u64 code) const {
        std::size_t k = states.index_of(code);
        if (k == StateSpace::npos)
            fail(Errc::ParameterViolation, "matrix is not a state of this partition");
        return static_cast<std::size_t>(class_of[k]);
    }
};

inline OrbitPartition orbit_partition(const LieRing& U, const Elem& z,
                                      const std::vector<AutMove>& extra_moves = {}) {
    detail::require_marked_ring(U, z);
    if (U.A.n() > 5) fail(Errc::TooLarge, "carrier larger than p^5");
    OrbitPartition P;
    P.states = nilpotent_states(U);
    const CoordShape& M = P.states.mshape;
    const AbelianType& A = U.A;
    std::size_t r = A.rank(), n2 = M.rank();
    detail::CodePacker pk(M);
    if (!detail::small_math_ok(M)) fail(Errc::TooLarge, "moduli too large for the BFS kernel");

    std::vector<AutMove> moves = line_aut_moves(U);
    moves.insert(moves.end(), extra_moves.begin(), extra_moves.end());
    std::vector<Elem> inner;
    for (std::size_t i = 0; i < r; ++i) {
        Elem d = inner_derivation(U, basis_elem(A, i));
        if (!is_zero(d)) inner.push_back(std::move(d));
    }

    P.class_of.assign(P.states.size(), -1);
    std::vector<u32> queue;
    std::vector<u64> cur(n2), s1(n2), t1(n2), t2(n2);
    const u64* colmod = A.mods.data();

    auto visit = [&](const u64* mat, int cid) {
        std::size_t k = P.states.index_of(pk.pack(mat));
        if (k == StateSpace::npos)
            fail(Errc::Internal, "equivalence move left the nilpotent derivation set");
        if (P.class_of[k] < 0) {
            P.class_of[k] = cid;
            queue.push_back(static_cast<u32>(k));
        }
    };

    for (std::size_t start = 0; start < P.states.size(); ++start) {
        if (P.class_of[start] >= 0) continue;
        int cid = static_cast<int>(P.sizes.size());
        queue.clear();
        queue.push_back(static_cast<u32>(start));
        P.class_of[start] = cid;
        std::size_t qh = 0;
        while (qh < queue.size()) {
            pk.unpack(M, P.states.codes[queue[qh++]], cur.data());
            for (const AutMove& mv : moves) {
                if (mv.alpha == 1) {
                    std::copy(cur.begin(), cur.end(), s1.begin());
                } else {
                    for (std::size_t t = 0; t < n2; ++t)
                        s1[t] = (mv.alpha % M.mods[t]) * cur[t] % M.mods[t];
                }
                detail::mat_mul_flat(r, colmod, mv.g.data(), s1.data(), t1.data());
                detail::mat_mul_flat(r, colmod, t1.data(), mv.g_inv.data(), t2.data());
                visit(t2.data(), cid);
            }
            for (const Elem& d : inner) {
                for (std::size_t t = 0; t < n2; ++t) {
                    t2[t] = cur[t] + d[t];
                    if (t2[t] >= M.mods[t]) t2[t] -= M.mods[t];
                }
                visit(t2.data(), cid);
            }
        }
        P.representatives.push_back(P.states.codes[start]);
        P.sizes.push_back(qh);
    }

    u64 total = 0;
    for (u64 s : P.sizes) total += s;
    if (total != P.states.size()) fail(Errc::Internal, "orbit sizes do not sum to the state count");
    return P;
}

/* ---- exhaustive enumeration of line-fixing automorphisms ---- */

/* Streams every Lie automorphism with z pi = alpha z.  Row 0 is (alpha,0,..),
 * the other rows run over the graded entry ranges; for each row configuration
 * the bracket conditions split into alpha-free coordinate checks plus one
 * linear congruence for alpha, so the alpha loop only visits solutions.
 * fn(pi, alpha) returns false to stop early. */
template <class Fn>
inline void enumerate_lie_auts_fixing_line(const LieRing& U, const Elem& z, Fn&& fn,
                                           u64 cap = kAutScanCap) {
    detail::require_marked_ring(U, z);
    const AbelianType& A = U.A;
    std::size_t r = A.rank();
    u64 p = A.p, mod0 = A.mods[0];
    u32 e0 = A.exps[0];

    struct Slot {
        std::size_t flat;
        u64 step, range;
    };
    std::vector<Slot> slots;
    u64 raw = 1;
    u64 phi = mod0 - mod0 / p;
    for (std::size_t i = 1; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            u64 step = pow_u64_checked(p, grade_step(A, i, j));
            u64 range = A.mods[j] / step;
            slots.push_back({i * r + j, step, range});
            if (raw > cap / range) fail(Errc::TooLarge, "automorphism scan exceeds the cap");
            raw *= range;
        }
    if (raw > cap / std::max<u64>(phi, 1))
        fail(Errc::TooLarge, "automorphism scan exceeds the cap");

    struct Pair {
        std::size_t i, j;
        const Elem* c;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 1; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j) pairs.push_back({i, j, &U.c(i, j)});

    Elem m = zero_mat(A);
    std::vector<u64> digit(slots.size(), 0);
    std::vector<u64> lhs(r), minor((r - 1) * (r - 1));
    Elem rowi(r), rowj(r);

    for (;;) {
        for (std::size_t ii = 0; ii + 1 < r; ++ii)
            for (std::size_t jj = 0; jj + 1 < r; ++jj)
                minor[ii * (r - 1) + jj] = m[(ii + 1) * r + (jj + 1)] % p;
        if (fp_det(p, r - 1, minor) != 0) {
            bool okcfg = true;
            u64 abase = 0, astep = 1;  // alpha == abase (mod astep)
            for (const Pair& pr : pairs) {
                const Elem& cv = *pr.c;
                for (std::size_t t = 0; t < r; ++t) {
                    u64 acc = 0, md = A.mods[t];
                    for (std::size_t k = 1; k < r; ++k)
                        if (cv[k] && m[k * r + t]) acc += (cv[k] % md) * (m[k * r + t] % md) % md;
                    lhs[t] = acc % md;
                }
                for (std::size_t t = 0; t < r; ++t) rowi[t] = m[pr.i * r + t];
                for (std::size_t t = 0; t < r; ++t) rowj[t] = m[pr.j * r + t];
                Elem rhs = bracket(U, rowi, rowj);
                for (std::size_t t = 1; t < r; ++t)
                    if (lhs[t] != rhs[t]) {
                        okcfg = false;
                        break;
                    }
                if (!okcfg) break;
                u64 u = cv[0] % mod0;
                u64 w = submod(rhs[0], lhs[0], mod0);
                if (u == 0) {
                    if (w != 0) okcfg = false;
                } else {
                    u32 k = valuation(u, p, e0);
                    u64 pk = pow_u64_checked(p, k);
                    if (w % pk != 0) {
                        okcfg = false;
                    } else {
                        u64 st = mod0 / pk;
                        u64 a0 = mulmod(w / pk, unit_inverse((u / pk) % st, st), st);
                        if (astep == 1) {
                            abase = a0;
                            astep = st;
                        } else {
                            u64 g = std::min(astep, st);
                            if (abase % g != a0 % g) okcfg = false;
                            else if (st > astep) {
                                abase = a0;
                                astep = st;
                            }
                        }
                    }
                }
                if (!okcfg) break;
            }
            if (okcfg) {
                for (u64 a = abase; a < mod0; a += astep) {
                    if (a % p == 0) continue;
                    m[0] = a;
                    if (!fn(static_cast<const Elem&>(m), a)) return;
                }
                m[0] = 0;
            }
        }
        std::size_t k = slots.size();
        while (k-- > 0) {
            if (++digit[k] < slots[k].range) {
                m[slots[k].flat] += slots[k].step;
                break;
            }
            digit[k] = 0;
            m[slots[k].flat] = 0;
        }
        if (k == static_cast<std::size_t>(-1)) break;
    }
}

inline u64 count_lie_auts_fixing_line(const LieRing& U, const Elem& z, u64 cap = kAutScanCap) {
    u64 n = 0;
    enumerate_lie_auts_fixing_line(
        U, z,
        [&](const Elem&, u64) {
            ++n;
            return true;
        },
        cap);
    return n;
}

/* ---- the direct witness search ---- */

struct EquivalenceWitness {
    Elem pi;
    u64 alpha = 1;
    Elem x;
};

inline void require_state(const LieRing& U, const Elem& s) {
    const AbelianType& A = U.A;
    std::size_t r = A.rank();
    if (s.size() != r * r || !is_graded(A, s))
        fail(Errc::ParameterViolation, "not a graded matrix over the carrier");
    for (std::size_t j = 0; j < r; ++j)
        if (s[j]) fail(Errc::ParameterViolation, "derivation must kill z");
    if (!is_derivation(U, s)) fail(Errc::ParameterViolation, "matrix is not a derivation");
    if (!is_nilpotent_mat(A, s)) fail(Errc::ParameterViolation, "derivation is not nilpotent");
}

inline bool witness_valid(const LieRing& U, const Elem& sigma, const Elem& tau,
                          const EquivalenceWitness& wit) {
    const AbelianType& A = U.A;
    if (!is_lie_automorphism(U, wit.pi)) return false;
    auto a = zline_scalar(A, wit.pi);
    if (!a || *a != wit.alpha) return false;
    Elem lhs = compose_mat(A, sigma, wit.pi);
    Elem inner = inner_derivation(U, wit.x);
    Elem rhs = compose_mat(A, wit.pi, add(mat_shape(A), inner, scalar_mul(mat_shape(A), wit.alpha, tau)));
    return lhs == rhs;
}

inline std::optional<EquivalenceWitness> equivalent_direct(const LieRing& U, const Elem& z,
                                                           const Elem& sigma, const Elem& tau,
                                                           u64 cap = kAutScanCap) {
    require_state(U, sigma);
    require_state(U, tau);
    const AbelianType& A = U.A;
    std::size_t r = A.rank(), n2 = r * r;
    CoordShape mshape = mat_shape(A);
    if (!detail::small_math_ok(mshape)) fail(Errc::TooLarge, "moduli too large for the witness scan");

    std::vector<Elem> inner_gens;
    for (std::size_t i = 0; i < r; ++i) {
        Elem d = inner_derivation(U, basis_elem(A, i));
        if (!is_zero(d)) inner_gens.push_back(std::move(d));
    }

    detail::FlatSpan span;
    std::vector<u64> L(n2), R(n2), t1(n2);
    const u64* colmod = A.mods.data();
    std::optional<EquivalenceWitness> found;

    enumerate_lie_auts_fixing_line(
        U, z,
        [&](const Elem& pi, u64 alpha) {
            // test sigma*pi - alpha*(pi*tau) against the span of ad(e_i)*pi
            span.reset(mshape);
            for (const Elem& d : inner_gens) {
                detail::mat_mul_flat(r, colmod, d.data(), pi.data(), t1.data());
                span.insert(t1.data());
            }
            detail::mat_mul_flat(r, colmod, sigma.data(), pi.data(), L.data());
            detail::mat_mul_flat(r, colmod, pi.data(), tau.data(), R.data());
            for (std::size_t t = 0; t < n2; ++t) {
                u64 s = (alpha % mshape.mods[t]) * R[t] % mshape.mods[t];
                L[t] = L[t] >= s ? L[t] - s : L[t] + mshape.mods[t] - s;
            }
            if (!span.contains(L.data())) return true;

            // recover the inner source and check the defining identity exactly
            Elem piinv = inverse_mat(A, pi);
            Elem diff(L.begin(), L.end());
            Elem admat = compose_mat(A, diff, piinv);
            std::vector<std::pair<Elem, Elem>> graph;
            for (std::size_t i = 0; i < r; ++i)
                graph.emplace_back(inner_derivation(U, basis_elem(A, i)), basis_elem(A, i));
            AugmentedEchelon solver(mshape, static_cast<const CoordShape&>(A), graph);
            auto x = solver.solve(admat);
            if (!x) fail(Errc::Internal, "witness difference is not an inner derivation");
            EquivalenceWitness wit{pi, alpha, *x};
            if (!witness_valid(U, sigma, tau, wit))
                fail(Errc::Internal, "recovered witness fails the defining identity");
            found = std::move(wit);
            return false;
        },
        cap);
    return found;
}

/* Pairwise inequivalence of a representative list, decided by one pass over
 * the full automorphism set.  Per automorphism each representative is mapped
 * to the canonical form of sigma*pi (left side) and alpha*pi*sigma (right
 * side) modulo the span of ad(e_i)*pi; a cross match between distinct
 * representatives is exactly an equivalence witness. */
struct PairwiseDirectReport {
    bool all_inequivalent = true;
    u64 line_auts = 0;
    std::pair<std::size_t, std::size_t> hit{0, 0};
};

inline PairwiseDirectReport pairwise_inequivalent_direct(const LieRing& U, const Elem& z,
                                                         const std::vector<Elem>& reps,
                                                         u64 cap = kAutScanCap) {
    for (const Elem& s : reps) require_state(U, s);
    const AbelianType& A = U.A;
    std::size_t r = A.rank(), n2 = r * r, nr = reps.size();
    CoordShape mshape = mat_shape(A);
    if (!detail::small_math_ok(mshape)) fail(Errc::TooLarge, "moduli too large for the witness scan");
    detail::CodePacker pk(mshape);

    std::vector<Elem> inner_gens;
    for (std::size_t i = 0; i < r; ++i) {
        Elem d = inner_derivation(U, basis_elem(A, i));
        if (!is_zero(d)) inner_gens.push_back(std::move(d));
    }

    detail::FlatSpan span;
    std::vector<u64> t1(n2), buf(n2);
    std::vector<u64> codesL(nr), codesR(nr);
    const u64* colmod = A.mods.data();
    PairwiseDirectReport out;

    enumerate_lie_auts_fixing_line(
        U, z,
        [&](const Elem& pi, u64 alpha) {
            ++out.line_auts;
            span.reset(mshape);
            for (const Elem& d : inner_gens) {
                detail::mat_mul_flat(r, colmod, d.data(), pi.data(), t1.data());
                span.insert(t1.data());
            }
            for (std::size_t k = 0; k < nr; ++k) {
                detail::mat_mul_flat(r, colmod, reps[k].data(), pi.data(), buf.data());
                span.reduce(buf.data());
                codesL[k] = pk.pack(buf.data());
                detail::mat_mul_flat(r, colmod, pi.data(), reps[k].data(), buf.data());
                for (std::size_t t = 0; t < n2; ++t)
                    buf[t] = (alpha % mshape.mods[t]) * buf[t] % mshape.mods[t];
                span.reduce(buf.data());
                codesR[k] = pk.pack(buf.data());
            }
            for (std::size_t i = 0; i < nr; ++i)
                for (std::size_t j = 0; j < nr; ++j) {
                    if (i == j || codesL[i] != codesR[j]) continue;
                    // double-check with the generic membership sweep
                    detail::mat_mul_flat(r, colmod, reps[i].data(), pi.data(), buf.data());
                    detail::mat_mul_flat(r, colmod, pi.data(), reps[j].data(), t1.data());
                    for (std::size_t t = 0; t < n2; ++t) {
                        u64 s = (alpha % mshape.mods[t]) * t1[t] % mshape.mods[t];
                        buf[t] = buf[t] >= s ? buf[t] - s : buf[t] + mshape.mods[t] - s;
                    }
                    if (!span.contains(buf.data()))
                        fail(Errc::Internal, "canonical form disagrees with the membership sweep");
                    out.all_inequivalent = false;
                    out.hit = {i, j};
                    return false;
                }
            return true;
        },
        cap);
    return out;
}

/* Verifies that each BFS class is closed under every enumerated automorphism.
 * Checking the representatives alone suffices: any state is reachable from its
 * representative by generator moves, and the automorphism set is closed under
 * composition, so closure on representatives propagates to the whole class. */
inline bool orbit_closure_under_all_auts(const LieRing& U, const Elem& z,
                                         const OrbitPartition& P, u64 cap = kAutScanCap) {
    const AbelianType& A = U.A;
    std::size_t r = A.rank(), n2 = r * r;
    const CoordShape& M = P.states.mshape;
    detail::CodePacker pk(M);
    std::vector<u64> cur(n2), s1(n2), t1(n2), t2(n2);
    const u64* colmod = A.mods.data();

    bool ok = true;
    enumerate_lie_auts_fixing_line(
        U, z,
        [&](const Elem& pi, u64 alpha) {
            Elem piinv = inverse_mat(A, pi);
            for (std::size_t c = 0; c < P.classes(); ++c) {
                pk.unpack(M, P.representatives[c], cur.data());
                for (std::size_t t = 0; t < n2; ++t)
                    s1[t] = (alpha % M.mods[t]) * cur[t] % M.mods[t];
                detail::mat_mul_flat(r, colmod, pi.data(), s1.data(), t1.data());
                detail::mat_mul_flat(r, colmod, t1.data(), piinv.data(), t2.data());
                std::size_t k = P.states.index_of(pk.pack(t2.data()));
                if (k == StateSpace::npos)
                    fail(Errc::Internal, "automorphism left the nilpotent derivation set");
                if (P.class_of[k] != static_cast<int>(c)) {
                    ok = false;
                    return false;
                }
            }
            return true;
        },
        cap);
    return ok;
}

/* ---- transitivity on maximal-order central elements ---- */

/* Reaches out from z with automorphism moves (not restricted to the line) and
 * checks that every central element of order p^mu1 is hit.  A full hit proves
 * the transitivity claim; the generator set erring short would only ever give
 * a false negative. */
inline bool central_transitivity_check(const LieRing& U) {
    const AbelianType& A = U.A;
    std::size_t r = A.rank();
    if (A.n() > 5) fail(Errc::TooLarge, "carrier larger than p^5");
    for (std::size_t j = 1; j < r; ++j)
        if (!is_zero(U.c(0, j)))
            fail(Errc::SpecViolation, "distinguished generator must be central");

    u64 maxord = A.mods[0];
    Subgroup C = center(U);
    std::vector<u64> targets;
    for (const Elem& e : C.elements())
        if (element_order(A, e) == maxord) targets.push_back(elem_index(A, e));
    std::sort(targets.begin(), targets.end());

    std::vector<Elem> gens;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            if (i == j) continue;
            for (u32 s = grade_step(A, i, j); s < A.exps[j]; ++s) {
                Elem g = identity_mat(A);
                g[i * r + j] = pow_u64_checked(A.p, s);
                if (is_lie_automorphism(U, g)) {
                    gens.push_back(std::move(g));
                    break;
                }
            }
        }
    std::vector<std::vector<u64>> cand(r);
    for (std::size_t i = 0; i < r; ++i) {
        cand[i] = {1, primitive_root(PrimePower(A.p, A.exps[i]))};
        if (A.exps[i] >= 2) cand[i].push_back(1 + A.p);
    }
    std::vector<std::size_t> pick(r, 0);
    for (;;) {
        bool all_one = true;
        for (std::size_t i = 0; i < r; ++i) all_one &= (pick[i] == 0);
        if (!all_one) {
            Elem g = zero_mat(A);
            for (std::size_t i = 0; i < r; ++i) g[i * r + i] = cand[i][pick[i]];
            if (is_lie_automorphism(U, g)) gens.push_back(std::move(g));
        }
        std::size_t k = r;
        while (k-- > 0) {
            if (++pick[k] < cand[k].size()) break;
            pick[k] = 0;
        }
        if (k == static_cast<std::size_t>(-1)) break;
    }

    auto target_index = [&](u64 code) {
        auto it = std::lower_bound(targets.begin(), targets.end(), code);
        return (it != targets.end() && *it == code)
                   ? static_cast<std::size_t>(it - targets.begin())
                   : StateSpace::npos;
    };

    std::vector<char> seen(targets.size(), 0);
    std::vector<u64> queue;
    u64 z0 = elem_index(A, basis_elem(A, 0));
    std::size_t zi = target_index(z0);
    if (zi == StateSpace::npos) fail(Errc::Internal, "z is not a maximal-order central element");
    seen[zi] = 1;
    queue.push_back(z0);
    std::size_t qh = 0, reached = 1;
    while (qh < queue.size()) {
        Elem x = elem_at(A, queue[qh++]);
        for (const Elem& g : gens) {
            u64 code = elem_index(A, apply_mat(A, x, g));
            std::size_t k = target_index(code);
            if (k == StateSpace::npos)
                fail(Errc::Internal, "automorphism image left the central target set");
            if (!seen[k]) {
                seen[k] = 1;
                ++reached;
                queue.push_back(code);
            }
        }
    }
    return reached == targets.size();
}

}  // namespace coex

#pragma once

#include <algorithm>
#include <array>
#include <initializer_list>
#include <map>
#include <string>
#include <tuple>
#include <utility>

#include "coex/constructions.hpp"
#include "coex/equivalence.hpp"

namespace coex {

/* ---- the transversal of marked base rings ---- */

enum class BaseKind { V = 0, W = 1, X = 2 };

inline const char* base_name(BaseKind k) {
    switch (k) {
        case BaseKind::V: return "V";
        case BaseKind::W: return "W";
        case BaseKind::X: return "X";
    }
    return "?";
}

struct MarkedRing {
    LieRing ring;  // type (2,2,1) on basis (z, u1, u2)
    Elem z;        // the marked central element of order p^2
    BaseKind kind = BaseKind::X;
};

/* The three nilpotent Lie rings on (Z/p^2)z + (Z/p^2)u1 + (Z/p)u2 with z
 * central of order p^2, up to isomorphism:
 *   V: [u1,u2] = p u1,   W: [u1,u2] = p z,   X: abelian. */
inline MarkedRing base_ring_221(u64 p, BaseKind k) {
    if (p < 3 || !is_prime_u64(p)) fail(Errc::ParameterViolation, "p must be an odd prime");
    AbelianType A(p, {2, 2, 1});
    std::vector<Elem> table(3, zero_elem(A));
    if (k == BaseKind::V) table[2] = Elem{0, p, 0};
    if (k == BaseKind::W) table[2] = Elem{p, 0, 0};
    return MarkedRing{make_liering(A, std::move(table)), Elem{1, 0, 0}, k};
}

inline std::array<MarkedRing, 3> transversal_221(u64 p) {
    std::array<MarkedRing, 3> t{base_ring_221(p, BaseKind::V), base_ring_221(p, BaseKind::W),
                                base_ring_221(p, BaseKind::X)};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (isomorphic_small(t[i].ring, t[j].ring))
                fail(Errc::Internal, "transversal members must be pairwise non-isomorphic");
    return t;
}

/* ---- closed-form representative lists ---- */

struct Representative {
    BaseKind kind = BaseKind::X;
    Elem sigma;  // flat 3x3 matrix over mat_shape of the (2,2,1) type
};

/* One nilpotent derivation per equivalence class, 2p+1 for V, 3p+11 for W
 * and 18 for X.  Entry slots, row major over (z, u1, u2): sigma(u1) lands in
 * slots 3..5 and sigma(u2) in slots 6..8; the z row is zero.  nu is the least
 * quadratic non-residue and h the least primitive root modulo p. */
inline std::vector<Representative> representatives_221(u64 p) {
    if (p < 5 || !is_prime_u64(p)) fail(Errc::ParameterViolation, "p must be a prime >= 5");
    const u64 p2 = p * p;
    const u64 nu = least_nonresidue(p);
    const u64 h = primitive_root(p);
    MarkedRing base[3] = {base_ring_221(p, BaseKind::V), base_ring_221(p, BaseKind::W),
                          base_ring_221(p, BaseKind::X)};

    std::vector<Representative> out;
    out.reserve(5 * p + 30);
    auto add = [&](BaseKind k, std::initializer_list<std::pair<int, u64>> entries) {
        Elem m(9, 0);
        for (auto [slot, v] : entries) m[slot] = v;
        require_state(base[static_cast<int>(k)].ring, m);
        out.push_back({k, std::move(m)});
    };
    enum { U1_Z = 3, U1_U1 = 4, U1_U2 = 5, U2_Z = 6, U2_U1 = 7 };

    // V: u1-image in the line p<z> or carrying a unit u2 component
    add(BaseKind::V, {{U1_Z, p}});
    for (u64 e = 0; e < p; ++e) add(BaseKind::V, {{U2_Z, p * e}});
    for (u64 e = 0; e < p; ++e) add(BaseKind::V, {{U1_U2, 1}, {U2_Z, p * e}});

    // W, sigma(u1) without z component
    add(BaseKind::W, {});
    add(BaseKind::W, {{U1_U1, p}});
    add(BaseKind::W, {{U2_U1, p}});
    add(BaseKind::W, {{U2_U1, p * nu}});
    add(BaseKind::W, {{U1_U2, 1}});
    add(BaseKind::W, {{U1_U2, nu}});
    for (u64 a : {u64(1), nu})
        for (u64 b : {p, p * nu}) add(BaseKind::W, {{U1_U2, a}, {U2_U1, b}});
    // W, sigma(u1) with a unit z component; scaling and squares leave the
    // residue classes h^r and the quadratic pairing with the u2 component
    add(BaseKind::W, {{U1_Z, 1}});
    add(BaseKind::W, {{U1_Z, 1}, {U1_U1, p}});
    add(BaseKind::W, {{U1_Z, 1}, {U2_U1, p}});
    add(BaseKind::W, {{U1_Z, 1}, {U2_U1, p * nu}});
    for (u64 r = 1; r <= (p - 1) / 2; ++r) {
        u64 hr = powmod(h, r, p2);
        for (u64 a : {u64(1), h}) add(BaseKind::W, {{U1_Z, hr}, {U1_U2, a}});
        for (u64 a : {u64(1), h})
            for (u64 b : {p, p * h}) add(BaseKind::W, {{U1_Z, hr}, {U1_U2, a}, {U2_U1, b}});
    }

    // X, sigma(u1) without z component
    add(BaseKind::X, {});
    add(BaseKind::X, {{U1_Z, p}});
    add(BaseKind::X, {{U2_Z, p}});
    add(BaseKind::X, {{U1_U1, p}});
    add(BaseKind::X, {{U1_U1, p}, {U2_Z, p}});
    add(BaseKind::X, {{U2_U1, p}});
    add(BaseKind::X, {{U1_U1, p}, {U2_Z, p}, {U2_U1, p}});
    add(BaseKind::X, {{U1_U2, 1}});
    add(BaseKind::X, {{U1_U2, 1}, {U2_Z, p}});
    add(BaseKind::X, {{U1_U2, 1}, {U2_U1, p}});
    add(BaseKind::X, {{U1_U2, 1}, {U2_U1, p * nu}});
    // X, sigma(u1) with a unit z component
    add(BaseKind::X, {{U1_Z, 1}});
    add(BaseKind::X, {{U1_Z, 1}, {U1_U1, p}});
    add(BaseKind::X, {{U1_Z, 1}, {U2_U1, p}});
    add(BaseKind::X, {{U1_Z, 1}, {U1_U2, 1}});
    add(BaseKind::X, {{U1_Z, 1}, {U1_U2, 1}, {U2_Z, p}});
    add(BaseKind::X, {{U1_Z, 1}, {U1_U2, 1}, {U2_U1, p}});
    add(BaseKind::X, {{U1_Z, 1}, {U1_U2, 1}, {U2_U1, p * nu}});

    if (out.size() != 5 * p + 30) fail(Errc::Internal, "representative list has the wrong length");
    return out;
}

/* ---- verification of the (2,1) classification ---- */

struct Verify221Report {
    u64 p = 0;
    std::array<u64, 3> classes{};           // orbit counts for V, W, X
    std::array<u64, 3> expected{};          // 2p+1, 3p+11, 18
    std::array<u64, 3> nilpotent_states{};  // nilpotent derivations killing z, per ring
    std::array<u64, 3> der_orders{};        // |Der(U)_z| before the nilpotency filter
    u64 total = 0;
};

namespace detail {

inline Verify221Report verify_221_run(u64 p, bool inject_fault) {
    auto rings = transversal_221(p);
    auto reps = representatives_221(p);
    if (inject_fault) reps[1] = reps[0];  // duplicate one entry: breaks the bijection

    Verify221Report R;
    R.p = p;
    R.expected = {2 * p + 1, 3 * p + 11, 18};
    for (int k = 0; k < 3; ++k) {
        const MarkedRing& M = rings[k];
        OrbitPartition P = orbit_partition(M.ring, M.z);
        R.classes[k] = P.classes();
        R.nilpotent_states[k] = P.states.size();
        R.der_orders[k] = P.states.der_order;
        if (R.classes[k] != R.expected[k])
            fail(Errc::Mismatch, std::string(base_name(M.kind)) + ": expected " +
                                     std::to_string(R.expected[k]) + " classes, found " +
                                     std::to_string(R.classes[k]));
        std::vector<u32> hits(P.classes(), 0);
        CoordShape ms = mat_shape(M.ring.A);
        for (const auto& r : reps)
            if (r.kind == M.kind) ++hits[P.class_of_code(elem_index(ms, r.sigma))];
        for (std::size_t c = 0; c < hits.size(); ++c)
            if (hits[c] != 1)
                fail(Errc::Mismatch, std::string(base_name(M.kind)) + ": class " +
                                         std::to_string(c) + " hit " + std::to_string(hits[c]) +
                                         " times by the published list");
        R.total += R.classes[k];
    }
    if (R.total != 5 * p + 30)
        fail(Errc::Mismatch, "summed classes: expected " + std::to_string(5 * p + 30) +
                                 ", found " + std::to_string(R.total));
    return R;
}

}  // namespace detail

/* Orbit counts per base ring, published list hits every class exactly once,
 * and the 5p + 30 total.  Results are cached per prime; the fault-injection
 * variant always recomputes and is expected to throw Mismatch. */
inline const Verify221Report& verify_221(u64 p) {
    static std::map<u64, Verify221Report> cache;
    auto it = cache.find(p);
    if (it == cache.end()) it = cache.emplace(p, detail::verify_221_run(p, false)).first;
    return it->second;
}

inline Verify221Report verify_221(u64 p, bool inject_fault) {
    if (!inject_fault) return verify_221(p);
    return detail::verify_221_run(p, true);
}

/* Pairwise inequivalence of the published lists decided directly by scanning
 * the line-fixing automorphism groups, with no reference to the orbit
 * partition.  Costly; p = 5 takes seconds, p = 7 minutes. */
struct DirectCheckReport {
    u64 p = 0;
    std::array<u64, 3> line_auts{};
};

inline DirectCheckReport representatives_direct_check(u64 p) {
    auto rings = transversal_221(p);
    auto reps = representatives_221(p);
    DirectCheckReport R;
    R.p = p;
    for (int k = 0; k < 3; ++k) {
        std::vector<Elem> sig;
        for (const auto& r : reps)
            if (static_cast<int>(r.kind) == k) sig.push_back(r.sigma);
        PairwiseDirectReport rep = pairwise_inequivalent_direct(rings[k].ring, rings[k].z, sig);
        if (!rep.all_inequivalent)
            fail(Errc::Mismatch, std::string(base_name(rings[k].kind)) + ": representatives " +
                                     std::to_string(rep.hit.first) + " and " +
                                     std::to_string(rep.hit.second) + " are equivalent");
        R.line_auts[k] = rep.line_auts;
    }
    return R;
}

/* ---- census records ---- */

struct CensusRecord {
    u64 p = 0;
    u32 n = 0;
    std::vector<u32> partition;
    LieRing ring;
    RingFingerprint fp;
    std::string base;  // "V", "W", "X" or "type3"
    Elem sigma;        // defining derivation (extension records only)
    Elem z;            // marked central element in base coordinates (ditto)
    u32 m = 0;         // cyclic parameter of the extension (ditto)
};

inline bool record_canonical_less(const CensusRecord& a, const CensusRecord& b) {
    if (a.partition != b.partition) return a.partition < b.partition;
    if (a.fp.derived_order != b.fp.derived_order) return a.fp.derived_order > b.fp.derived_order;
    return a.ring.table < b.ring.table;
}

namespace detail {

inline std::vector<CensusRecord> census_221_run(u64 p, u32 n) {
    if (n < 7) fail(Errc::ParameterViolation, "n must be at least 7");
    verify_221(p);
    auto rings = transversal_221(p);
    std::vector<CensusRecord> out;
    for (const auto& r : representatives_221(p)) {
        const MarkedRing& M = rings[static_cast<int>(r.kind)];
        CensusRecord rec;
        rec.p = p;
        rec.n = n;
        rec.partition = {2, 1};
        rec.m = n - 3;
        rec.base = base_name(r.kind);
        rec.sigma = r.sigma;
        rec.z = M.z;
        rec.ring = u_construction(M.ring, r.sigma, rec.m);
        rec.fp = fingerprint(rec.ring);
        out.push_back(std::move(rec));
    }
    std::sort(out.begin(), out.end(), record_canonical_less);
    return out;
}

}  // namespace detail

/* Order-p^n records for partition (2,1): one cyclic extension per
 * representative derivation, taken at m = n - 3. */
inline const std::vector<CensusRecord>& census_221(u64 p, u32 n) {
    static std::map<std::pair<u64, u32>, std::vector<CensusRecord>> cache;
    auto key = std::make_pair(p, n);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, detail::census_221_run(p, n)).first;
    return it->second;
}

/* ---- the rank-2 census: brackets on Z/p^{n-3} + Z/p^3 ---- */

namespace detail {

/* Isomorphism partition of the p^5 nilpotent brackets c = [u,v], where the
 * u-component of c is forced into p^{n-6}Z/p^{n-3} by the orders and the
 * v-component into pZ/p^3 by nilpotency.  Basis changes act through
 *   u -> u + v,  v -> v + p^{n-6}u,  u -> h_u u,  v -> h_v v
 * with h_* the least primitive roots of the two coordinate moduli; these
 * generate every admissible change of generating pair. */
struct Type3Partition {
    u64 p = 0;
    u32 n = 0;
    u64 mu = 0, mv = 0, lift = 0;
    std::vector<int> cls;  // state index -> class id
    std::size_t classes = 0;
    std::vector<u64> sizes;

    std::size_t state_index(u64 cu, u64 cv) const {
        return static_cast<std::size_t>((cu / lift) * (mv / p) + cv / p);
    }
    std::size_t class_of(u64 cu, u64 cv) const {
        if (cu % lift || cu >= mu || cv % p || cv >= mv)
            fail(Errc::ParameterViolation, "not a nilpotent rank-2 bracket");
        return static_cast<std::size_t>(cls[state_index(cu, cv)]);
    }
};

inline Type3Partition type3_partition(u64 p, u32 n) {
    if (p < 5 || !is_prime_u64(p)) fail(Errc::ParameterViolation, "p must be a prime >= 5");
    if (n < 7) fail(Errc::ParameterViolation, "n must be at least 7");
    Type3Partition T;
    T.p = p;
    T.n = n;
    T.mu = pow_u64_checked(p, n - 3);
    T.mv = p * p * p;
    T.lift = pow_u64_checked(p, n - 6);
    const u64 p2 = p * p, p3 = T.mv;
    const u64 hu = primitive_root(PrimePower(p, n - 3));
    const u64 hv = primitive_root(PrimePower(p, 3));
    const u64 hu_inv_v = unit_inverse(hu % T.mv, T.mv);
    const u64 hv_inv_u = unit_inverse(hv % T.mu, T.mu);

    T.cls.assign(static_cast<std::size_t>(p3 * p2), -1);
    std::vector<std::pair<u64, u64>> stack;
    for (u64 ku = 0; ku < p3; ++ku)
        for (u64 t = 0; t < p2; ++t) {
            if (T.cls[ku * p2 + t] != -1) continue;
            int id = static_cast<int>(T.classes++);
            T.sizes.push_back(0);
            T.cls[ku * p2 + t] = id;
            stack.push_back({ku * T.lift, t * p});
            while (!stack.empty()) {
                auto [cu, cv] = stack.back();
                stack.pop_back();
                ++T.sizes[id];
                std::pair<u64, u64> img[4] = {
                    {cu, (cu % T.mv + cv) % T.mv},
                    {(cu + mulmod(T.lift, cv, T.mu)) % T.mu, cv},
                    {cu, mulmod(hu_inv_v, cv, T.mv)},
                    {mulmod(hv_inv_u, cu, T.mu), cv},
                };
                for (auto [du, dv] : img) {
                    std::size_t s = T.state_index(du, dv);
                    if (T.cls[s] == -1) {
                        T.cls[s] = id;
                        stack.push_back({du, dv});
                    } else if (T.cls[s] != id) {
                        fail(Errc::Internal, "rank-2 move left its class");
                    }
                }
            }
        }
    return T;
}

/* Published representatives [u,v] as (u-component, v-component) pairs,
 * grouped by derived order p^3, p^2, then p or 1. */
inline std::vector<std::pair<u64, u64>> type3_table(u64 p, u32 n) {
    auto pw = [&](u32 k) { return pow_u64_checked(p, k); };
    if (n == 7) return {{p, 0}, {pw(2), 0}, {0, p}, {pw(3), 0}, {0, p * p}, {0, 0}};
    if (n == 8)
        return {{pw(2), 0}, {pw(2), p},     {pw(3), 0}, {pw(3), p * p},
                {0, p},     {pw(4), 0},     {0, p * p}, {0, 0}};
    return {{pw(n - 6), p}, {pw(n - 6), p * p}, {pw(n - 6), 0},
            {pw(n - 5), 0}, {pw(n - 5), p * p}, {0, p},
            {pw(n - 4), 0}, {0, p * p},         {0, 0}};
}

inline std::vector<CensusRecord> census_type3_run(u64 p, u32 n) {
    Type3Partition T = type3_partition(p, n);
    const u64 expected = n == 7 ? 6 : n == 8 ? 8 : 9;
    if (T.classes != expected)
        fail(Errc::Mismatch, "rank-2 classes at n = " + std::to_string(n) + ": expected " +
                                 std::to_string(expected) + ", found " + std::to_string(T.classes));

    auto table = type3_table(p, n);
    std::vector<u32> hits(T.classes, 0);
    for (auto [cu, cv] : table) ++hits[T.class_of(cu, cv)];
    for (std::size_t c = 0; c < hits.size(); ++c)
        if (hits[c] != 1)
            fail(Errc::Mismatch, "rank-2 class " + std::to_string(c) + " hit " +
                                     std::to_string(hits[c]) + " times by the published table");

    AbelianType A(p, {n - 3, 3});
    std::vector<CensusRecord> out;
    for (auto [cu, cv] : table) {
        CensusRecord rec;
        rec.p = p;
        rec.n = n;
        rec.partition = {3};
        rec.base = "type3";
        rec.ring = make_liering(A, {Elem{cu, cv}});
        rec.fp = fingerprint(rec.ring);
        out.push_back(std::move(rec));
    }
    // distinct classes carry distinct (derived order, derived depth) pairs
    std::vector<std::pair<u64, int>> marks;
    for (const auto& r : out) marks.push_back({r.fp.derived_order, r.fp.derived_depth_ambient});
    std::sort(marks.begin(), marks.end());
    if (std::adjacent_find(marks.begin(), marks.end()) != marks.end())
        fail(Errc::Mismatch, "rank-2 representatives share a derived-order/depth mark");
    std::sort(out.begin(), out.end(), record_canonical_less);
    return out;
}

}  // namespace detail

inline const std::vector<CensusRecord>& census_type3(u64 p, u32 n) {
    static std::map<std::pair<u64, u32>, std::vector<CensusRecord>> cache;
    auto key = std::make_pair(p, n);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, detail::census_type3_run(p, n)).first;
    return it->second;
}

/* ---- partition counts and the closed formula ---- */

inline void require_census_domain(u64 p, u32 n) {
    if (p < 5 || !is_prime_u64(p)) fail(Errc::ParameterViolation, "p must be a prime >= 5");
    if (n < 7) fail(Errc::ParameterViolation, "n must be at least 7");
}

/* Head count for partition (1,1,1): the number of groups of order p^5 with
 * type invariants (2,1,1,1), taken from the classification literature
 * (R. James, The groups of order p^6 (p an odd prime), Math. Comp. 34 (1980)
 * 613-637) rather than recomputed. */
inline u64 psi_head_111(u64 p) { return 23 + 2 * gcd_u64(p - 1, 3) + gcd_u64(p - 1, 4); }

inline u64 psi_part(u64 p, u32 n, const std::vector<u32>& partition) {
    require_census_domain(p, n);
    if (partition == std::vector<u32>{1, 1, 1}) return psi_head_111(p);
    if (partition == std::vector<u32>{2, 1}) return verify_221(p).total;
    if (partition == std::vector<u32>{3}) return census_type3(p, n).size();
    fail(Errc::UnsupportedPartition, "partition must be one of (1,1,1), (2,1), (3)");
}

inline u64 psi_formula(u64 p, u32 n) {
    require_census_domain(p, n);
    const u64 tail = n == 7 ? 59 : n == 8 ? 61 : 62;
    return 5 * p + 2 * gcd_u64(p - 1, 3) + gcd_u64(p - 1, 4) + tail;
}

inline u64 psi_assembled(u64 p, u32 n) {
    return psi_part(p, n, {1, 1, 1}) + psi_part(p, n, {2, 1}) + psi_part(p, n, {3});
}

/* ---- stability across the free parameter ---- */

struct StabilityReport {
    u64 p = 0;
    std::vector<u32> partition;
    u32 m1 = 0, m2 = 0;
    u64 compared = 0;
};

/* For partition (2,1) the arguments are the cyclic parameters m of the
 * extension (total order p^{m+3}); for partition (3) they are the total order
 * exponents n.  Both must be at least twice the largest part. */
inline StabilityReport stability_check(u64 p, const std::vector<u32>& partition, u32 m1, u32 m2) {
    if (partition.empty()) fail(Errc::UnsupportedPartition, "empty partition");
    u32 lam1 = partition[0];
    if (m1 < 2 * lam1 || m2 < 2 * lam1)
        fail(Errc::ParameterViolation, "both parameters must be at least twice the largest part");
    StabilityReport R;
    R.p = p;
    R.partition = partition;
    R.m1 = m1;
    R.m2 = m2;

    if (partition == std::vector<u32>{2, 1}) {
        auto rings = transversal_221(p);
        std::size_t idx = 0;
        for (const auto& r : representatives_221(p)) {
            const MarkedRing& M = rings[static_cast<int>(r.kind)];
            auto key = [](const LieRing& L) {
                RingFingerprint f = fingerprint(L);
                std::vector<u32> tail(f.type.begin() + 1, f.type.end());
                return std::make_tuple(f.cls, f.derived_order, tail,
                                       L.A.order() / f.center_order);
            };
            if (key(u_construction(M.ring, r.sigma, m1)) !=
                key(u_construction(M.ring, r.sigma, m2)))
                fail(Errc::Mismatch, std::string(base_name(r.kind)) + " representative " +
                                         std::to_string(idx) + ": invariants depend on m");
            ++idx;
            ++R.compared;
        }
        return R;
    }

    if (partition == std::vector<u32>{3}) {
        const auto& c1 = census_type3(p, m1);
        const auto& c2 = census_type3(p, m2);
        auto buckets = [p](const std::vector<CensusRecord>& v) {
            std::array<u64, 3> b{};  // derived order p^3 / p^2 / at most p
            for (const auto& r : v) {
                u64 d = r.fp.derived_order;
                ++b[d == p * p * p ? 0 : d == p * p ? 1 : 2];
            }
            return b;
        };
        auto expect = [](u32 n) {
            return std::array<u64, 3>{n == 7 ? 1u : n == 8 ? 2u : 3u, n == 7 ? 2u : 3u, 3u};
        };
        if (buckets(c1) != expect(m1) || buckets(c2) != expect(m2))
            fail(Errc::Mismatch, "derived-order rows do not match the published table");
        for (int i = 0; i < 3; ++i) {
            u64 lo = m1 <= m2 ? buckets(c1)[i] : buckets(c2)[i];
            u64 hi = m1 <= m2 ? buckets(c2)[i] : buckets(c1)[i];
            if (lo > hi) fail(Errc::Mismatch, "derived-order row shrank with growing n");
        }
        if (m1 >= 9 && m2 >= 9) {
            // depth clamps at 3: the all-u brackets sink deeper as n grows,
            // everything else is already stable
            auto keys = [](const std::vector<CensusRecord>& v) {
                std::vector<std::tuple<u32, u64, int, u64>> k;
                for (const auto& r : v)
                    k.push_back({r.fp.cls, r.fp.derived_order,
                                 std::min(r.fp.derived_depth_ambient, 3),
                                 r.ring.A.order() / r.fp.center_order});
                std::sort(k.begin(), k.end());
                return k;
            };
            if (keys(c1) != keys(c2))
                fail(Errc::Mismatch, "stable fingerprint multisets differ across n");
        }
        R.compared = std::min(c1.size(), c2.size());
        return R;
    }

    fail(Errc::UnsupportedPartition, "no construction is attached to this partition");
}

}  // namespace coex

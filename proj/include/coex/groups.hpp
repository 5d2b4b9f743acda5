#pragma once

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <random>
#include <vector>

#include "coex/abelian.hpp"
#include "coex/residue.hpp"

namespace coex {

/* Generic finite p-group algorithms.  A group type G provides:
 *   ElemT; size(); prime(); identity(); mul(a,b); inv(a);
 *   code(a) -> u64 in [0, size()); at(code) -> ElemT.
 * Everything here works through that interface; nothing assumes the group
 * came from a Lie ring. */

inline u64 sampling_seed() {
    if (const char* s = std::getenv("COEXLAB_SEED")) {
        char* end = nullptr;
        u64 v = std::strtoull(s, &end, 0);
        if (end && *end == '\0') return v;
    }
    return 0x5EEDC0DEull;
}

struct CodeSet {
    std::vector<u64> codes;  // sorted ascending
    u64 order() const { return codes.size(); }
    bool contains(u64 c) const { return std::binary_search(codes.begin(), codes.end(), c); }
};

template <class G>
using elem_of = typename G::ElemT;

template <class G>
elem_of<G> group_pow(const G& g, elem_of<G> base, u64 k) {
    elem_of<G> acc = g.identity();
    while (k) {
        if (k & 1) acc = g.mul(acc, base);
        base = g.mul(base, base);
        k >>= 1;
    }
    return acc;
}

template <class G>
elem_of<G> group_pow_signed(const G& g, const elem_of<G>& base, i64 k) {
    return k >= 0 ? group_pow(g, base, static_cast<u64>(k))
                  : group_pow(g, g.inv(base), static_cast<u64>(-k));
}

template <class G>
elem_of<G> commutator(const G& g, const elem_of<G>& a, const elem_of<G>& b) {
    return g.mul(g.mul(g.inv(a), g.inv(b)), g.mul(a, b));
}

template <class G>
elem_of<G> conjugate(const G& g, const elem_of<G>& a, const elem_of<G>& by) {
    return g.mul(g.mul(g.inv(by), a), by);
}

template <class G>
u64 group_element_order(const G& g, const elem_of<G>& a) {
    u64 p = g.prime(), ord = 1, idc = g.code(g.identity());
    elem_of<G> b = a;
    while (g.code(b) != idc) {
        b = group_pow(g, b, p);
        ord *= p;
        if (ord > g.size()) fail(Errc::Internal, "element order exceeds group order");
    }
    return ord;
}

inline constexpr u64 kClosureCap = u64(1) << 26;

template <class G>
CodeSet group_closure(const G& g, const std::vector<elem_of<G>>& gens) {
    if (g.size() > kClosureCap) fail(Errc::TooLarge, "group too large for closure scan");
    std::vector<char> seen(g.size(), 0);
    std::vector<u64> out;
    std::deque<u64> queue;
    u64 idc = g.code(g.identity());
    seen[idc] = 1;
    out.push_back(idc);
    queue.push_back(idc);
    while (!queue.empty()) {
        elem_of<G> x = g.at(queue.front());
        queue.pop_front();
        for (const auto& s : gens) {
            u64 d = g.code(g.mul(x, s));
            if (!seen[d]) {
                seen[d] = 1;
                out.push_back(d);
                queue.push_back(d);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return CodeSet{std::move(out)};
}

template <class G>
CodeSet normal_closure(const G& g, std::vector<elem_of<G>> seed,
                       const std::vector<elem_of<G>>& ambient_gens) {
    CodeSet H = group_closure(g, seed);
    bool grew = true;
    while (grew) {
        grew = false;
        for (u64 c : H.codes) {
            elem_of<G> x = g.at(c);
            for (const auto& s : ambient_gens) {
                elem_of<G> t = conjugate(g, x, s);
                if (!H.contains(g.code(t))) {
                    seed.push_back(t);
                    grew = true;
                }
            }
        }
        if (grew) H = group_closure(g, seed);
    }
    return H;
}

/* gamma_1 = <gens>, gamma_{i+1} = <[gamma_i, gens]> normally closed; the
 * returned chain ends with the trivial subgroup. */
template <class G>
std::vector<CodeSet> group_lower_central(const G& g, const std::vector<elem_of<G>>& gens) {
    std::vector<CodeSet> series;
    series.push_back(group_closure(g, gens));
    if (series[0].order() == 1) return series;
    std::vector<elem_of<G>> level = gens;
    while (true) {
        std::vector<elem_of<G>> comms;
        for (const auto& x : level)
            for (const auto& s : gens) comms.push_back(commutator(g, x, s));
        CodeSet next = normal_closure(g, comms, gens);
        series.push_back(next);
        if (next.order() == 1) break;
        if (series.size() > 24) fail(Errc::NotNilpotent, "lower central series does not reach 1");
        level.clear();
        for (u64 c : next.codes) level.push_back(g.at(c));
    }
    return series;
}

template <class G>
u32 group_class(const G& g, const std::vector<elem_of<G>>& gens) {
    return static_cast<u32>(group_lower_central(g, gens).size()) - 1;
}

/* The order-dividing-p^i elements, claimed (and spot-verified) to form a
 * subgroup; these groups are regular, where that is a theorem.  A failed
 * spot check means the regularity assumption broke, which must surface. */
template <class G>
CodeSet omega_layer(const G& g, u32 i) {
    if (g.size() > kClosureCap) fail(Errc::TooLarge, "group too large for element scan");
    u64 q = 1;
    for (u32 j = 0; j < i; ++j) q *= g.prime();
    u64 idc = g.code(g.identity());
    std::vector<u64> out;
    for (u64 c = 0; c < g.size(); ++c)
        if (g.code(group_pow(g, g.at(c), q)) == idc) out.push_back(c);
    CodeSet S{std::move(out)};
    std::mt19937_64 rng(0x03E6A001ull + i);
    std::uniform_int_distribution<u64> pick(0, S.order() - 1);
    for (int t = 0; t < 200; ++t) {
        elem_of<G> a = g.at(S.codes[pick(rng)]), b = g.at(S.codes[pick(rng)]);
        if (!S.contains(g.code(g.mul(a, b))))
            fail(Errc::Mismatch, "order-p^i elements do not form a subgroup");
    }
    return S;
}

// p^i-th powers; same subgroup claim, same spot check
template <class G>
CodeSet agemo_layer(const G& g, u32 i) {
    if (g.size() > kClosureCap) fail(Errc::TooLarge, "group too large for element scan");
    u64 q = 1;
    for (u32 j = 0; j < i; ++j) q *= g.prime();
    std::vector<u64> out;
    for (u64 c = 0; c < g.size(); ++c) out.push_back(g.code(group_pow(g, g.at(c), q)));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    CodeSet S{std::move(out)};
    std::mt19937_64 rng(0x03E6A002ull + i);
    std::uniform_int_distribution<u64> pick(0, S.order() - 1);
    for (int t = 0; t < 200; ++t) {
        elem_of<G> a = g.at(S.codes[pick(rng)]), b = g.at(S.codes[pick(rng)]);
        if (!S.contains(g.code(g.mul(a, b))))
            fail(Errc::Mismatch, "p^i-th powers do not form a subgroup");
    }
    return S;
}

struct GroupReport {
    u64 order = 0;
    u64 p = 0;
    u32 n = 0;             // order = p^n
    u32 exponent_exp = 0;  // exponent = p^e
    u32 coexponent = 0;
    u32 cls = 0;
    u64 exponent_witness = 0;        // code of an element of maximal order
    std::vector<u64> omega_orders;   // |Omega_0| .. |Omega_e|
    std::vector<u64> agemo_orders;   // |agemo_0| .. |agemo_e|
    std::vector<u32> omega_type;     // log_p |agemo_{j-1}| / |agemo_j|, j = 1..e
    std::vector<u32> mu_type;        // dual partition
};

template <class G>
GroupReport group_invariants(const G& g, const std::vector<elem_of<G>>& gens) {
    if (g.size() > kClosureCap) fail(Errc::TooLarge, "group too large for invariant scans");
    GroupReport r;
    r.order = g.size();
    r.p = g.prime();
    u64 t = r.order;
    while (t > 1) {
        if (t % r.p) fail(Errc::ParameterViolation, "group order is not a power of p");
        t /= r.p;
        ++r.n;
    }

    u64 maxord = 1;
    for (u64 c = 0; c < g.size(); ++c) {
        u64 o = group_element_order(g, g.at(c));
        if (o > maxord) {
            maxord = o;
            r.exponent_witness = c;
        }
    }
    while (maxord > 1) {
        maxord /= r.p;
        ++r.exponent_exp;
    }
    r.coexponent = r.n - r.exponent_exp;
    r.cls = group_class(g, gens);

    for (u32 i = 0; i <= r.exponent_exp; ++i) {
        r.omega_orders.push_back(omega_layer(g, i).order());
        r.agemo_orders.push_back(agemo_layer(g, i).order());
    }
    for (u32 j = 1; j <= r.exponent_exp; ++j) {
        u64 ratio = r.agemo_orders[j - 1] / r.agemo_orders[j];
        u32 w = 0;
        while (ratio > 1) {
            ratio /= r.p;
            ++w;
        }
        r.omega_type.push_back(w);
    }
    r.mu_type = dual_partition(r.omega_type);
    return r;
}

// |Omega_i / Omega_{i-1}| = |agemo_{i-1} / agemo_i| for every layer
inline bool omega_agemo_duality(const GroupReport& r) {
    for (u32 i = 1; i <= r.exponent_exp; ++i) {
        u64 lhs = r.omega_orders[i] / r.omega_orders[i - 1];
        u64 rhs = r.agemo_orders[i - 1] / r.agemo_orders[i];
        if (r.omega_orders[i] % r.omega_orders[i - 1] || r.agemo_orders[i - 1] % r.agemo_orders[i])
            return false;
        if (lhs != rhs) return false;
    }
    return true;
}

/* [agemo_i(G), G, ..., G] with omega_{i+1} - 1 commutator applications lands
 * inside agemo_{i+1}(G); meaningful when omega_{i+1} >= 2. */
template <class G>
bool agemo_inclusion_claim(const G& g, const std::vector<elem_of<G>>& gens, u32 i,
                           const GroupReport& rep) {
    if (i + 1 > rep.exponent_exp) fail(Errc::ParameterViolation, "layer index out of range");
    u32 w = rep.omega_type[i];  // omega_{i+1}
    if (w < 2) fail(Errc::ParameterViolation, "claim needs omega_{i+1} >= 2");
    CodeSet K = agemo_layer(g, i);
    CodeSet target = agemo_layer(g, i + 1);
    for (u32 step = 0; step + 1 < w; ++step) {
        std::vector<elem_of<G>> comms;
        for (u64 c : K.codes)
            for (const auto& s : gens) comms.push_back(commutator(g, g.at(c), s));
        K = normal_closure(g, comms, gens);
    }
    for (u64 c : K.codes)
        if (!target.contains(c)) return false;
    return true;
}

struct RegularityReport {
    u64 pairs_tested = 0;
    u64 failures = 0;
    bool exhaustive = false;
    bool ok() const { return failures == 0; }
};

/* x^p y^p = (xy)^p z with z in agemo_1 of the derived group of <x,y>:
 * solve for z and test membership.  Exhaustive over ordered pairs for small
 * groups, fixed-seed samples above. */
template <class G>
RegularityReport regularity_check(const G& g, u64 sample_pairs = 2000,
                                  u64 seed = sampling_seed(), u64 max_exhaustive_order = 1000) {
    RegularityReport rep;
    u64 p = g.prime();
    auto test_pair = [&](const elem_of<G>& x, const elem_of<G>& y) {
        elem_of<G> z = g.mul(g.inv(group_pow(g, g.mul(x, y), p)),
                             g.mul(group_pow(g, x, p), group_pow(g, y, p)));
        std::vector<elem_of<G>> xy = {x, y};
        CodeSet der = normal_closure(g, {commutator(g, x, y)}, xy);
        std::vector<elem_of<G>> pows;
        for (u64 c : der.codes) pows.push_back(group_pow(g, g.at(c), p));
        CodeSet K = group_closure(g, pows);
        ++rep.pairs_tested;
        if (!K.contains(g.code(z))) ++rep.failures;
    };
    if (g.size() <= max_exhaustive_order) {
        rep.exhaustive = true;
        for (u64 a = 0; a < g.size(); ++a)
            for (u64 b = 0; b < g.size(); ++b) test_pair(g.at(a), g.at(b));
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<u64> pick(0, g.size() - 1);
        for (u64 t = 0; t < sample_pairs; ++t) test_pair(g.at(pick(rng)), g.at(pick(rng)));
    }
    return rep;
}

struct AssociativityReport {
    u64 triples = 0;
    u64 failures = 0;
    bool exhaustive = false;
    bool ok() const { return failures == 0; }
};

template <class G>
AssociativityReport associativity_check(const G& g, u64 samples = 1000000,
                                        u64 seed = sampling_seed(),
                                        u64 max_exhaustive_order = 700) {
    AssociativityReport rep;
    auto test = [&](const elem_of<G>& a, const elem_of<G>& b, const elem_of<G>& c) {
        ++rep.triples;
        if (g.code(g.mul(g.mul(a, b), c)) != g.code(g.mul(a, g.mul(b, c)))) ++rep.failures;
    };
    if (g.size() <= max_exhaustive_order) {
        rep.exhaustive = true;
        for (u64 a = 0; a < g.size(); ++a)
            for (u64 b = 0; b < g.size(); ++b)
                for (u64 c = 0; c < g.size(); ++c) test(g.at(a), g.at(b), g.at(c));
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<u64> pick(0, g.size() - 1);
        for (u64 t = 0; t < samples; ++t) test(g.at(pick(rng)), g.at(pick(rng)), g.at(pick(rng)));
    }
    return rep;
}

// identity and inverse laws, exhaustively
template <class G>
bool identity_inverse_laws(const G& g) {
    if (g.size() > kClosureCap) fail(Errc::TooLarge, "group too large for element scan");
    elem_of<G> e = g.identity();
    u64 idc = g.code(e);
    for (u64 c = 0; c < g.size(); ++c) {
        elem_of<G> a = g.at(c);
        if (g.code(g.mul(a, e)) != c || g.code(g.mul(e, a)) != c) return false;
        if (g.code(g.mul(a, g.inv(a))) != idc || g.code(g.mul(g.inv(a), a)) != idc) return false;
    }
    return true;
}

/* ---- explicit extremal-coexponent groups ---- */

/* Stage 1: P = A x| <g> with A elementary abelian on x_1..x_{f+1},
 * conjugation by g sending x_i to x_i x_{i+1} (x_{f+1} fixed), g of order
 * p^{n-f}.  |P| = p^{n+1}.  Elements are (a, g^k) with the row vector a
 * acted on from the right, (a, g^k)(b, g^l) = (a + b alpha^{-k}, g^{k+l}). */
class ExtremalStage1 {
  public:
    struct ExtElem {
        std::vector<u64> a;
        u64 k = 0;
    };
    using ElemT = ExtElem;

    ExtremalStage1(u64 p, u32 f, u32 n) : p_(p), f_(f), n_(n) {
        if (!is_prime_u64(p)) fail(Errc::ParameterViolation, "p must be prime");
        if (f < 1 || p < f + 1) fail(Errc::ParameterViolation, "need p >= f + 1 >= 2");
        if (n < f + 2) fail(Errc::ParameterViolation, "need n >= f + 2");
        gorder_ = pow_u64_checked(p, n - f);
        size_ = pow_u64_checked(p, n + 1);
        build_alpha_powers();
    }

    u64 size() const { return size_; }
    u64 prime() const { return p_; }
    u32 f() const { return f_; }
    u32 n_param() const { return n_; }
    u64 g_order() const { return gorder_; }

    ExtElem identity() const { return ExtElem{std::vector<u64>(f_ + 1, 0), 0}; }

    // x_i for 1 <= i <= f+1
    ExtElem x_elem(u32 i) const {
        ExtElem e = identity();
        e.a[i - 1] = 1;
        return e;
    }
    ExtElem g_elem() const {
        ExtElem e = identity();
        e.k = 1;
        return e;
    }
    std::vector<ExtElem> gens() const { return {x_elem(1), g_elem()}; }

    ExtElem mul(const ExtElem& x, const ExtElem& y) const {
        ExtElem r;
        r.a = apply_alpha(y.a, neg_exp(x.k));
        for (u32 j = 0; j <= f_; ++j) r.a[j] = (r.a[j] + x.a[j]) % p_;
        r.k = (x.k + y.k) % gorder_;
        return r;
    }

    ExtElem inv(const ExtElem& x) const {
        ExtElem r;
        r.a = apply_alpha(x.a, static_cast<u32>(x.k % p_));
        for (u32 j = 0; j <= f_; ++j) r.a[j] = (p_ - r.a[j]) % p_;
        r.k = (gorder_ - x.k) % gorder_;
        return r;
    }

    u64 code(const ExtElem& x) const {
        u64 c = 0;
        for (u32 j = 0; j <= f_; ++j) c = c * p_ + x.a[j];
        return c * gorder_ + x.k;
    }

    ExtElem at(u64 c) const {
        ExtElem e = identity();
        e.k = c % gorder_;
        c /= gorder_;
        for (u32 j = f_ + 1; j-- > 0;) {
            e.a[j] = c % p_;
            c /= p_;
        }
        return e;
    }

    // row vector times alpha^m, 0 <= m < p
    std::vector<u64> apply_alpha(const std::vector<u64>& b, u32 m) const {
        const std::vector<u64>& M = alpha_pow_[m];
        std::vector<u64> r(f_ + 1, 0);
        for (u32 i = 0; i <= f_; ++i) {
            if (!b[i]) continue;
            for (u32 j = i; j <= f_; ++j) r[j] = (r[j] + b[i] * M[i * (f_ + 1) + j]) % p_;
        }
        return r;
    }

    u32 neg_exp(u64 k) const { return static_cast<u32>((p_ - k % p_) % p_); }

  private:
    void build_alpha_powers() {
        u32 r = f_ + 1;
        std::vector<u64> id(r * r, 0), al(r * r, 0);
        for (u32 i = 0; i < r; ++i) id[i * r + i] = 1;
        for (u32 i = 0; i < r; ++i) {
            al[i * r + i] = 1;
            if (i + 1 < r) al[i * r + i + 1] = 1;  // x_i alpha = x_i + x_{i+1}
        }
        alpha_pow_.push_back(id);
        for (u64 m = 1; m < p_; ++m) {
            const std::vector<u64>& prev = alpha_pow_.back();
            std::vector<u64> nxt(r * r, 0);
            for (u32 i = 0; i < r; ++i)
                for (u32 kk = 0; kk < r; ++kk) {
                    if (!prev[i * r + kk]) continue;
                    for (u32 j = 0; j < r; ++j)
                        nxt[i * r + j] = (nxt[i * r + j] + prev[i * r + kk] * al[kk * r + j]) % p_;
                }
            alpha_pow_.push_back(std::move(nxt));
        }
    }

    u64 p_;
    u32 f_, n_;
    u64 gorder_, size_;
    std::vector<std::vector<u64>> alpha_pow_;
};

/* Stage 2: the quotient of stage 1 by the central subgroup generated by
 * g^{p^{n-f-1}} x_{f+1}^{-1}.  Every coset has a unique representative with
 * a_{f+1} = 0; multiplication computes upstairs and renormalizes.
 * |G| = p^n, exponent p^{n-f}, so the coexponent is f. */
class ExtremalStage2 {
  public:
    using ElemT = ExtremalStage1::ExtElem;

    ExtremalStage2(u64 p, u32 f, u32 n) : base_(p, f, n) {
        shift_ = base_.g_order() / p;  // p^{n-f-1}
        size_ = base_.size() / p;
    }

    const ExtremalStage1& stage1() const { return base_; }
    u64 size() const { return size_; }
    u64 prime() const { return base_.prime(); }
    u32 f() const { return base_.f(); }

    ElemT normalize(ElemT t) const {
        u64 j = t.a[base_.f()];
        if (j) {
            t.a[base_.f()] = 0;
            t.k = (t.k + j * shift_) % base_.g_order();
        }
        return t;
    }

    ElemT identity() const { return base_.identity(); }
    ElemT mul(const ElemT& x, const ElemT& y) const { return normalize(base_.mul(x, y)); }
    ElemT inv(const ElemT& x) const { return normalize(base_.inv(x)); }

    ElemT x_elem(u32 i) const { return normalize(base_.x_elem(i)); }
    ElemT g_elem() const { return base_.g_elem(); }
    std::vector<ElemT> gens() const { return {x_elem(1), g_elem()}; }

    u64 code(const ElemT& x) const {
        u64 c = 0;
        for (u32 j = 0; j < base_.f(); ++j) c = c * prime() + x.a[j];
        return c * base_.g_order() + x.k;
    }

    ElemT at(u64 c) const {
        ElemT e = identity();
        e.k = c % base_.g_order();
        c /= base_.g_order();
        for (u32 j = base_.f(); j-- > 0;) {
            e.a[j] = c % prime();
            c /= prime();
        }
        return e;
    }

  private:
    ExtremalStage1 base_;
    u64 shift_, size_;
};

/* Full multiplication table over codes; worth building when a group is
 * small and gets hammered by pair scans. */
class TableGroup {
  public:
    using ElemT = u64;

    template <class G>
    explicit TableGroup(const G& g) : n_(g.size()), p_(g.prime()) {
        if (n_ > 4096) fail(Errc::TooLarge, "multiplication table would be too large");
        std::vector<elem_of<G>> elems;
        elems.reserve(n_);
        for (u64 c = 0; c < n_; ++c) elems.push_back(g.at(c));
        mul_.resize(n_ * n_);
        inv_.resize(n_);
        for (u64 i = 0; i < n_; ++i) {
            for (u64 j = 0; j < n_; ++j)
                mul_[i * n_ + j] = static_cast<u32>(g.code(g.mul(elems[i], elems[j])));
            inv_[i] = static_cast<u32>(g.code(g.inv(elems[i])));
        }
        id_ = g.code(g.identity());
    }

    u64 size() const { return n_; }
    u64 prime() const { return p_; }
    u64 identity() const { return id_; }
    u64 mul(u64 a, u64 b) const { return mul_[a * n_ + b]; }
    u64 inv(u64 a) const { return inv_[a]; }
    u64 code(u64 a) const { return a; }
    u64 at(u64 c) const { return c; }

  private:
    u64 n_, p_, id_ = 0;
    std::vector<u32> mul_;
    std::vector<u32> inv_;
};

}  // namespace coex

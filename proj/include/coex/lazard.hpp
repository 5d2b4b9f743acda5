#pragma once

#include <optional>

#include "coex/bch.hpp"
#include "coex/groups.hpp"
#include "coex/liering.hpp"

namespace coex {

// BCH evaluation ops specialized to a Lie ring's residue coordinates
struct ResidueOps {
    const LieRing* L;

    Elem zero() const { return zero_elem(L->A); }
    Elem add(const Elem& a, const Elem& b) const { return coex::add(L->A, a, b); }
    Elem bracket(const Elem& a, const Elem& b) const { return coex::bracket(*L, a, b); }
    Elem scale(const Elem& a, const Rat& c) const {
        // one residue works for every coordinate: the moduli divide the exponent
        u64 s = rat_mod(c, L->A.p, L->A.exponent());
        return scalar_mul(L->A, s, a);
    }
};

/* The group with the ring's carrier and multiplication g*h = BCH(g, h)
 * truncated at the nilpotency class.  Sound when class < p; the truncation
 * then never touches a denominator divisible by p. */
class BchGroup {
  public:
    using ElemT = Elem;

    BchGroup(LieRing&&, const BchTable&) = delete;
    BchGroup(const LieRing&, BchTable&&) = delete;

    BchGroup(const LieRing& L, const BchTable& T) : L_(&L), T_(&T) {
        cls_ = nilpotency_class(L);
        if (cls_ >= L.A.p) fail(Errc::ClassTooHigh, "correspondence needs class < p");
        if (cls_ > T.maxdeg()) fail(Errc::DegreeUnsupported, "BCH table truncated below class");
        size_ = L.A.order();
    }

    const LieRing& ring() const { return *L_; }
    const BchTable& table() const { return *T_; }
    u32 cls() const { return cls_; }

    u64 size() const { return size_; }
    u64 prime() const { return L_->A.p; }
    Elem identity() const { return zero_elem(L_->A); }
    Elem inv(const Elem& a) const { return neg(L_->A, a); }
    u64 code(const Elem& a) const { return elem_index(L_->A, a); }
    Elem at(u64 c) const { return elem_at(L_->A, c); }

    Elem mul(const Elem& a, const Elem& b) const {
        ResidueOps ops{L_};
        return bch_combine(*T_, ops, a, b, cls_);
    }

    std::vector<Elem> basis_gens() const {
        std::vector<Elem> g;
        for (u32 i = 0; i < L_->rank(); ++i) g.push_back(basis_elem(L_->A, i));
        return g;
    }

  private:
    const LieRing* L_;
    const BchTable* T_;
    u32 cls_;
    u64 size_;
};

/* ---- inverse direction: ring operations as group words ---- */

/* A recipe is a base word followed by corrections c^q, one per Hall tree c
 * (as nested group commutators in x, y) with exact rational exponent q.
 * Evaluated on a group, q becomes q mod ord(c) via an inverted denominator. */
struct GroupWordRecipe {
    BchSeries corrections;  // (hall id, exponent), in application order
};

struct LazardRecipes {
    u32 maxdeg = 0;
    GroupWordRecipe addition;  // base word x y
    GroupWordRecipe bracket;   // base word x^{-1} y^{-1} x y
};

namespace detail {

/* Solve for the corrections degree by degree inside the free nilpotent
 * group of class maxdeg: maintain the partial product P, read the residual
 * P^{-1} * target off its Hall coordinates, and cancel each degree-d
 * coordinate with the Hall-tree commutator word of that id.  Everything is
 * exact rational arithmetic; a residual that refuses to vanish throws. */
class RecipeSolver {
  public:
    RecipeSolver(const BchTable& T, FreeLie& FL) : T_(&T), FL_(&FL), img_(T.hall().size()) {}

    LieElem gmul(const LieElem& a, const LieElem& b) {
        FreeLieOps ops{FL_};
        return bch_combine(*T_, ops, a, b);
    }

    const LieElem& hall_image(u32 id) {
        if (!img_[id]) {
            const auto& n = T_->hall().node(id);
            if (n.left < 0) {
                img_[id] = FL_->generator(static_cast<u32>(n.right));
            } else {
                const LieElem& a = hall_image(static_cast<u32>(n.left));
                const LieElem& b = hall_image(static_cast<u32>(n.right));
                LieElem lhs = gmul(gmul(lie_scale(a, Rat(-1)), lie_scale(b, Rat(-1))), gmul(a, b));
                img_[id] = std::move(lhs);
            }
        }
        return *img_[id];
    }

    GroupWordRecipe solve(const LieElem& target, LieElem P) {
        GroupWordRecipe out;
        for (u32 d = 2; d <= T_->maxdeg(); ++d) {
            LieElem R = gmul(lie_scale(P, Rat(-1)), target);
            for (u32 id : T_->hall().degree_ids(d)) {
                auto it = R.find(id);
                if (it == R.end()) continue;
                Rat q = it->second;
                out.corrections.emplace_back(id, q);
                P = gmul(P, lie_scale(hall_image(id), q));
                R = gmul(lie_scale(P, Rat(-1)), target);
            }
            for (const auto& [id, c] : R)
                if (T_->hall().degree(id) <= d)
                    fail(Errc::ReconstructionDivergence, "residual survived its degree");
        }
        if (!gmul(lie_scale(P, Rat(-1)), target).empty())
            fail(Errc::ReconstructionDivergence, "recipe does not reach the target");
        return out;
    }

  private:
    const BchTable* T_;
    FreeLie* FL_;
    std::vector<std::optional<LieElem>> img_;
};

}  // namespace detail

inline LazardRecipes derive_lazard_recipes(const BchTable& T) {
    FreeLie FL(T.hall());
    detail::RecipeSolver S(T, FL);
    LieElem x = FL.generator(0), y = FL.generator(1);
    LazardRecipes R;
    R.maxdeg = T.maxdeg();
    R.addition = S.solve(lie_add(x, y), S.gmul(x, y));
    if (T.maxdeg() >= 2) {
        R.bracket = S.solve(FL.bracket(x, y), S.hall_image(2));
    }
    return R;
}

/* Ring operations recovered from group operations alone.  Per evaluation the
 * Hall commutator words in (x, y) are memoized; each correction exponent is
 * reduced modulo the order of its commutator value, skipping values that
 * are already the identity (that is how terms above the group's class
 * disappear without ever dividing by p). */
template <class G>
class ReconstructedOps {
  public:
    ReconstructedOps(const G& g, const LazardRecipes& rec, const HallBasis& h2)
        : g_(&g), rec_(&rec), h2_(&h2) {}

    elem_of<G> radd(const elem_of<G>& x, const elem_of<G>& y) const {
        return run(rec_->addition, g_->mul(x, y), x, y);
    }

    elem_of<G> rbracket(const elem_of<G>& x, const elem_of<G>& y) const {
        return run(rec_->bracket, commutator(*g_, x, y), x, y);
    }

    elem_of<G> rneg(const elem_of<G>& x) const { return g_->inv(x); }

  private:
    elem_of<G> run(const GroupWordRecipe& rec, elem_of<G> acc, const elem_of<G>& x,
                   const elem_of<G>& y) const {
        std::vector<std::optional<elem_of<G>>> memo(h2_->size());
        auto word = [&](auto&& self, u32 id) -> const elem_of<G>& {
            if (!memo[id]) {
                const auto& n = h2_->node(id);
                if (n.left < 0)
                    memo[id] = (n.right == 0) ? x : y;
                else
                    memo[id] = commutator(*g_, self(self, static_cast<u32>(n.left)),
                                          self(self, static_cast<u32>(n.right)));
            }
            return *memo[id];
        };
        for (const auto& [id, q] : rec.corrections) {
            const elem_of<G>& c = word(word, id);
            u64 m = group_element_order(*g_, c);
            if (m == 1) continue;
            if (gcd_u64(static_cast<u64>(q.d), m) != 1)
                fail(Errc::DenominatorNotInvertible, "correction denominator not a unit");
            u64 num = static_cast<u64>(((q.n % static_cast<i64>(m)) + static_cast<i64>(m)) %
                                       static_cast<i64>(m));
            u64 k = mulmod(num, unit_inverse(static_cast<u64>(q.d) % m, m), m);
            acc = g_->mul(acc, group_pow(*g_, c, k));
        }
        return acc;
    }

    const G* g_;
    const LazardRecipes* rec_;
    const HallBasis* h2_;
};

// rebuild a structure-constant table through the recipes, for roundtripping
inline LieRing bracket_from_group(const BchGroup& g, const LazardRecipes& rec) {
    const LieRing& L = g.ring();
    ReconstructedOps<BchGroup> ops(g, rec, g.table().hall());
    u32 r = L.rank();
    std::vector<Elem> table;
    for (u32 i = 0; i < r; ++i)
        for (u32 j = i + 1; j < r; ++j)
            table.push_back(ops.rbracket(basis_elem(L.A, i), basis_elem(L.A, j)));
    return make_liering(L.A, table);
}

struct RoundtripReport {
    bool table_exact = false;
    u64 add_pairs = 0;
    u64 add_failures = 0;
    u64 bracket_pairs = 0;
    u64 bracket_failures = 0;
    bool exhaustive = false;
    bool ok() const { return table_exact && add_failures == 0 && bracket_failures == 0; }
};

/* bracket_from_group(group_from_liering(L)) == L, element-wise: the
 * reconstructed structure constants must be exact, and recovered addition
 * and bracket must match the ring's on scanned pairs. */
inline RoundtripReport lazard_roundtrip(const LieRing& L, const BchTable& T,
                                        const LazardRecipes& rec, u64 sample_pairs = 2000,
                                        u64 seed = sampling_seed(),
                                        u64 max_exhaustive_order = 700) {
    BchGroup g(L, T);
    RoundtripReport rep;
    LieRing back = bracket_from_group(g, rec);
    rep.table_exact = (back.table == L.table);

    ReconstructedOps<BchGroup> ops(g, rec, T.hall());
    auto test_pair = [&](const Elem& x, const Elem& y) {
        ++rep.add_pairs;
        if (ops.radd(x, y) != add(L.A, x, y)) ++rep.add_failures;
        ++rep.bracket_pairs;
        if (ops.rbracket(x, y) != bracket(L, x, y)) ++rep.bracket_failures;
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

}  // namespace coex

#pragma once

#include <map>
#include <utility>
#include <vector>

#include "coex/rational.hpp"

namespace coex {

/* Hall basis of the free Lie algebra on ngens generators, truncated at
 * degree maxdeg.  Ids are assigned degree by degree in creation order;
 * [a, b] is a basis element when id(a) < id(b) and b is either a generator
 * or a bracket [b1, b2] with id(b1) <= id(a). */
class HallBasis {
  public:
    struct Node {
        u32 deg;
        int left;   // -1 for generators
        int right;  // generator index for leaves
    };

    HallBasis(u32 ngens, u32 maxdeg) : ngens_(ngens), maxdeg_(maxdeg) {
        by_degree_.resize(maxdeg + 1);
        for (u32 g = 0; g < ngens; ++g) {
            by_degree_[1].push_back(static_cast<u32>(nodes_.size()));
            nodes_.push_back(Node{1, -1, static_cast<int>(g)});
        }
        for (u32 d = 2; d <= maxdeg; ++d) {
            for (u32 ad = 1; 2 * ad <= d; ++ad) {
                u32 bd = d - ad;
                for (u32 b : by_degree_[bd])
                    for (u32 a : by_degree_[ad]) {
                        if (!valid_pair(a, b)) continue;
                        by_degree_[d].push_back(static_cast<u32>(nodes_.size()));
                        nodes_.push_back(Node{d, static_cast<int>(a), static_cast<int>(b)});
                    }
            }
            if (by_degree_[d].size() != witt_dimension(ngens, d))
                fail(Errc::Internal, "Hall basis dimension mismatch");
        }
    }

    u32 ngens() const { return ngens_; }
    u32 maxdeg() const { return maxdeg_; }
    std::size_t size() const { return nodes_.size(); }
    const Node& node(u32 id) const { return nodes_[id]; }
    u32 degree(u32 id) const { return nodes_[id].deg; }
    bool is_leaf(u32 id) const { return nodes_[id].left < 0; }
    const std::vector<u32>& degree_ids(u32 d) const { return by_degree_[d]; }
    u32 generator(u32 g) const { return by_degree_[1][g]; }

    static u64 witt_dimension(u32 ngens, u32 d) {
        // (1/d) sum_{e | d} mu(e) ngens^{d/e}
        i64 acc = 0;
        for (u32 e = 1; e <= d; ++e) {
            if (d % e) continue;
            int mu = moebius(e);
            if (!mu) continue;
            i64 pw = 1;
            for (u32 k = 0; k < d / e; ++k) pw *= ngens;
            acc += mu * pw;
        }
        return static_cast<u64>(acc / d);
    }

  private:
    static int moebius(u32 n) {
        int m = 1;
        for (u32 q = 2; q * q <= n; ++q) {
            if (n % q) continue;
            n /= q;
            if (n % q == 0) return 0;
            m = -m;
        }
        if (n > 1) m = -m;
        return m;
    }

    bool valid_pair(u32 a, u32 b) const {
        if (a >= b) return false;
        const Node& nb = nodes_[b];
        return nb.left < 0 || static_cast<u32>(nb.left) <= a;
    }

    u32 ngens_, maxdeg_;
    std::vector<Node> nodes_;
    std::vector<std::vector<u32>> by_degree_;
};

// sparse rational combination of Hall basis elements
using LieElem = std::map<u32, Rat>;

inline void lie_add_term(LieElem& e, u32 id, const Rat& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = e.emplace(id, c);
    if (!fresh) {
        it->second = it->second + c;
        if (it->second.is_zero()) e.erase(it);
    }
}

inline LieElem lie_add(const LieElem& a, const LieElem& b) {
    LieElem r = a;
    for (const auto& [id, c] : b) lie_add_term(r, id, c);
    return r;
}

inline LieElem lie_scale(const LieElem& a, const Rat& s) {
    LieElem r;
    if (s.is_zero()) return r;
    for (const auto& [id, c] : a) r[id] = c * s;
    return r;
}

/* Bracket of basis elements expanded back into the basis, truncating above
 * maxdeg.  The non-Hall case [a, [b1, b2]] rewrites through the Jacobi
 * identity as [[a, b1], b2] - [[a, b2], b1]; results are memoized. */
class FreeLie {
  public:
    explicit FreeLie(const HallBasis& basis) : h_(&basis) {}

    const HallBasis& basis() const { return *h_; }

    const LieElem& basis_bracket(u32 a, u32 b) {
        auto key = std::make_pair(a, b);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        LieElem r = compute_bracket(a, b);
        return memo_.emplace(key, std::move(r)).first->second;
    }

    LieElem bracket(const LieElem& x, const LieElem& y) {
        LieElem r;
        for (const auto& [a, ca] : x)
            for (const auto& [b, cb] : y) {
                if (h_->degree(a) + h_->degree(b) > h_->maxdeg()) continue;
                Rat c = ca * cb;
                for (const auto& [id, k] : basis_bracket(a, b)) lie_add_term(r, id, c * k);
            }
        return r;
    }

    LieElem generator(u32 g) const {
        LieElem e;
        e[h_->generator(g)] = Rat(1);
        return e;
    }

  private:
    LieElem compute_bracket(u32 a, u32 b) {
        LieElem r;
        if (a == b) return r;
        if (h_->degree(a) + h_->degree(b) > h_->maxdeg()) return r;
        if (a > b) {
            for (const auto& [id, c] : basis_bracket(b, a)) lie_add_term(r, id, -c);
            return r;
        }
        const HallBasis::Node& nb = h_->node(b);
        if (nb.left < 0 || static_cast<u32>(nb.left) <= a) {
            // a Hall pair is itself a basis element; find it
            for (u32 id : h_->degree_ids(h_->degree(a) + h_->degree(b))) {
                const HallBasis::Node& n = h_->node(id);
                if (n.left == static_cast<int>(a) && n.right == static_cast<int>(b)) {
                    r[id] = Rat(1);
                    return r;
                }
            }
            fail(Errc::Internal, "Hall pair not found in basis");
        }
        u32 b1 = static_cast<u32>(nb.left), b2 = static_cast<u32>(nb.right);
        // [a,[b1,b2]] = [[a,b1],b2] - [[a,b2],b1]
        LieElem ab1 = basis_bracket(a, b1);
        for (const auto& [id, c] : ab1)
            for (const auto& [id2, c2] : basis_bracket(id, b2)) lie_add_term(r, id2, c * c2);
        LieElem ab2 = basis_bracket(a, b2);
        for (const auto& [id, c] : ab2)
            for (const auto& [id2, c2] : basis_bracket(id, b1)) lie_add_term(r, id2, -(c * c2));
        return r;
    }

    const HallBasis* h_;
    std::map<std::pair<u32, u32>, LieElem> memo_;
};

/* ---- free associative algebra on words, truncated by length ---- */

/* Words over an alphabet of k letters, lengths 0..D, indexed level by level;
 * index 0 is the empty word. */
class WordAlgebra {
  public:
    WordAlgebra(u32 nletters, u32 maxlen) : k_(nletters), D_(maxlen) {
        offsets_.resize(D_ + 2);
        offsets_[0] = 0;
        u64 level = 1;
        for (u32 l = 0; l <= D_; ++l) {
            offsets_[l + 1] = offsets_[l] + level;
            level *= k_;
        }
    }

    u32 nletters() const { return k_; }
    u32 maxlen() const { return D_; }
    std::size_t size() const { return offsets_[D_ + 1]; }
    u64 level_offset(u32 len) const { return offsets_[len]; }
    u64 level_count(u32 len) const { return offsets_[len + 1] - offsets_[len]; }

    // word as digit string, most significant first
    u64 index_of(const std::vector<u32>& w) const {
        u64 code = 0;
        for (u32 c : w) code = code * k_ + c;
        return offsets_[w.size()] + code;
    }

    u32 length_of(u64 idx) const {
        u32 l = 0;
        while (offsets_[l + 1] <= idx) ++l;
        return l;
    }

    u64 concat(u64 a, u64 b, bool& overflow) const {
        u32 la = length_of(a), lb = length_of(b);
        if (la + lb > D_) { overflow = true; return 0; }
        overflow = false;
        u64 ca = a - offsets_[la], cb = b - offsets_[lb];
        u64 pw = 1;
        for (u32 i = 0; i < lb; ++i) pw *= k_;
        return offsets_[la + lb] + ca * pw + cb;
    }

  private:
    u32 k_, D_;
    std::vector<u64> offsets_;
};

using AssocElem = std::map<u64, Rat>;

inline void assoc_add_term(AssocElem& e, u64 idx, const Rat& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = e.emplace(idx, c);
    if (!fresh) {
        it->second = it->second + c;
        if (it->second.is_zero()) e.erase(it);
    }
}

inline AssocElem assoc_add(const AssocElem& a, const AssocElem& b) {
    AssocElem r = a;
    for (const auto& [i, c] : b) assoc_add_term(r, i, c);
    return r;
}

inline AssocElem assoc_scale(const AssocElem& a, const Rat& s) {
    AssocElem r;
    if (s.is_zero()) return r;
    for (const auto& [i, c] : a) r[i] = c * s;
    return r;
}

inline AssocElem assoc_mul(const WordAlgebra& W, const AssocElem& a, const AssocElem& b) {
    AssocElem r;
    for (const auto& [i, ci] : a)
        for (const auto& [j, cj] : b) {
            bool over;
            u64 ij = W.concat(i, j, over);
            if (!over) assoc_add_term(r, ij, ci * cj);
        }
    return r;
}

inline AssocElem assoc_letter(const WordAlgebra& W, u32 letter) {
    AssocElem e;
    e[W.index_of({letter})] = Rat(1);
    return e;
}

// exp of an element with zero constant term
inline AssocElem assoc_exp(const WordAlgebra& W, const AssocElem& a) {
    if (a.count(0)) fail(Errc::ParameterViolation, "exp needs zero constant term");
    AssocElem r, pw;
    r[0] = Rat(1);
    pw[0] = Rat(1);
    i64 factorial = 1;
    for (u32 j = 1; j <= W.maxlen(); ++j) {
        pw = assoc_mul(W, pw, a);
        factorial *= j;
        r = assoc_add(r, assoc_scale(pw, Rat(1, factorial)));
    }
    return r;
}

// log of an element with constant term 1
inline AssocElem assoc_log(const WordAlgebra& W, const AssocElem& u) {
    auto it = u.find(0);
    if (it == u.end() || !(it->second == Rat(1)))
        fail(Errc::ParameterViolation, "log needs constant term 1");
    AssocElem v = u;
    v.erase(0);
    AssocElem r, pw;
    pw[0] = Rat(1);
    for (u32 j = 1; j <= W.maxlen(); ++j) {
        pw = assoc_mul(W, pw, v);
        r = assoc_add(r, assoc_scale(pw, Rat(j % 2 ? 1 : -1, j)));
    }
    return r;
}

// commutator expansion of a Hall basis element into words
inline AssocElem hall_to_words(const WordAlgebra& W, const HallBasis& H, u32 id) {
    if (H.is_leaf(id)) return assoc_letter(W, static_cast<u32>(H.node(id).right));
    AssocElem a = hall_to_words(W, H, static_cast<u32>(H.node(id).left));
    AssocElem b = hall_to_words(W, H, static_cast<u32>(H.node(id).right));
    return assoc_add(assoc_mul(W, a, b), assoc_scale(assoc_mul(W, b, a), Rat(-1)));
}

}  // namespace coex

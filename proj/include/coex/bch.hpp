#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "coex/freelie.hpp"

namespace coex {

/* Baker-Campbell-Hausdorff series log(exp(x)exp(y)) written in the Hall
 * basis on two generators, one (id, coefficient) pair per nonzero term. */
using BchSeries = std::vector<std::pair<u32, Rat>>;

/* Recompute the series from scratch: expand log(exp(x)exp(y)) in the free
 * associative algebra truncated at maxdeg, then solve for the Hall
 * coordinates degree by degree with exact Gaussian elimination.  The system
 * being solvable at all is itself a check that the logarithm is a Lie
 * element; any leftover residual throws. */
inline BchSeries derive_bch_series(const HallBasis& H) {
    u32 D = H.maxdeg();
    if (H.ngens() != 2) fail(Errc::ParameterViolation, "BCH needs the 2-generator basis");
    WordAlgebra W(2, D);
    AssocElem Z = assoc_log(
        W, assoc_mul(W, assoc_exp(W, assoc_letter(W, 0)), assoc_exp(W, assoc_letter(W, 1))));

    BchSeries out;
    for (u32 d = 1; d <= D; ++d) {
        const auto& ids = H.degree_ids(d);
        u32 m = static_cast<u32>(ids.size());
        std::vector<AssocElem> cols;
        cols.reserve(m);
        for (u32 id : ids) cols.push_back(hall_to_words(W, H, id));
        u64 base = W.level_offset(d), cnt = W.level_count(d);
        std::vector<std::vector<Rat>> M(cnt, std::vector<Rat>(m + 1));
        for (u64 w = 0; w < cnt; ++w) {
            for (u32 j = 0; j < m; ++j) {
                auto it = cols[j].find(base + w);
                if (it != cols[j].end()) M[w][j] = it->second;
            }
            auto it = Z.find(base + w);
            if (it != Z.end()) M[w][m] = it->second;
        }
        u64 row = 0;
        std::vector<u64> pivot_row(m);
        for (u32 col = 0; col < m; ++col) {
            u64 pr = row;
            while (pr < cnt && M[pr][col].is_zero()) ++pr;
            if (pr == cnt) fail(Errc::Internal, "Hall expansion columns not independent");
            std::swap(M[pr], M[row]);
            Rat inv = Rat(1) / M[row][col];
            for (u32 j = col; j <= m; ++j) M[row][j] = M[row][j] * inv;
            for (u64 r2 = 0; r2 < cnt; ++r2) {
                if (r2 == row || M[r2][col].is_zero()) continue;
                Rat f = M[r2][col];
                for (u32 j = col; j <= m; ++j) M[r2][j] = M[r2][j] - f * M[row][j];
            }
            pivot_row[col] = row;
            ++row;
        }
        for (u64 r2 = row; r2 < cnt; ++r2)
            if (!M[r2][m].is_zero()) fail(Errc::Internal, "log(exp x exp y) is not a Lie element");
        for (u32 j = 0; j < m; ++j) {
            Rat c = M[pivot_row[j]][m];
            if (!c.is_zero()) out.emplace_back(ids[j], c);
        }
    }
    return out;
}

/* The series through degree 5, frozen.  Hall ids on two generators are
 * stable because the basis is generated degree by degree:
 *   0 x   1 y   2 [x,y]   3 [x,[x,y]]   4 [y,[x,y]]
 *   5 [x,[x,[x,y]]]   6 [y,[x,[x,y]]]   7 [y,[y,[x,y]]]
 *   8 [x,[x,[x,[x,y]]]]   9 [y,[x,[x,[x,y]]]]   10 [y,[y,[x,[x,y]]]]
 *   11 [y,[y,[y,[x,y]]]]  12 [[x,y],[x,[x,y]]]  13 [[x,y],[y,[x,y]]]
 * (entries for ids 5 and 7 vanish).  Tests recompute with
 * derive_bch_series and compare. */
class BchTable {
  public:
    explicit BchTable(u32 maxdeg) : hall_(2, maxdeg) {
        if (maxdeg < 1 || maxdeg > 5) fail(Errc::DegreeUnsupported, "BCH table covers degrees 1..5");
        static const std::pair<u32, Rat> frozen[] = {
            {0, Rat(1)},        {1, Rat(1)},        {2, Rat(1, 2)},
            {3, Rat(1, 12)},    {4, Rat(-1, 12)},   {6, Rat(-1, 24)},
            {8, Rat(-1, 720)},  {9, Rat(-1, 180)},  {10, Rat(1, 180)},
            {11, Rat(1, 720)},  {12, Rat(-1, 120)}, {13, Rat(-1, 360)},
        };
        for (const auto& t : frozen)
            if (t.first < hall_.size()) terms_.push_back(t);
    }

    const HallBasis& hall() const { return hall_; }
    u32 maxdeg() const { return hall_.maxdeg(); }
    const BchSeries& terms() const { return terms_; }

  private:
    HallBasis hall_;
    BchSeries terms_;
};

/* Evaluate a series in any algebra that provides zero/add/scale/bracket.
 * Terms above degree_cap are skipped entirely, so their coefficients never
 * reach ops.scale; that matters when scale reduces mod p^k and the skipped
 * denominators are the only ones divisible by p. */
template <class E, class Ops>
E evaluate_series(const HallBasis& h2, const BchSeries& terms, const Ops& ops, const E& x,
                  const E& y, u32 degree_cap) {
    std::vector<std::optional<E>> memo(h2.size());
    auto eval = [&](auto&& self, u32 id) -> const E& {
        if (!memo[id]) {
            const auto& n = h2.node(id);
            if (n.left < 0)
                memo[id] = (n.right == 0) ? x : y;
            else
                memo[id] = ops.bracket(self(self, static_cast<u32>(n.left)),
                                       self(self, static_cast<u32>(n.right)));
        }
        return *memo[id];
    };
    E acc = ops.zero();
    for (const auto& [id, c] : terms) {
        if (h2.degree(id) > degree_cap) continue;
        acc = ops.add(acc, ops.scale(eval(eval, id), c));
    }
    return acc;
}

template <class E, class Ops>
E bch_combine(const BchTable& T, const Ops& ops, const E& x, const E& y, u32 degree_cap) {
    return evaluate_series(T.hall(), T.terms(), ops, x, y, degree_cap);
}

template <class E, class Ops>
E bch_combine(const BchTable& T, const Ops& ops, const E& x, const E& y) {
    return bch_combine(T, ops, x, y, T.maxdeg());
}

// ops over the free Lie algebra itself, handy for formal identities
struct FreeLieOps {
    FreeLie* fl;
    LieElem zero() const { return {}; }
    LieElem add(const LieElem& a, const LieElem& b) const { return lie_add(a, b); }
    LieElem scale(const LieElem& a, const Rat& c) const { return lie_scale(a, c); }
    LieElem bracket(const LieElem& a, const LieElem& b) const { return fl->bracket(a, b); }
};

}  // namespace coex

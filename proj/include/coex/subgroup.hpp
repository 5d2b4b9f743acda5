#pragma once

#include <optional>
#include <vector>

#include "coex/abelian.hpp"

namespace coex {

/* Subgroups of a finite abelian p-group, kept in a p-adic echelon form.
 *
 * Every stored row is zero strictly left of its pivot column, and the pivot
 * entry is exactly p^val.  Inserting a generator also inserts the shadow
 * p^(e-val) * row, which keeps the membership sweep sound over Z/p^e
 * (without it, multiples of a row that vanish at the pivot column would be
 * reported as non-members).  The row list is deterministic for a fixed
 * insertion order but is not a canonical form; compare subgroups with
 * subgroup_equal, not row by row.
 */
struct Subgroup {
    const CoordShape* shape = nullptr;
    std::vector<Elem> rows;
    std::vector<std::size_t> pivcol;
    std::vector<u32> pivval;

    u64 order() const {
        u64 r = 1;
        for (std::size_t i = 0; i < rows.size(); ++i)
            r *= pow_u64_checked(shape->p, shape->exps[pivcol[i]] - pivval[i]);
        return r;
    }

    bool contains(const Elem& x) const {
        Elem v = x;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::size_t c = pivcol[i];
            if (v[c] == 0) continue;
            u32 vv = valuation(v[c], shape->p, shape->exps[c]);
            if (vv < pivval[i]) return false;
            u64 m = v[c] / pow_u64_checked(shape->p, pivval[i]);
            v = sub(*shape, v, scalar_mul(*shape, m, rows[i]));
        }
        return is_zero(v);
    }

    // Coefficients c_i with x = sum c_i * rows[i], if x is a member.
    std::optional<std::vector<u64>> coeffs(const Elem& x) const {
        Elem v = x;
        std::vector<u64> cs(rows.size(), 0);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::size_t c = pivcol[i];
            if (v[c] == 0) continue;
            u32 vv = valuation(v[c], shape->p, shape->exps[c]);
            if (vv < pivval[i]) return std::nullopt;
            u64 m = v[c] / pow_u64_checked(shape->p, pivval[i]);
            cs[i] = m;
            v = sub(*shape, v, scalar_mul(*shape, m, rows[i]));
        }
        if (!is_zero(v)) return std::nullopt;
        return cs;
    }

    // All elements, as combinations of the echelon rows.  Only for small orders.
    std::vector<Elem> elements(u64 cap = u64(1) << 24) const {
        u64 n = order();
        if (n > cap) fail(Errc::TooLarge, "subgroup too large to enumerate");
        std::vector<u64> ranges;
        for (std::size_t i = 0; i < rows.size(); ++i)
            ranges.push_back(pow_u64_checked(shape->p, shape->exps[pivcol[i]] - pivval[i]));
        std::vector<Elem> out;
        out.reserve(n);
        std::vector<u64> ctr(rows.size(), 0);
        for (u64 t = 0; t < n; ++t) {
            Elem cur = zero_elem(*shape);
            for (std::size_t j = 0; j < rows.size(); ++j)
                if (ctr[j]) cur = add(*shape, cur, scalar_mul(*shape, ctr[j], rows[j]));
            out.push_back(std::move(cur));
            for (std::size_t j = rows.size(); j-- > 0;) {
                if (++ctr[j] < ranges[j]) break;
                ctr[j] = 0;
            }
        }
        return out;
    }
};

class SubgroupBuilder {
  public:
    explicit SubgroupBuilder(const CoordShape& shape) : shape_(&shape) {
        pivot_at_.assign(shape.rank(), kNone);
    }

    void insert(Elem v) { work_.push_back(std::move(v)); drain(); }

    Subgroup take() {
        Subgroup s;
        s.shape = shape_;
        // order rows by pivot column for a deterministic result
        std::vector<std::size_t> idx;
        for (std::size_t c = 0; c < shape_->rank(); ++c)
            if (pivot_at_[c] != kNone) idx.push_back(pivot_at_[c]);
        for (std::size_t i : idx) {
            s.rows.push_back(rows_[i]);
            s.pivcol.push_back(cols_[i]);
            s.pivval.push_back(vals_[i]);
        }
        return s;
    }

  private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    void drain() {
        while (!work_.empty()) {
            Elem v = std::move(work_.back());
            work_.pop_back();
            sweep(std::move(v));
        }
    }

    void sweep(Elem v) {
        for (std::size_t c = 0; c < shape_->rank(); ++c) {
            if (v[c] == 0) continue;
            u32 vv = valuation(v[c], shape_->p, shape_->exps[c]);
            std::size_t pi = pivot_at_[c];
            if (pi == kNone) {
                install(c, vv, std::move(v));
                return;
            }
            if (vv < vals_[pi]) {
                Elem displaced = std::move(rows_[pi]);
                rows_[pi] = normalize(v, c, vv);
                vals_[pi] = vv;
                push_shadow(rows_[pi], c, vv);
                work_.push_back(std::move(displaced));
                return;
            }
            u64 m = v[c] / pow_u64_checked(shape_->p, vals_[pi]);
            v = sub(*shape_, v, scalar_mul(*shape_, m, rows_[pi]));
        }
    }

    Elem normalize(const Elem& v, std::size_t c, u32 vv) {
        u64 pk = pow_u64_checked(shape_->p, vv);
        u64 unit = v[c] / pk;
        u64 big = *std::max_element(shape_->mods.begin(), shape_->mods.end());
        u64 w = coex::unit_inverse(unit % big, big);
        return scalar_mul(*shape_, w, v);
    }

    void install(std::size_t c, u32 vv, Elem v) {
        Elem nv = normalize(v, c, vv);
        rows_.push_back(nv);
        cols_.push_back(c);
        vals_.push_back(vv);
        pivot_at_[c] = rows_.size() - 1;
        push_shadow(nv, c, vv);
    }

    void push_shadow(const Elem& row, std::size_t c, u32 vv) {
        u64 mult = pow_u64_checked(shape_->p, shape_->exps[c] - vv);
        Elem sh = scalar_mul(*shape_, mult, row);
        if (!is_zero(sh)) work_.push_back(std::move(sh));
    }

    const CoordShape* shape_;
    std::vector<Elem> rows_;
    std::vector<std::size_t> cols_;
    std::vector<u32> vals_;
    std::vector<std::size_t> pivot_at_;
    std::vector<Elem> work_;
};

inline Subgroup subgroup_closure(const CoordShape& A, const std::vector<Elem>& gens) {
    SubgroupBuilder b(A);
    for (const Elem& g : gens) {
        if (!reduced(A, g)) fail(Errc::ParameterViolation, "generator not reduced for shape");
        b.insert(g);
    }
    return b.take();
}

inline bool subgroup_equal(const Subgroup& a, const Subgroup& b) {
    if (a.order() != b.order()) return false;
    for (const Elem& r : a.rows)
        if (!b.contains(r)) return false;
    return true;
}

inline bool subgroup_leq(const Subgroup& a, const Subgroup& b) {
    for (const Elem& r : a.rows)
        if (!b.contains(r)) return false;
    return true;
}

// {x : p^i x = 0} for the whole carrier; a direct sum, so no closure needed.
inline Subgroup omega_subgroup(const AbelianType& A, u32 i) {
    std::vector<Elem> gens;
    for (std::size_t j = 0; j < A.rank(); ++j) {
        u32 shift = A.exps[j] > i ? A.exps[j] - i : 0;
        Elem g = zero_elem(A);
        g[j] = pow_u64_checked(A.p, shift) % A.mods[j];
        if (!is_zero(g)) gens.push_back(g);
    }
    return subgroup_closure(A, gens);
}

// p^i-th multiples of the whole carrier.
inline Subgroup agemo_subgroup(const AbelianType& A, u32 i) {
    std::vector<Elem> gens;
    for (std::size_t j = 0; j < A.rank(); ++j) {
        if (i >= A.exps[j]) continue;
        Elem g = zero_elem(A);
        g[j] = pow_u64_checked(A.p, i);
        gens.push_back(g);
    }
    return subgroup_closure(A, gens);
}

inline Subgroup agemo_of(const CoordShape& A, const Subgroup& S, u32 i) {
    std::vector<Elem> gens;
    u64 mult = pow_u64_checked(A.p, i);
    for (const Elem& r : S.rows) {
        Elem g = scalar_mul(A, mult, r);
        if (!is_zero(g)) gens.push_back(g);
    }
    return subgroup_closure(A, gens);
}

}  // namespace coex

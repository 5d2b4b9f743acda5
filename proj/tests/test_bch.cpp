#include <doctest.h>

#include <coex/bch.hpp>

using namespace coex;

namespace {

struct WordOps {
    const WordAlgebra* W;
    AssocElem zero() const { return {}; }
    AssocElem add(const AssocElem& a, const AssocElem& b) const { return assoc_add(a, b); }
    AssocElem scale(const AssocElem& a, const Rat& c) const { return assoc_scale(a, c); }
    AssocElem bracket(const AssocElem& a, const AssocElem& b) const {
        return assoc_add(assoc_mul(*W, a, b), assoc_scale(assoc_mul(*W, b, a), Rat(-1)));
    }
};

}  // namespace

TEST_CASE("hall basis dimensions and structure") {
    HallBasis H2(2, 5);
    CHECK(H2.degree_ids(1).size() == 2);
    CHECK(H2.degree_ids(2).size() == 1);
    CHECK(H2.degree_ids(3).size() == 2);
    CHECK(H2.degree_ids(4).size() == 3);
    CHECK(H2.degree_ids(5).size() == 6);
    CHECK(H2.size() == 14);

    // creation order is part of the frozen-table contract
    auto pair_is = [&](u32 id, int l, int r) {
        return H2.node(id).left == l && H2.node(id).right == r;
    };
    CHECK(pair_is(2, 0, 1));
    CHECK(pair_is(3, 0, 2));
    CHECK(pair_is(4, 1, 2));
    CHECK(pair_is(5, 0, 3));
    CHECK(pair_is(6, 1, 3));
    CHECK(pair_is(7, 1, 4));
    CHECK(pair_is(8, 0, 5));
    CHECK(pair_is(9, 1, 5));
    CHECK(pair_is(10, 1, 6));
    CHECK(pair_is(11, 1, 7));
    CHECK(pair_is(12, 2, 3));
    CHECK(pair_is(13, 2, 4));

    HallBasis H3(3, 5);
    CHECK(H3.degree_ids(1).size() == 3);
    CHECK(H3.degree_ids(2).size() == 3);
    CHECK(H3.degree_ids(3).size() == 8);
    CHECK(H3.degree_ids(4).size() == 18);
    CHECK(H3.degree_ids(5).size() == 48);
    CHECK(H3.size() == 80);
}

TEST_CASE("free lie bracket is alternating and satisfies jacobi") {
    HallBasis H(3, 5);
    FreeLie FL(H);

    LieElem x = FL.generator(0), y = FL.generator(1), z = FL.generator(2);
    LieElem mix = lie_add(x, lie_scale(lie_add(y, FL.bracket(x, z)), Rat(3, 2)));

    CHECK(FL.bracket(mix, mix).empty());
    CHECK(FL.bracket(x, y) == lie_scale(FL.bracket(y, x), Rat(-1)));
    CHECK(FL.bracket(mix, z) == lie_scale(FL.bracket(z, mix), Rat(-1)));

    // jacobi over all triples of basis elements of degree <= 2
    std::vector<u32> small;
    for (u32 d = 1; d <= 2; ++d)
        for (u32 id : H.degree_ids(d)) small.push_back(id);
    REQUIRE(small.size() == 6);
    for (u32 a : small)
        for (u32 b : small)
            for (u32 c : small) {
                LieElem ea, eb, ec;
                ea[a] = Rat(1);
                eb[b] = Rat(1);
                ec[c] = Rat(1);
                LieElem s = lie_add(FL.bracket(FL.bracket(ea, eb), ec),
                                    lie_add(FL.bracket(FL.bracket(eb, ec), ea),
                                            FL.bracket(FL.bracket(ec, ea), eb)));
                CHECK(s.empty());
            }
}

TEST_CASE("word algebra product, exp, log") {
    WordAlgebra W(2, 4);
    CHECK(W.size() == 1 + 2 + 4 + 8 + 16);

    AssocElem X = assoc_letter(W, 0), Y = assoc_letter(W, 1);
    AssocElem XY = assoc_mul(W, X, Y);
    CHECK(XY.size() == 1);
    CHECK(W.length_of(XY.begin()->first) == 2);

    // associativity on mixed elements
    AssocElem a = assoc_add(X, assoc_scale(Y, Rat(2)));
    AssocElem b = assoc_add(Y, XY);
    AssocElem c = assoc_add(X, assoc_scale(XY, Rat(-1, 3)));
    CHECK(assoc_mul(W, assoc_mul(W, a, b), c) == assoc_mul(W, a, assoc_mul(W, b, c)));

    // exp and log are mutually inverse on the truncation
    AssocElem v = assoc_add(assoc_add(X, assoc_scale(Y, Rat(1, 2))), assoc_scale(XY, Rat(5)));
    CHECK(assoc_log(W, assoc_exp(W, v)) == v);
    AssocElem one_plus;
    one_plus[0] = Rat(1);
    one_plus = assoc_add(one_plus, v);
    CHECK(assoc_exp(W, assoc_log(W, one_plus)) == one_plus);

    CHECK_THROWS_AS(assoc_exp(W, one_plus), Error);
    CHECK_THROWS_AS(assoc_log(W, v), Error);
}

TEST_CASE("frozen bch table equals the derived series") {
    for (u32 D = 1; D <= 5; ++D) {
        BchTable T(D);
        CHECK(T.terms() == derive_bch_series(T.hall()));
    }
}

TEST_CASE("exp of the evaluated series reproduces exp(x)exp(y)") {
    for (u32 D = 2; D <= 5; ++D) {
        BchTable T(D);
        WordAlgebra W(2, D);
        WordOps ops{&W};
        AssocElem X = assoc_letter(W, 0), Y = assoc_letter(W, 1);
        AssocElem z = bch_combine(T, ops, X, Y);
        CHECK(assoc_exp(W, z) == assoc_mul(W, assoc_exp(W, X), assoc_exp(W, Y)));
    }
}

TEST_CASE("bch composition is associative in the free nilpotent algebra") {
    for (u32 D = 1; D <= 5; ++D) {
        CAPTURE(D);
        HallBasis H(3, D);
        FreeLie FL(H);
        FreeLieOps ops{&FL};
        BchTable T(D);
        LieElem x = FL.generator(0), y = FL.generator(1), z = FL.generator(2);
        LieElem lhs = bch_combine(T, ops, bch_combine(T, ops, x, y), z);
        LieElem rhs = bch_combine(T, ops, x, bch_combine(T, ops, y, z));
        CHECK(lhs == rhs);

        // x combined with -x cancels
        CHECK(bch_combine(T, ops, x, lie_scale(x, Rat(-1))).empty());
    }
}

TEST_CASE("a corrupted coefficient is detected") {
    // replace the 1/2 on [x,y] with 1/3
    auto corrupt = [](BchSeries s) {
        for (auto& [id, c] : s)
            if (id == 2) c = Rat(1, 3);
        return s;
    };

    {
        BchTable T(2);
        BchSeries bad = corrupt(T.terms());
        WordAlgebra W(2, 2);
        WordOps ops{&W};
        AssocElem X = assoc_letter(W, 0), Y = assoc_letter(W, 1);
        AssocElem z = evaluate_series(T.hall(), bad, ops, X, Y, 2);
        CHECK_FALSE(assoc_exp(W, z) == assoc_mul(W, assoc_exp(W, X), assoc_exp(W, Y)));
    }
    {
        BchTable T(3);
        BchSeries bad = corrupt(T.terms());
        HallBasis H(3, 3);
        FreeLie FL(H);
        FreeLieOps ops{&FL};
        LieElem x = FL.generator(0), y = FL.generator(1), z = FL.generator(2);
        LieElem lhs = evaluate_series(T.hall(), bad, ops,
                                      evaluate_series(T.hall(), bad, ops, x, y, 3), z, 3);
        LieElem rhs = evaluate_series(T.hall(), bad, ops, x,
                                      evaluate_series(T.hall(), bad, ops, y, z, 3), 3);
        CHECK_FALSE(lhs == rhs);
    }
}

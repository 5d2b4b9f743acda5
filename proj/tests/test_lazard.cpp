#include <doctest.h>

#include <random>

#include "coex/lazard.hpp"

using namespace coex;

namespace {

LieRing ring_V() {
    AbelianType A(5, {2, 2, 1});
    return make_liering(A, {{0, 0, 0}, {0, 0, 0}, {0, 5, 0}});
}
LieRing ring_W() {
    AbelianType A(5, {2, 2, 1});
    return make_liering(A, {{0, 0, 0}, {0, 0, 0}, {5, 0, 0}});
}
LieRing ring_X() {
    return abelian_ring(AbelianType(5, {2, 2, 1}));
}
LieRing heisenberg(u64 p) {
    AbelianType A(p, {1, 1, 1});
    return make_liering(A, {{0, 0, 1}, {0, 0, 0}, {0, 0, 0}});
}

}  // namespace

TEST_CASE("abelian ring gives coordinate addition") {
    BchTable T(5);
    LieRing X = ring_X();
    BchGroup g(X, T);
    CHECK(g.size() == 3125);
    CHECK(g.cls() == 1);

    std::mt19937_64 rng(11);
    std::uniform_int_distribution<u64> pick(0, g.size() - 1);
    for (int t = 0; t < 200; ++t) {
        Elem a = g.at(pick(rng)), b = g.at(pick(rng));
        CHECK(g.mul(a, b) == add(X.A, a, b));
    }

    GroupReport rep = group_invariants(g, g.basis_gens());
    CHECK(rep.n == 5);
    CHECK(rep.exponent_exp == 2);
    CHECK(rep.coexponent == 3);
    CHECK(rep.cls == 1);
    CHECK(rep.omega_orders == std::vector<u64>{1, 125, 3125});
    CHECK(rep.agemo_orders == std::vector<u64>{3125, 25, 1});
    CHECK(rep.omega_type == std::vector<u32>{3, 2});
    CHECK(rep.mu_type == std::vector<u32>{2, 2, 1});
    CHECK(omega_agemo_duality(rep));
}

TEST_CASE("bch group of V matches ring invariants") {
    BchTable T(5);
    LieRing V = ring_V();
    BchGroup g(V, T);

    GroupReport rep = group_invariants(g, g.basis_gens());
    CHECK(rep.exponent_exp == 2);  // group exponent 25, the additive exponent
    CHECK(rep.coexponent == 3);
    CHECK(rep.cls == 2);
    CHECK(rep.cls == nilpotency_class(V));
    CHECK(omega_agemo_duality(rep));

    // commutator subgroup order equals the derived subring order
    auto series = group_lower_central(g, g.basis_gens());
    REQUIRE(series.size() == 3);
    CHECK(series[0].order() == 3125);
    CHECK(series[1].order() == 5);
    CHECK(derived_subring(V).order() == 5);

    CHECK(identity_inverse_laws(g));

    // the admissible agemo inclusion at i = 1
    CHECK(agemo_inclusion_claim(g, g.basis_gens(), 1, rep));
}

TEST_CASE("class too high and degree guards") {
    BchTable T2(2);
    AbelianType A(3, {1, 1, 1, 1});
    std::vector<Elem> t(6, zero_elem(A));
    t[0] = {0, 0, 1, 0};  // [e1,e2] = e3
    t[1] = {0, 0, 0, 1};  // [e1,e3] = e4, class 3
    LieRing cls3 = make_liering(A, t);
    CHECK_THROWS_AS(BchGroup(cls3, T2), Error);  // table degree below class

    AbelianType A2(2, {1, 1, 1});
    LieRing h2 = make_liering(A2, {{0, 0, 1}, {0, 0, 0}, {0, 0, 0}});
    BchTable T5(5);
    CHECK_THROWS_AS(BchGroup(h2, T5), Error);  // class 2 not below p = 2
}

TEST_CASE("associativity exhaustive on small rings, sampled on V") {
    BchTable T(5);
    LieRing H = heisenberg(5);
    BchGroup gh(H, T);
    TableGroup tg(gh);
    AssociativityReport ar = associativity_check(tg);
    CHECK(ar.exhaustive);
    CHECK(ar.triples == 125u * 125 * 125);
    CHECK(ar.ok());
    CHECK(identity_inverse_laws(tg));

    LieRing V = ring_V();
    BchGroup gv(V, T);
    AssociativityReport av = associativity_check(gv, 20000, 7);
    CHECK_FALSE(av.exhaustive);
    CHECK(av.triples == 20000);
    CHECK(av.ok());
}

TEST_CASE("table group agrees with the group it memoizes") {
    BchTable T(5);
    LieRing H = heisenberg(5);
    BchGroup g(H, T);
    TableGroup tg(g);
    CHECK(tg.size() == g.size());
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<u64> pick(0, g.size() - 1);
    for (int t = 0; t < 500; ++t) {
        u64 a = pick(rng), b = pick(rng);
        CHECK(tg.mul(a, b) == g.code(g.mul(g.at(a), g.at(b))));
        CHECK(tg.inv(a) == g.code(g.inv(g.at(a))));
    }
}

TEST_CASE("lazard recipes reconstruct the ring operations") {
    BchTable T(5);
    LazardRecipes rec = derive_lazard_recipes(T);
    CHECK(rec.maxdeg == 5);
    REQUIRE(!rec.addition.corrections.empty());
    // leading correction undoes the 1/2 [x,y] of the product
    CHECK(rec.addition.corrections.front().first == 2);
    CHECK(rec.addition.corrections.front().second == Rat(-1, 2));
    // bracket corrections start at degree 3
    for (const auto& [id, q] : rec.bracket.corrections) CHECK(T.hall().degree(id) >= 3);

    RoundtripReport hh = lazard_roundtrip(heisenberg(5), T, rec);
    CHECK(hh.exhaustive);
    CHECK(hh.ok());

    for (const LieRing& L : {ring_V(), ring_W(), ring_X()}) {
        RoundtripReport r = lazard_roundtrip(L, T, rec, 300, 42);
        CHECK_FALSE(r.exhaustive);
        CHECK(r.add_pairs == 300);
        CHECK(r.ok());
    }
}

TEST_CASE("corrupted recipe exponent breaks the roundtrip") {
    BchTable T(5);
    LazardRecipes rec = derive_lazard_recipes(T);
    rec.addition.corrections.front().second = Rat(-1, 3);
    RoundtripReport r = lazard_roundtrip(heisenberg(5), T, rec);
    CHECK_FALSE(r.ok());
    CHECK(r.add_failures > 0);
}

TEST_CASE("regularity reports") {
    BchTable T(5);
    LieRing X = ring_X();
    BchGroup gx(X, T);
    RegularityReport ra = regularity_check(gx, 150, 9);
    CHECK_FALSE(ra.exhaustive);
    CHECK(ra.pairs_tested == 150);
    CHECK(ra.ok());

    LieRing H = heisenberg(5);
    BchGroup gh(H, T);
    TableGroup tg(gh);
    RegularityReport rh = regularity_check(tg);
    CHECK(rh.exhaustive);
    CHECK(rh.pairs_tested == 125u * 125);
    CHECK(rh.ok());
}

TEST_CASE("extremal stage 1 structure at (5,2,4)") {
    ExtremalStage1 P(5, 2, 4);
    CHECK(P.size() == 3125);  // p^{n+1}
    CHECK(P.g_order() == 25);
    CHECK(identity_inverse_laws(P));
    AssociativityReport ar = associativity_check(P, 30000, 5);
    CHECK(ar.ok());

    // conjugation by g steps the chain: [x_i, g] = x_{i+1}
    for (u32 i = 1; i <= P.f(); ++i)
        CHECK(P.code(commutator(P, P.x_elem(i), P.g_elem())) == P.code(P.x_elem(i + 1)));
    // x_{f+1} commutes with g
    CHECK(P.code(commutator(P, P.x_elem(P.f() + 1), P.g_elem())) == P.code(P.identity()));

    // gamma_i(P) = <x_i, ..., x_{f+1}> for 2 <= i <= f+2
    auto series = group_lower_central(P, P.gens());
    REQUIRE(series.size() == P.f() + 2);  // class f+1
    CHECK(series[0].order() == P.size());
    for (u32 i = 2; i <= P.f() + 2; ++i) {
        std::vector<ExtremalStage1::ElemT> tail;
        for (u32 j = i; j <= P.f() + 1; ++j) tail.push_back(P.x_elem(j));
        if (tail.empty()) tail.push_back(P.identity());
        CodeSet expect = group_closure(P, tail);
        CHECK(series[i - 1].codes == expect.codes);
    }

    // power lemma: (g^k a)^{p^2} = g^{k p^2}, exhaustively
    u64 p2 = 25;
    for (u64 k = 0; k < P.g_order(); ++k)
        for (u64 ai = 0; ai < 125; ++ai) {
            ExtremalStage1::ElemT a = P.at(ai * P.g_order());  // pure A-part
            ExtremalStage1::ElemT gk = P.at(k);                // pure g-power
            ExtremalStage1::ElemT lhs = group_pow(P, P.mul(gk, a), p2);
            ExtremalStage1::ElemT rhs = group_pow(P, gk, p2);
            CHECK(P.code(lhs) == P.code(rhs));
        }
}

TEST_CASE("extremal stage 2 has coexponent f and class f+1") {
    for (auto [p, f, n] : {std::tuple<u64, u32, u32>{5, 2, 4}, {5, 3, 5}}) {
        CAPTURE(p);
        CAPTURE(f);
        CAPTURE(n);
        ExtremalStage2 G(p, f, n);
        CHECK(G.size() == pow_u64_checked(p, n));
        CHECK(identity_inverse_laws(G));

        // the quotient identifies x_{f+1} with g^{p^{n-f-1}}
        ExtremalStage2::ElemT xl = G.x_elem(f + 1);
        CHECK(xl.a == std::vector<u64>(f + 1, 0));
        CHECK(xl.k == pow_u64_checked(p, n - f - 1));

        GroupReport rep = group_invariants(G, G.gens());
        CHECK(rep.n == n);
        CHECK(rep.exponent_exp == n - f);
        CHECK(rep.coexponent == f);
        CHECK(rep.cls == f + 1);
        CHECK(omega_agemo_duality(rep));
    }
}

TEST_CASE("extremal parameter validation") {
    CHECK_THROWS_AS(ExtremalStage1(4, 2, 5), Error);  // p not prime
    CHECK_THROWS_AS(ExtremalStage1(3, 3, 6), Error);  // p < f+1
    CHECK_THROWS_AS(ExtremalStage1(5, 2, 3), Error);  // n < f+2
}

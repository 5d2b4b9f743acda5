#include <doctest.h>

#include <set>

#include "coex/equivalence.hpp"
#include "coex/liering.hpp"

using namespace coex;

namespace {

LieRing ring_V(u64 p) {
    AbelianType A(p, {2, 2, 1});
    return make_liering(A, {{0, 0, 0}, {0, 0, 0}, {0, p, 0}});
}
LieRing ring_W(u64 p) {
    AbelianType A(p, {2, 2, 1});
    return make_liering(A, {{0, 0, 0}, {0, 0, 0}, {p, 0, 0}});
}
LieRing ring_X(u64 p) { return abelian_ring(AbelianType(p, {2, 2, 1})); }

Elem zc(const LieRing& U) { return basis_elem(U.A, 0); }

// convenience for building state matrices entry by entry, rows/cols 0-based
Elem state(const LieRing& U, std::initializer_list<std::tuple<int, int, u64>> entries) {
    Elem m = zero_mat(U.A);
    std::size_t r = U.A.rank();
    for (auto [i, j, v] : entries) m[static_cast<std::size_t>(i) * r + static_cast<std::size_t>(j)] = v;
    require_state(U, m);
    return m;
}

}  // namespace

TEST_CASE("nilpotent state spaces have the predicted sizes") {
    for (u64 p : {u64(5), u64(7)}) {
        u64 p5 = p * p * p * p * p, p6 = p5 * p, p7 = p6 * p, p8 = p7 * p;
        StateSpace sv = nilpotent_states(ring_V(p));
        CHECK(sv.der_order == p6);
        CHECK(sv.size() == p5);
        StateSpace sw = nilpotent_states(ring_W(p));
        CHECK(sw.der_order == p7);
        CHECK(sw.size() == p6);
        StateSpace sx = nilpotent_states(ring_X(p));
        CHECK(sx.der_order == p8);
        CHECK(sx.size() == p6);
        // codes are sorted, dedup'd, and decode back to members
        CHECK(std::is_sorted(sv.codes.begin(), sv.codes.end()));
        for (std::size_t k = 0; k < sv.size(); k += 97) {
            Elem m = sv.matrix_at(k);
            CHECK(sv.index_of(elem_index(sv.mshape, m)) == k);
            CHECK(is_derivation(ring_V(p), m));
            CHECK(is_nilpotent_mat(AbelianType(p, {2, 2, 1}), m));
        }
    }
}

TEST_CASE("inner derivations of the base rings") {
    LieRing V = ring_V(5), W = ring_W(5), X = ring_X(5);
    CHECK(inner_derivation(V, basis_elem(V.A, 2)) == Elem{0, 0, 0, 0, 5, 0, 0, 0, 0});
    CHECK(inner_derivation(V, basis_elem(V.A, 1)) == Elem{0, 0, 0, 0, 0, 0, 0, 20, 0});
    CHECK(inner_derivation(W, basis_elem(W.A, 2)) == Elem{0, 0, 0, 5, 0, 0, 0, 0, 0});
    CHECK(is_zero(inner_derivation(V, basis_elem(V.A, 0))));
    for (std::size_t i = 0; i < 3; ++i) CHECK(is_zero(inner_derivation(X, basis_elem(X.A, i))));
}

TEST_CASE("orbit counts match the published census") {
    for (u64 p : {u64(5), u64(7)}) {
        OrbitPartition pv = orbit_partition(ring_V(p), zc(ring_V(p)));
        CHECK(pv.classes() == 2 * p + 1);
        OrbitPartition pw = orbit_partition(ring_W(p), zc(ring_W(p)));
        CHECK(pw.classes() == 3 * p + 11);
        OrbitPartition px = orbit_partition(ring_X(p), zc(ring_X(p)));
        CHECK(px.classes() == 18);

        for (const OrbitPartition* P : {&pv, &pw, &px}) {
            u64 total = 0;
            for (u64 s : P->sizes) total += s;
            CHECK(total == P->states.size());
            // representatives are the least codes of their classes, in order
            CHECK(std::is_sorted(P->representatives.begin(), P->representatives.end()));
            for (std::size_t c = 0; c < P->classes(); ++c)
                CHECK(P->class_of_code(P->representatives[c]) == c);
        }
    }
}

TEST_CASE("line-fixing automorphism counts") {
    u64 p = 5, q = p - 1;
    u64 p6 = p * p * p * p * p * p, p7 = p6 * p;
    CHECK(count_lie_auts_fixing_line(ring_V(p), zc(ring_V(p))) == p6 * q * q);
    CHECK(count_lie_auts_fixing_line(ring_W(p), zc(ring_W(p))) == p7 * q * q);
    CHECK(count_lie_auts_fixing_line(ring_X(p), zc(ring_X(p))) == p7 * q * q * q);
}

TEST_CASE("every enumerated automorphism is one, and the stream is duplicate free") {
    LieRing W = ring_W(5);
    std::set<Elem> seen;
    u64 n = 0;
    enumerate_lie_auts_fixing_line(W, zc(W), [&](const Elem& pi, u64 alpha) {
        if (n % 1009 == 0) {
            CHECK(is_lie_automorphism(W, pi));
            CHECK(zline_scalar(W.A, pi) == alpha);
            CHECK(alpha % 5 != 0);
            CHECK(seen.insert(pi).second);
        }
        ++n;
        return true;
    });
    CHECK(n == 1250000);
}

TEST_CASE("orbit classes are stable under extra random automorphisms") {
    for (auto make : {ring_V, ring_W, ring_X}) {
        LieRing U = make(5);
        OrbitPartition base = orbit_partition(U, zc(U));
        OrbitPartition fat = orbit_partition(U, zc(U), random_line_auts(U, 100, 20260823));
        CHECK(base.classes() == fat.classes());
        CHECK(base.class_of == fat.class_of);
        CHECK(base.sizes == fat.sizes);
    }
}

TEST_CASE("orbit classes are closed under the complete automorphism set") {
    for (auto make : {ring_V, ring_W, ring_X}) {
        LieRing U = make(5);
        OrbitPartition P = orbit_partition(U, zc(U));
        CHECK(orbit_closure_under_all_auts(U, zc(U), P));
    }
}

TEST_CASE("direct equivalence is reflexive and symmetric on sampled states") {
    LieRing V = ring_V(5);
    Elem z = zc(V);
    OrbitPartition P = orbit_partition(V, z);

    Elem s0 = P.states.matrix_at(40);
    auto self = equivalent_direct(V, z, s0, s0);
    REQUIRE(self.has_value());
    CHECK(witness_valid(V, s0, s0, *self));

    // two members of one orbit, both directions
    std::vector<Elem> same;
    for (std::size_t k = 0; k < P.states.size() && same.size() < 2; ++k)
        if (P.class_of[k] == 5) same.push_back(P.states.matrix_at(k));
    REQUIRE(same.size() == 2);
    auto fwd = equivalent_direct(V, z, same[0], same[1]);
    auto bwd = equivalent_direct(V, z, same[1], same[0]);
    REQUIRE(fwd.has_value());
    REQUIRE(bwd.has_value());
    CHECK(witness_valid(V, same[0], same[1], *fwd));
    CHECK(witness_valid(V, same[1], same[0], *bwd));
    CHECK(fwd->alpha % 5 != 0);

    // members of distinct orbits never acquire a witness
    Elem r0 = P.states.matrix_at(P.states.index_of(P.representatives[0]));
    Elem r3 = P.states.matrix_at(P.states.index_of(P.representatives[3]));
    CHECK_FALSE(equivalent_direct(V, z, r0, r3).has_value());
}

TEST_CASE("direct equivalence agrees with the orbit partition classwise") {
    LieRing V = ring_V(5);
    Elem z = zc(V);
    OrbitPartition P = orbit_partition(V, z);
    std::vector<Elem> reps;
    for (u64 code : P.representatives) reps.push_back(elem_at(P.states.mshape, code));
    PairwiseDirectReport r = pairwise_inequivalent_direct(V, z, reps);
    CHECK(r.all_inequivalent);
    CHECK(r.line_auts == 250000);

    // negative control: a corrupted list with two states from one orbit
    std::vector<Elem> bad = reps;
    for (std::size_t k = 0; k < P.states.size(); ++k)
        if (P.class_of[k] == 2 && P.states.codes[k] != P.representatives[2]) {
            bad.push_back(P.states.matrix_at(k));
            break;
        }
    PairwiseDirectReport r2 = pairwise_inequivalent_direct(V, z, bad);
    CHECK_FALSE(r2.all_inequivalent);
    std::set<std::size_t> hit{r2.hit.first, r2.hit.second};
    CHECK(hit == std::set<std::size_t>{2, bad.size() - 1});
}

TEST_CASE("unit rescaling of a derivation never changes its class") {
    LieRing V = ring_V(5);
    Elem z = zc(V);
    Elem sigma = state(V, {{1, 0, 5}});  // u1 -> pz
    Elem tau = scalar_mul(mat_shape(V.A), 6, sigma);
    auto w = equivalent_direct(V, z, sigma, tau);
    REQUIRE(w.has_value());
    CHECK(witness_valid(V, sigma, tau, *w));

    // and the same through the orbit route
    OrbitPartition P = orbit_partition(V, z);
    CHECK(P.class_of_code(elem_index(P.states.mshape, sigma)) ==
          P.class_of_code(elem_index(P.states.mshape, tau)));
}

TEST_CASE("case-one pairs with unit leading coefficients collapse") {
    // sigma, tau with u1 -> b1 p z, b1 and d1 both units: one class
    LieRing V = ring_V(5);
    Elem sigma = state(V, {{1, 0, 5}});
    Elem tau = state(V, {{1, 0, 15}});
    auto w = equivalent_direct(V, zc(V), sigma, tau);
    REQUIRE(w.has_value());
    CHECK(witness_valid(V, sigma, tau, *w));
}

TEST_CASE("distinct abelian representatives are not equivalent, by direct scan") {
    LieRing X = ring_X(5);
    Elem rho1 = state(X, {{1, 0, 5}});            // u1 -> pz
    Elem rho2 = state(X, {{1, 0, 5}, {2, 1, 5}});  // u1 -> pz, u2 -> p u1
    PairwiseDirectReport r = pairwise_inequivalent_direct(X, zc(X), {rho1, rho2});
    CHECK(r.all_inequivalent);
    CHECK(r.line_auts == 5000000);
}

TEST_CASE("central transitivity holds for the three base rings") {
    CHECK(central_transitivity_check(ring_V(5)));
    CHECK(central_transitivity_check(ring_W(5)));
    CHECK(central_transitivity_check(ring_X(5)));
    CHECK(central_transitivity_check(ring_V(7)));
}

TEST_CASE("equivalence engine rejects bad inputs") {
    LieRing V = ring_V(5);
    Elem z = zc(V);

    // z must span the distinguished line
    CHECK_THROWS_AS(orbit_partition(V, basis_elem(V.A, 1)), Error);
    CHECK_THROWS_AS(orbit_partition(V, Elem{5, 0, 0}), Error);
    CHECK(orbit_partition(V, Elem{2, 0, 0}).classes() == 11);  // unit multiple is fine

    // the distinguished generator must be central
    LieRing H = make_liering(AbelianType(5, {1, 1, 1}), {{0, 0, 1}, {0, 0, 0}, {0, 0, 0}});
    CHECK_THROWS_AS(central_transitivity_check(H), Error);
    CHECK_THROWS_AS(count_lie_auts_fixing_line(H, basis_elem(H.A, 0)), Error);

    // state validation: non-graded, non-derivation, non-nilpotent
    Elem bad1 = zero_mat(V.A);
    bad1[2 * 3 + 0] = 1;  // u2 -> z needs a multiple of p
    CHECK_THROWS_AS(equivalent_direct(V, z, bad1, bad1), Error);
    Elem bad2 = zero_mat(V.A);
    bad2[1 * 3 + 0] = 1;  // graded but not a derivation
    CHECK_THROWS_AS(equivalent_direct(V, z, bad2, bad2), Error);
    Elem bad3 = zero_mat(V.A);
    bad3[1 * 3 + 1] = 1;  // a derivation, but invertible on u1
    CHECK_THROWS_AS(equivalent_direct(V, z, bad3, bad3), Error);

    // scan cap
    LieRing V11 = ring_V(11);
    CHECK_THROWS_AS(count_lie_auts_fixing_line(V11, zc(V11)), Error);
    Elem s11 = state(V11, {{1, 0, 11}});
    CHECK_THROWS_AS(equivalent_direct(V11, zc(V11), s11, s11), Error);

    // carrier size guard
    LieRing big = abelian_ring(AbelianType(5, {2, 2, 1, 1}));
    CHECK_THROWS_AS(orbit_partition(big, basis_elem(big.A, 0)), Error);
}

TEST_CASE("transitivity on a sampled chain") {
    LieRing W = ring_W(5);
    Elem z = zc(W);
    OrbitPartition P = orbit_partition(W, z);
    std::vector<Elem> chain;
    for (std::size_t k = 0; k < P.states.size() && chain.size() < 3; ++k)
        if (P.class_of[k] == 11) chain.push_back(P.states.matrix_at(k));
    REQUIRE(chain.size() == 3);
    auto ab = equivalent_direct(W, z, chain[0], chain[1]);
    auto bc = equivalent_direct(W, z, chain[1], chain[2]);
    auto ac = equivalent_direct(W, z, chain[0], chain[2]);
    REQUIRE(ab.has_value());
    REQUIRE(bc.has_value());
    REQUIRE(ac.has_value());
    CHECK(witness_valid(W, chain[0], chain[2], *ac));
}

#include <doctest.h>

#include <random>

#include "coex/constructions.hpp"

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

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::Internal;
}

}  // namespace

TEST_CASE("extension data validation") {
    LieRing V = ring_V();
    Elem zero = zero_mat(V.A);

    CHECK(code_of([&] { u_construction(V, zero, 1); }) == Errc::ParameterViolation);

    Elem badrow = zero_mat(V.A);
    badrow[0] = 5;  // z row must vanish
    CHECK(code_of([&] { u_construction(V, badrow, 4); }) == Errc::ParameterViolation);

    Elem notder = zero_mat(V.A);
    notder[2 * 3 + 2] = 1;  // u2 -> u2 alone does not respect [u1,u2] = 5u1
    CHECK(!is_derivation(V, notder));
    CHECK(code_of([&] { u_construction(V, notder, 4); }) == Errc::ParameterViolation);

    // first generator not central
    AbelianType H(5, {1, 1, 1});
    LieRing bad = make_liering(H, {{0, 0, 1}, {0, 0, 0}, {0, 0, 0}});
    CHECK(code_of([&] { u_construction(bad, zero_mat(H), 3); }) == Errc::ParameterViolation);
}

TEST_CASE("u-construction with the zero derivation") {
    LieRing V = ring_V();
    LieRing L = u_construction(V, zero_mat(V.A), 4);
    CHECK(L.A.exps == std::vector<u32>{4, 2, 1});
    CHECK(L.A.order() == 78125);
    CHECK(nilpotency_class(L) == 2);
    CHECK(L.c(1, 2) == Elem{0, 5, 0});  // [u1,u2] = 5u1 carries over
    CHECK(is_zero(L.c(0, 1)));
    CHECK(is_zero(L.c(0, 2)));
}

TEST_CASE("u-construction with an inner derivation and the omega recovery") {
    LieRing V = ring_V();
    Elem sigma = inner_derivation(V, basis_elem(V.A, 2));  // ad u2
    CHECK(sigma == Elem{0, 0, 0, 0, 5, 0, 0, 0, 0});
    CHECK(is_nilpotent_mat(V.A, sigma));

    for (u32 m : {4u, 6u}) {
        LieRing L = u_construction(V, sigma, m);
        CHECK(L.A.exps == std::vector<u32>{m, 2, 1});
        TypeInvariants ti = type_invariants(L.A);
        CHECK(ti.coexponent == 3);
        CHECK(nilpotency_class(L) == 2);

        // the omega-2 layer on its echelon basis is the original ring again
        Subgroup om = omega_subgroup(L.A, 2);
        SubringResult sub = subring_on(L, om);
        CHECK(sub.ring.A.exps == V.A.exps);
        CHECK(sub.ring.table == V.table);
    }
}

TEST_CASE("semidirect route and direct substitution agree") {
    std::mt19937_64 rng(31);
    for (const LieRing& U : {ring_V(), ring_W()}) {
        CoordShape ms;
        Subgroup derz = derivation_space(U, true, ms);
        std::vector<Elem> pool = derz.elements();
        int done = 0;
        for (std::size_t t = 0; t < pool.size() && done < 25; ++t) {
            const Elem& sigma = pool[rng() % pool.size()];
            for (u32 m : {4u, 6u}) {
                LieRing direct = u_construction(U, sigma, m);

                LieRing sd = semidirect_cyclic(U, sigma, m);
                CHECK(sd.A.exps == std::vector<u32>{m, 2, 2, 1});
                // identify z with p^{m-2} w
                Elem rel = zero_elem(sd.A);
                rel[0] = pow_u64_checked(5, m - 2);
                rel[1] = sd.A.mods[1] - 1;  // minus z
                Subgroup I = subgroup_closure(sd.A, {rel});
                QuotientResult q = quotient(sd, I);
                CHECK(q.ring.A.exps == direct.A.exps);
                CHECK(q.ring.table == direct.table);
            }
            ++done;
        }
    }
}

TEST_CASE("u-construction class stays at most one above the base") {
    // nilpotent sigma adds w acting nilpotently; spot-check classes over a sample
    std::mt19937_64 rng(32);
    LieRing W = ring_W();
    CoordShape ms;
    Subgroup derz = derivation_space(W, true, ms);
    std::vector<Elem> pool = derz.elements();
    int checked = 0;
    for (std::size_t t = 0; t < pool.size() && checked < 15; ++t) {
        const Elem& sigma = pool[rng() % pool.size()];
        if (!is_nilpotent_mat(W.A, sigma)) continue;
        LieRing L = u_construction(W, sigma, 4);
        CHECK(nilpotency_class(L) <= 4);
        CHECK(nilpotency_class(L) >= 2);
        ++checked;
    }
    CHECK(checked == 15);
}

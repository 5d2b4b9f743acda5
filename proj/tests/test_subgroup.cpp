#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "coex/subgroup.hpp"

using namespace coex;

namespace {

// reference closure: repeatedly add generators until stable
std::set<Elem> brute_closure(const CoordShape& A, const std::vector<Elem>& gens) {
    std::set<Elem> seen{zero_elem(A)};
    std::vector<Elem> frontier{zero_elem(A)};
    while (!frontier.empty()) {
        Elem x = frontier.back();
        frontier.pop_back();
        for (const Elem& g : gens) {
            Elem y = add(A, x, g);
            if (seen.insert(y).second) frontier.push_back(y);
        }
    }
    return seen;
}

void check_against_brute(const CoordShape& A, const std::vector<Elem>& gens) {
    Subgroup S = subgroup_closure(A, gens);
    std::set<Elem> ref = brute_closure(A, gens);
    REQUIRE(S.order() == ref.size());
    for (const Elem& x : ref) CHECK(S.contains(x));
    // spot-check non-members
    u64 n = A.order();
    u64 misses = 0;
    for (u64 i = 0; i < n && misses < 50; ++i) {
        Elem x = elem_at(A, i);
        if (!ref.count(x)) {
            CHECK(!S.contains(x));
            ++misses;
        }
    }
    // enumeration agrees
    std::set<Elem> enumd;
    for (const Elem& x : S.elements()) enumd.insert(x);
    CHECK(enumd == ref);
    // coefficients reconstruct members
    for (const Elem& x : ref) {
        auto cs = S.coeffs(x);
        REQUIRE(cs.has_value());
        Elem acc = zero_elem(A);
        for (std::size_t i = 0; i < S.rows.size(); ++i)
            acc = add(A, acc, scalar_mul(A, (*cs)[i], S.rows[i]));
        CHECK(acc == x);
    }
}

}  // namespace

TEST_CASE("closure matches brute force on random generators") {
    std::mt19937_64 rng(12345);
    std::vector<CoordShape> shapes = {
        CoordShape(2, {3, 1}),    CoordShape(3, {2, 2}),    CoordShape(5, {2, 1}),
        CoordShape(2, {2, 2, 1}), CoordShape(3, {1, 2, 1}), CoordShape(5, {1, 1, 1}),
    };
    for (const CoordShape& A : shapes) {
        for (int trial = 0; trial < 12; ++trial) {
            std::vector<Elem> gens;
            int k = 1 + static_cast<int>(rng() % 3);
            for (int j = 0; j < k; ++j) gens.push_back(elem_at(A, rng() % A.order()));
            check_against_brute(A, gens);
        }
    }
}

TEST_CASE("shadow rows keep membership sound") {
    // <(p,1)> in Z/p^2 x Z/p^2 contains p*(p,1) = (p^2,p) = (0,p)
    CoordShape A(5, {2, 2});
    Subgroup S = subgroup_closure(A, {{5, 1}});
    CHECK(S.contains({0, 5}));
    CHECK(S.order() == 25);
    check_against_brute(A, {{5, 1}});
}

TEST_CASE("degenerate closures") {
    CoordShape A(3, {2, 1});
    Subgroup empty = subgroup_closure(A, {});
    CHECK(empty.order() == 1);
    CHECK(empty.contains(zero_elem(A)));
    CHECK(!empty.contains({1, 0}));

    Subgroup full = subgroup_closure(A, {{1, 0}, {0, 1}});
    CHECK(full.order() == 27);

    CHECK_THROWS_AS(subgroup_closure(A, {{9, 0}}), Error);  // not reduced
}

TEST_CASE("idempotence and comparisons") {
    CoordShape A(5, {2, 2, 1});
    std::vector<Elem> gens = {{5, 3, 0}, {0, 5, 2}};
    Subgroup S = subgroup_closure(A, gens);
    Subgroup S2 = subgroup_closure(A, S.rows);
    CHECK(subgroup_equal(S, S2));
    CHECK(subgroup_leq(S, S2));
    Subgroup T = subgroup_closure(A, {gens[0]});
    CHECK(subgroup_leq(T, S));
    CHECK(!subgroup_leq(S, T));
    CHECK(!subgroup_equal(S, T));
}

TEST_CASE("omega and agemo layers") {
    AbelianType A(5, {2, 2, 1});
    CHECK(omega_subgroup(A, 0).order() == 1);
    CHECK(omega_subgroup(A, 1).order() == 125);
    CHECK(omega_subgroup(A, 2).order() == 3125);
    CHECK(agemo_subgroup(A, 0).order() == 3125);
    CHECK(agemo_subgroup(A, 1).order() == 25);
    CHECK(agemo_subgroup(A, 2).order() == 1);

    // omega_i has exponent dividing p^i, and every element with p^i x = 0 is inside
    Subgroup om = omega_subgroup(A, 1);
    for (const Elem& x : om.elements()) CHECK(is_zero(scalar_mul(A, 5, x)));
    for (u64 i = 0; i < A.order(); ++i) {
        Elem x = elem_at(A, i);
        if (is_zero(scalar_mul(A, 5, x))) CHECK(om.contains(x));
    }

    // agemo of a subgroup
    Subgroup S = subgroup_closure(A, {{1, 2, 1}});
    Subgroup aS = agemo_of(A, S, 1);
    CHECK(aS.order() == 5);
    CHECK(aS.contains({5, 10, 0}));
}

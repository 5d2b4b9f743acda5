#include <doctest.h>

#include "coex/abelian.hpp"
#include "coex/residue.hpp"

using namespace coex;

TEST_CASE("modular primitives") {
    CHECK(mulmod(7, 8, 25) == 6);
    CHECK(addmod(24, 24, 25) == 23);
    CHECK(submod(3, 8, 25) == 20);
    CHECK(negmod(0, 25) == 0);
    CHECK(powmod(2, 10, 1000) == 24);
    CHECK(powmod(5, 0, 7) == 1);

    CHECK(unit_inverse(2, 25) == 13);
    CHECK(unit_inverse(7, 25) == 18);
    CHECK(unit_inverse(1, 1) == 0);  // everything is 0 mod 1
    CHECK_THROWS_AS(unit_inverse(5, 25), Error);

    CHECK(valuation(0, 5, 3) == 3);
    CHECK(valuation(50, 5, 3) == 2);
    CHECK(valuation(12, 5, 3) == 0);

    CHECK(pow_u64_checked(13, 5) == 371293);
    CHECK_THROWS_AS(pow_u64_checked(2, 63), Error);
}

TEST_CASE("primality and prime powers") {
    CHECK(is_prime_u64(2));
    CHECK(is_prime_u64(13));
    CHECK(!is_prime_u64(1));
    CHECK(!is_prime_u64(91));

    PrimePower pp(5, 2);
    CHECK(pp.modulus == 25);
    CHECK_THROWS_AS(PrimePower(6, 2), Error);
    CHECK_THROWS_AS(PrimePower(5, 0), Error);
}

TEST_CASE("quadratic character and distinguished units") {
    // squares mod 7: 1,2,4
    CHECK(quadratic_character(1, 7) == 1);
    CHECK(quadratic_character(2, 7) == 1);
    CHECK(quadratic_character(3, 7) == -1);
    CHECK(quadratic_character(14, 7) == 0);

    CHECK(least_nonresidue(5) == 2);
    CHECK(least_nonresidue(7) == 3);
    CHECK(least_nonresidue(11) == 2);
    CHECK(least_nonresidue(13) == 2);

    CHECK(primitive_root(5) == 2);
    CHECK(primitive_root(7) == 3);
    CHECK(primitive_root(11) == 2);
    CHECK(primitive_root(13) == 2);

    // for the primes the census touches, the least root survives lifting
    for (u64 p : {5u, 7u, 11u, 13u}) {
        u64 h = primitive_root(PrimePower(p, 2));
        CHECK(h == primitive_root(p));
        // brute-force order check
        u64 m = p * p, ord = 1, t = h;
        while (t != 1) { t = mulmod(t, h, m); ++ord; }
        CHECK(ord == p * (p - 1));
    }
}

TEST_CASE("abelian carriers") {
    AbelianType A(5, {2, 2, 1});
    CHECK(A.rank() == 3);
    CHECK(A.n() == 5);
    CHECK(A.order() == 3125);
    CHECK(A.mu1() == 2);
    CHECK(A.exponent() == 25);
    CHECK_THROWS_AS(AbelianType(5, {1, 2}), Error);
    CHECK_THROWS_AS(AbelianType(4, {1}), Error);

    Elem x = {7, 24, 3};
    CHECK(reduced(A, x));
    CHECK(!reduced(A, {25, 0, 0}));
    CHECK(element_order(A, x) == 25);
    CHECK(element_order(A, {5, 10, 0}) == 5);
    CHECK(element_order(A, zero_elem(A)) == 1);

    Elem y = add(A, x, x);
    CHECK(y == Elem{14, 23, 1});
    CHECK(is_zero(sub(A, y, y)));
    CHECK(neg(A, Elem{1, 0, 4}) == Elem{24, 0, 1});
    CHECK(scalar_mul(A, 5, Elem{5, 5, 1}) == Elem{0, 0, 0});

    // index round trip
    for (u64 i : {u64(0), u64(1), u64(3124), u64(1234)}) {
        CHECK(elem_index(A, elem_at(A, i)) == i);
    }
}

TEST_CASE("type invariants and duality") {
    TypeInvariants ti = type_invariants(AbelianType(5, {4, 2, 1}));
    CHECK(ti.mu == std::vector<u32>{4, 2, 1});
    CHECK(ti.omega == std::vector<u32>{3, 2, 1, 1});
    CHECK(ti.n == 7);
    CHECK(ti.exponent_exp == 4);
    CHECK(ti.coexponent == 3);

    CHECK(dual_partition({4, 2, 1}) == std::vector<u32>{3, 2, 1, 1});
    CHECK(dual_partition({2, 2, 1}) == std::vector<u32>{3, 2});
    CHECK(dual_partition({1, 1, 1}) == std::vector<u32>{3});
    CHECK(dual_partition({3}) == std::vector<u32>{1, 1, 1});
}

#include <exception>
#include <functional>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "coex/verify.hpp"

/* The acceptance gate: one line per criterion, all criteria always run,
 * exit 0 only if every one passes. */

using namespace coex;

namespace {

std::string c1_orbit_counts() {
    const Verify221Report& a = verify_221(5);
    const Verify221Report& b = verify_221(7);
    if (a.classes != std::array<u64, 3>{11, 26, 18})
        fail(Errc::Mismatch, "expected 11/26/18 orbit classes at p=5");
    if (b.classes != std::array<u64, 3>{15, 32, 18})
        fail(Errc::Mismatch, "expected 15/32/18 orbit classes at p=7");
    return "V/W/X orbit counts 11/26/18 at p=5 and 15/32/18 at p=7";
}

std::string c2_representatives() {
    representatives_direct_check(5);  // throws if any pair is directly equivalent
    auto rings = transversal_221(5);
    const Verify221Report& R = verify_221(5);
    for (int k = 0; k < 3; ++k) {
        OrbitPartition P = orbit_partition(rings[k].ring, rings[k].z);
        u64 sum = std::accumulate(P.sizes.begin(), P.sizes.end(), u64(0));
        if (sum != P.states.size() || sum != R.nilpotent_states[k])
            fail(Errc::Mismatch, "orbit sizes do not sum to the nilpotent derivation count");
    }
    verify_221(7);  // exactly one representative per orbit at p=7, by orbit lookup
    return "p=5: pairwise inequivalent by exhaustive direct scan, orbit sizes sum to "
           "the state counts; p=7: one per orbit via the partition";
}

std::string c3_totals() {
    if (verify_221(5).total != 55) fail(Errc::Mismatch, "expected 55 rings at p=5");
    if (verify_221(7).total != 65) fail(Errc::Mismatch, "expected 65 rings at p=7");
    return "partition (2,1) totals 5p+30: 55 at p=5, 65 at p=7";
}

std::string c4_rank2() {
    const u32 ns[3] = {7, 8, 9};
    const u64 want[3] = {6, 8, 9};
    for (int i = 0; i < 3; ++i)
        if (census_type3(5, ns[i]).size() != want[i])
            fail(Errc::Mismatch, "rank-2 census size off at n=" + std::to_string(ns[i]));
    return "rank-2 orbit counts 6/8/9 at (5,7)/(5,8)/(5,9); table hits every orbit once";
}

std::string c5_formula() {
    for (u64 p : {5ull, 7ull, 11ull, 13ull})
        for (u32 n : {7u, 8u, 9u, 12u})
            if (psi_formula(p, n) != psi_assembled(p, n))
                fail(Errc::Mismatch, "formula and census disagree at p=" + std::to_string(p) +
                                         ", n=" + std::to_string(n));
    if (psi_formula(5, 7) != 90 || psi_formula(5, 9) != 93 || psi_formula(7, 8) != 104)
        fail(Errc::Mismatch, "spot values 90/93/104 missed");
    return "closed formula = assembled census for p in {5,7,11,13}, n in {7,8,9,12}; "
           "spot values 90, 93, 104";
}

std::string c6_construction() {
    const auto& recs = census_221(5, 7);
    auto rings = transversal_221(5);
    if (recs.size() != 55) fail(Errc::Mismatch, "expected 55 order-5^7 records");
    for (const auto& rec : recs) {
        if (rec.ring.A.order() != 78125) fail(Errc::Mismatch, "extension order is not 5^7");
        if (type_invariants(rec.ring.A).coexponent != 3)
            fail(Errc::Mismatch, "extension coexponent is not 3");
        if (nilpotency_class(rec.ring) > 4) fail(Errc::Mismatch, "extension class exceeds 4");
        SubringResult sub = subring_on(rec.ring, omega_subgroup(rec.ring.A, 2));
        int k = rec.base == "V" ? 0 : rec.base == "W" ? 1 : 2;
        if (sub.ring.A.exps != rings[k].ring.A.exps || sub.ring.table != rings[k].ring.table)
            fail(Errc::Mismatch, "omega-2 subring is not the base ring");
    }
    return "all 55 extensions at m=4: order 5^7, coexponent 3, class <= 4, "
           "omega-2 subring equals the base ring";
}

std::string c7_stability() {
    if (stability_check(5, {2, 1}, 4, 6).compared != 55)
        fail(Errc::Mismatch, "expected 55 stable extensions");
    if (stability_check(5, {3}, 9, 10).compared != 9)
        fail(Errc::Mismatch, "expected 9 stable rank-2 rings");
    return "55 extensions agree at m=4 vs 6; 9 rank-2 fingerprint multisets agree at n=9 vs 10";
}

std::string c8_lazard() {
    VerifyOptions o;
    o.primes = {5};
    return suite_lazard(o);
}

std::string c9_extremal() {
    VerifyOptions o;
    o.primes = {5, 7};
    return suite_extremal(o);
}

std::string c10_regular() { return suite_groups(); }

}  // namespace

int main() {
    struct Criterion {
        const char* id;
        std::function<std::string()> run;
    };
    const std::vector<Criterion> criteria = {
        {"C1", c1_orbit_counts}, {"C2", c2_representatives}, {"C3", c3_totals},
        {"C4", c4_rank2},        {"C5", c5_formula},         {"C6", c6_construction},
        {"C7", c7_stability},    {"C8", c8_lazard},          {"C9", c9_extremal},
        {"C10", c10_regular},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        std::string note;
        bool ok = true;
        try {
            note = c.run();
        } catch (const std::exception& e) {
            ok = false;
            note = e.what();
        }
        std::cout << '[' << c.id << (ok ? " PASS] " : " FAIL] ") << note << std::endl;
        if (!ok) ++failed;
    }
    std::cout << "acceptance: " << (criteria.size() - failed) << '/' << criteria.size()
              << " criteria passed" << std::endl;
    return failed ? 1 : 0;
}

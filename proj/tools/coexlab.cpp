#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coex/verify.hpp"

using namespace coex;

namespace {

bool prime_ok(u64 p) {
    if (is_prime_u64(p)) return true;
    std::cerr << "p must be prime\n";
    return false;
}

int cmd_census(u64 p, u32 n, const std::string& part, const std::string& out) {
    if (!prime_ok(p)) return 2;
    CensusFile f = build_census_file(p, n, part);
    std::cout << "census p=" << p << " n=" << n << " partition=" << part << "\n";
    for (const auto& [label, cnt] : f.counts) std::cout << "  " << label << ": " << cnt << "\n";
    std::cout << "records: " << f.records.size() << "\n";
    if (!out.empty()) {
        write_file(out, export_census(f));
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

int cmd_verify(std::vector<u64> primes, const std::vector<std::string>& skip,
               const std::string& fault) {
    if (primes.empty()) primes = {5};
    for (u64 p : primes)
        if (!prime_ok(p)) return 2;
    const auto& names = verify_suite_names();
    for (const auto& s : skip)
        if (std::find(names.begin(), names.end(), s) == names.end()) {
            std::cerr << "unknown suite: " << s << "\n";
            return 2;
        }
    if (!fault.empty() && fault != "reps") {
        std::cerr << "unknown fault target: " << fault << "\n";
        return 2;
    }
    VerifyOptions o;
    o.primes = std::move(primes);
    o.skip = skip;
    o.inject_fault = fault;
    auto results = run_verification(o, std::cout);
    return all_passed(results) ? 0 : 1;
}

int cmd_formula(u64 p, u32 n) {
    if (!prime_ok(p)) return 2;
    u64 a = psi_part(p, n, {1, 1, 1});
    u64 b = psi_part(p, n, {2, 1});
    u64 c = psi_part(p, n, {3});
    u64 formula = psi_formula(p, n);
    std::cout << "p=" << p << " n=" << n << "\n"
              << "  partition 1,1,1: " << a << "\n"
              << "  partition 2,1:   " << b << "\n"
              << "  partition 3:     " << c << "\n"
              << "  assembled:       " << (a + b + c) << "\n"
              << "  formula:         " << formula << "\n";
    if (formula != a + b + c) {
        std::cerr << "formula disagrees with the assembled census\n";
        return 1;
    }
    return 0;
}

int cmd_extremal(u64 p, u32 f, u32 n) {
    if (!prime_ok(p)) return 2;
    ExtremalStage2 E(p, f, n);
    GroupReport rep = group_invariants(E, E.gens());
    std::cout << "extremal group at p=" << p << " f=" << f << " n=" << n << "\n"
              << "  order:      " << p << "^" << rep.n << "\n"
              << "  exponent:   " << p << "^" << rep.exponent_exp << "\n"
              << "  coexponent: " << rep.coexponent << "\n"
              << "  class:      " << rep.cls << "\n";
    std::cout << "  omega orders:";
    for (u64 v : rep.omega_orders) std::cout << " " << v;
    std::cout << "\n  agemo orders:";
    for (u64 v : rep.agemo_orders) std::cout << " " << v;
    std::cout << "\n  omega/agemo duality: " << (omega_agemo_duality(rep) ? "holds" : "FAILS")
              << "\n";
    return 0;
}

int cmd_orbit(const std::string& ring, u64 p) {
    if (!prime_ok(p)) return 2;
    BaseKind kind;
    if (ring == "V") kind = BaseKind::V;
    else if (ring == "W") kind = BaseKind::W;
    else if (ring == "X") kind = BaseKind::X;
    else {
        std::cerr << "ring must be V, W or X\n";
        return 2;
    }
    MarkedRing M = base_ring_221(p, kind);
    OrbitPartition P = orbit_partition(M.ring, M.z);
    std::cout << "base ring " << ring << " at p=" << p << "\n"
              << "  nilpotent derivations killing z: " << P.states.size() << "\n"
              << "  equivalence classes: " << P.classes() << "\n";
    std::map<u64, u64> histo;
    for (u64 s : P.sizes) ++histo[s];
    std::cout << "  orbit sizes:";
    for (const auto& [size, cnt] : histo) std::cout << " " << size << "x" << cnt;
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "coexlab: finite nilpotent Lie rings of small coexponent and their p-groups\n"
        "(set COEXLAB_SEED to override the documented sampling seed)"};
    app.require_subcommand(1);

    u64 c_p = 0;
    u32 c_n = 0;
    std::string c_part, c_out;
    CLI::App* census = app.add_subcommand("census", "classify one census and export it as JSON");
    census->add_option("--p", c_p, "prime modulus base")->required();
    census->add_option("--n", c_n, "exponent of the total order p^n, n >= 7")->required();
    census->add_option("--partition", c_part, "1,1,1 | 2,1 | 3 | all")->required();
    census->add_option("--out", c_out, "write the canonical archive to this path");

    std::vector<u64> v_p;
    std::vector<std::string> v_skip;
    std::string v_fault;
    CLI::App* verify = app.add_subcommand("verify", "run the verification playbook");
    verify->add_option("--p", v_p, "prime to verify at (repeatable, default 5)");
    verify->add_option("--skip", v_skip, "suite to skip (repeatable)");
    verify->add_option("--inject-fault", v_fault, "negative control; supported target: reps");

    u64 f_p = 0;
    u32 f_n = 0;
    CLI::App* formula = app.add_subcommand("formula", "closed counting formula vs the census");
    formula->add_option("--p", f_p, "prime")->required();
    formula->add_option("--n", f_n, "exponent of the total order")->required();

    u64 e_p = 0;
    u32 e_f = 0, e_n = 0;
    CLI::App* extremal = app.add_subcommand("extremal", "invariants of the extremal group");
    extremal->add_option("--p", e_p, "prime")->required();
    extremal->add_option("--f", e_f, "coexponent")->required();
    extremal->add_option("--n", e_n, "exponent of the group order p^n")->required();

    std::string o_ring;
    u64 o_p = 0;
    CLI::App* orbit = app.add_subcommand("orbit", "orbit partition over one base ring");
    orbit->add_option("--ring", o_ring, "V | W | X")->required();
    orbit->add_option("--p", o_p, "prime")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (census->parsed()) return cmd_census(c_p, c_n, c_part, c_out);
        if (verify->parsed()) return cmd_verify(v_p, v_skip, v_fault);
        if (formula->parsed()) return cmd_formula(f_p, f_n);
        if (extremal->parsed()) return cmd_extremal(e_p, e_f, e_n);
        if (orbit->parsed()) return cmd_orbit(o_ring, o_p);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        bool usage = e.code() == Errc::ParameterViolation || e.code() == Errc::UnsupportedPartition ||
                     e.code() == Errc::TooLarge;
        return usage ? 2 : 1;
    }
    return 2;
}

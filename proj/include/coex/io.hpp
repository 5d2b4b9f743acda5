#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "coex/census.hpp"

namespace coex {

using ordered_json = nlohmann::ordered_json;

/* Census archive: a self-describing header, records in canonical order and a
 * content checksum.  Serialization is canonical (fixed key order, smallest
 * non-negative residues, integers only), so equal files are equal byte-wise. */
struct CensusFile {
    u64 p = 0;
    u32 n = 0;
    std::string partition;              // "1,1,1", "2,1", "3" or "all"
    u64 nu = 0;                         // least quadratic non-residue mod p
    u64 h = 0;                          // least primitive root mod p
    std::map<std::string, u64> counts;  // per partition label, plus "total"
    std::vector<CensusRecord> records;
};

inline std::string partition_label(const std::vector<u32>& part) {
    std::string s;
    for (std::size_t i = 0; i < part.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(part[i]);
    }
    return s;
}

inline CensusFile build_census_file(u64 p, u32 n, const std::string& partition) {
    require_census_domain(p, n);
    CensusFile f;
    f.p = p;
    f.n = n;
    f.partition = partition;
    f.nu = least_nonresidue(p);
    f.h = primitive_root(p);
    if (partition == "1,1,1") {
        f.counts["1,1,1"] = psi_head_111(p);
    } else if (partition == "2,1") {
        f.records = census_221(p, n);
        f.counts["2,1"] = f.records.size();
    } else if (partition == "3") {
        f.records = census_type3(p, n);
        f.counts["3"] = f.records.size();
    } else if (partition == "all") {
        f.records = census_221(p, n);
        const auto& t3 = census_type3(p, n);
        f.counts["1,1,1"] = psi_head_111(p);
        f.counts["2,1"] = f.records.size();
        f.counts["3"] = t3.size();
        f.records.insert(f.records.end(), t3.begin(), t3.end());
        std::sort(f.records.begin(), f.records.end(), record_canonical_less);
        f.counts["total"] = psi_assembled(p, n);
    } else {
        fail(Errc::ParameterViolation, "partition must be one of 1,1,1  2,1  3  all");
    }
    return f;
}

namespace detail {

inline u64 fnv1a64(std::string_view s) {
    u64 x = 1469598103934665603ull;
    for (unsigned char c : s) {
        x ^= c;
        x *= 1099511628211ull;
    }
    return x;
}

inline std::string hex16(u64 v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline ordered_json record_json(const CensusRecord& r) {
    ordered_json j;
    j["p"] = r.p;
    j["n"] = r.n;
    j["partition"] = r.partition;
    j["type"] = r.ring.A.exps;
    j["brackets"] = r.ring.table;
    ordered_json fp;
    fp["cls"] = r.fp.cls;
    fp["derived_order"] = r.fp.derived_order;
    fp["center_order"] = r.fp.center_order;
    fp["depth_ambient"] = r.fp.derived_depth_ambient;
    fp["depth_center"] = r.fp.derived_depth_center;
    j["fingerprint"] = fp;
    j["base"] = r.base;
    if (r.base != "type3") {
        j["sigma"] = r.sigma;
        j["z"] = r.z;
        j["m"] = r.m;
    }
    return j;
}

inline ordered_json file_json(const CensusFile& f) {
    ordered_json j;
    j["format"] = 1;
    j["p"] = f.p;
    j["n"] = f.n;
    j["partition"] = f.partition;
    ordered_json conv;
    conv["basis"] =
        "matrix rows are the images of (z, u1, u2) acting on row vectors; "
        "rank-2 brackets are the (u, v) coordinates of [u,v]";
    conv["nu"] = f.nu;
    conv["h"] = f.h;
    j["conventions"] = conv;
    ordered_json counts;
    for (const auto& [k, v] : f.counts) counts[k] = v;
    j["counts"] = counts;
    ordered_json recs = ordered_json::array();
    for (const auto& r : f.records) recs.push_back(record_json(r));
    j["records"] = recs;
    return j;
}

/* Appends (or replaces) the checksum field, computed over the serialization
 * of everything else. */
inline void seal(ordered_json& j) {
    j.erase("checksum");
    j["checksum"] = "fnv1a64:" + hex16(fnv1a64(j.dump(2)));
}

[[noreturn]] inline void bad(const std::string& where, const std::string& what) {
    fail(Errc::FormatError, where + ": " + what);
}

inline const ordered_json& need(const ordered_json& o, const char* key,
                                const std::string& where) {
    auto it = o.find(key);
    if (it == o.end()) bad(where, std::string("missing field '") + key + "'");
    return *it;
}

inline u64 get_uint(const ordered_json& o, const char* key, const std::string& where) {
    const ordered_json& v = need(o, key, where);
    if (!v.is_number_unsigned()) bad(where, std::string("field '") + key +
                                               "' must be a non-negative integer");
    return v.get<u64>();
}

inline std::string get_str(const ordered_json& o, const char* key, const std::string& where) {
    const ordered_json& v = need(o, key, where);
    if (!v.is_string()) bad(where, std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

inline std::vector<u64> get_uint_array(const ordered_json& v, const std::string& where) {
    if (!v.is_array()) bad(where, "expected an array of integers");
    std::vector<u64> out;
    for (const auto& e : v) {
        if (!e.is_number_unsigned()) bad(where, "array entries must be non-negative integers");
        out.push_back(e.get<u64>());
    }
    return out;
}

}  // namespace detail

inline std::string export_census(const CensusFile& f) {
    ordered_json j = detail::file_json(f);
    detail::seal(j);
    return j.dump(2) + "\n";
}

/* Parses and fully re-validates an archive: checksum, conventions, canonical
 * record order, residue ranges, ring axioms, fingerprints and the declared
 * construction of every record.  Throws FormatError with the record index and
 * field on any defect. */
inline CensusFile import_census(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        fail(Errc::FormatError, std::string("json parse: ") + e.what());
    }
    const std::string H = "header";
    if (detail::get_uint(j, "format", H) != 1) detail::bad(H, "unsupported format version");

    std::string stored_checksum = detail::get_str(j, "checksum", H);
    {
        ordered_json body = j;
        body.erase("checksum");
        std::string expect = "fnv1a64:" + detail::hex16(detail::fnv1a64(body.dump(2)));
        if (stored_checksum != expect)
            detail::bad(H, "checksum mismatch (content edited or records reordered)");
    }

    CensusFile f;
    f.p = detail::get_uint(j, "p", H);
    u64 n64 = detail::get_uint(j, "n", H);
    if (n64 > 64) detail::bad(H, "n out of range");
    f.n = static_cast<u32>(n64);
    try {
        require_census_domain(f.p, f.n);
    } catch (const Error& e) {
        detail::bad(H, e.what());
    }
    f.partition = detail::get_str(j, "partition", H);

    const ordered_json& conv = detail::need(j, "conventions", H);
    f.nu = detail::get_uint(conv, "nu", H);
    f.h = detail::get_uint(conv, "h", H);
    if (f.nu != least_nonresidue(f.p) || f.h != primitive_root(f.p))
        detail::bad(H, "file was produced under different generator conventions");

    const ordered_json& counts = detail::need(j, "counts", H);
    if (!counts.is_object()) detail::bad(H, "counts must be an object");
    for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (!it.value().is_number_unsigned())
            detail::bad(H, "counts entries must be non-negative integers");
        f.counts[it.key()] = it.value().get<u64>();
    }

    const ordered_json& recs = detail::need(j, "records", H);
    if (!recs.is_array()) detail::bad(H, "records must be an array");

    std::map<std::string, u64> seen;
    std::size_t idx = 0;
    for (const auto& rj : recs) {
        std::string W = "record " + std::to_string(idx);
        CensusRecord rec;
        rec.p = detail::get_uint(rj, "p", W);
        rec.n = static_cast<u32>(detail::get_uint(rj, "n", W));
        if (rec.p != f.p || rec.n != f.n) detail::bad(W, "p or n differs from the header");

        for (u64 v : detail::get_uint_array(detail::need(rj, "partition", W), W + ": partition"))
            rec.partition.push_back(static_cast<u32>(v));
        std::string plabel = partition_label(rec.partition);
        if (f.partition != "all" && plabel != f.partition)
            detail::bad(W, "partition differs from the header");

        std::vector<u32> type;
        for (u64 v : detail::get_uint_array(detail::need(rj, "type", W), W + ": type"))
            type.push_back(static_cast<u32>(v));
        AbelianType A;
        try {
            A = AbelianType(f.p, type);
        } catch (const Error& e) {
            detail::bad(W, std::string("type: ") + e.what());
        }

        u32 fsum = 0;
        for (u32 part : rec.partition) fsum += part;
        if (type.empty() || rec.n < type[0] || rec.n - type[0] != fsum)
            detail::bad(W, "type and partition disagree about the coexponent");

        const ordered_json& br = detail::need(rj, "brackets", W);
        if (!br.is_array()) detail::bad(W, "brackets must be an array of rows");
        std::vector<Elem> table;
        std::size_t row = 0;
        for (const auto& rowj : br) {
            std::string WR = W + ": brackets row " + std::to_string(row);
            Elem e = detail::get_uint_array(rowj, WR);
            if (e.size() != A.rank()) detail::bad(WR, "wrong width");
            for (std::size_t c = 0; c < e.size(); ++c)
                if (e[c] >= A.mods[c])
                    detail::bad(WR + " entry " + std::to_string(c),
                                "residue " + std::to_string(e[c]) + " is not below the modulus " +
                                    std::to_string(A.mods[c]));
            table.push_back(std::move(e));
            ++row;
        }
        try {
            rec.ring = make_liering(A, std::move(table));
        } catch (const Error& e) {
            detail::bad(W, std::string("brackets: ") + e.what());
        }

        rec.fp = fingerprint(rec.ring);
        const ordered_json& fpj = detail::need(rj, "fingerprint", W);
        bool fp_ok = detail::get_uint(fpj, "cls", W) == rec.fp.cls &&
                     detail::get_uint(fpj, "derived_order", W) == rec.fp.derived_order &&
                     detail::get_uint(fpj, "center_order", W) == rec.fp.center_order;
        auto get_int = [&](const char* k) {
            const ordered_json& v = detail::need(fpj, k, W);
            if (!v.is_number_integer()) detail::bad(W, std::string(k) + " must be an integer");
            return v.get<int>();
        };
        fp_ok = fp_ok && get_int("depth_ambient") == rec.fp.derived_depth_ambient &&
                get_int("depth_center") == rec.fp.derived_depth_center;
        if (!fp_ok) detail::bad(W, "fingerprint does not match a recomputation");

        rec.base = detail::get_str(rj, "base", W);
        if (rec.base == "type3") {
            if (rec.partition != std::vector<u32>{3}) detail::bad(W, "base type3 needs partition 3");
        } else {
            BaseKind kind;
            if (rec.base == "V") kind = BaseKind::V;
            else if (rec.base == "W") kind = BaseKind::W;
            else if (rec.base == "X") kind = BaseKind::X;
            else detail::bad(W, "unknown base '" + rec.base + "'");
            if (rec.partition != std::vector<u32>{2, 1})
                detail::bad(W, "extension records need partition 2,1");
            MarkedRing B = base_ring_221(f.p, kind);
            rec.sigma = detail::get_uint_array(detail::need(rj, "sigma", W), W + ": sigma");
            rec.z = detail::get_uint_array(detail::need(rj, "z", W), W + ": z");
            rec.m = static_cast<u32>(detail::get_uint(rj, "m", W));
            if (rec.m != rec.n - 3) detail::bad(W, "m must equal n - 3");
            if (rec.z != B.z) detail::bad(W, "marked element differs from the convention");
            CoordShape ms = mat_shape(B.ring.A);
            if (rec.sigma.size() != ms.rank()) detail::bad(W, "sigma has the wrong shape");
            for (std::size_t c = 0; c < rec.sigma.size(); ++c)
                if (rec.sigma[c] >= ms.mods[c])
                    detail::bad(W + ": sigma entry " + std::to_string(c),
                                "residue exceeds its modulus");
            try {
                require_state(B.ring, rec.sigma);
                if (u_construction(B.ring, rec.sigma, rec.m).table != rec.ring.table)
                    detail::bad(W, "brackets do not match the declared construction");
            } catch (const Error& e) {
                if (e.code() == Errc::FormatError) throw;
                detail::bad(W, std::string("sigma: ") + e.what());
            }
        }
        ++seen[plabel];
        f.records.push_back(std::move(rec));
        ++idx;
    }

    for (std::size_t i = 1; i < f.records.size(); ++i) {
        if (record_canonical_less(f.records[i], f.records[i - 1]))
            detail::bad("record " + std::to_string(i), "records are not in canonical order");
        if (!record_canonical_less(f.records[i - 1], f.records[i]))
            detail::bad("record " + std::to_string(i), "duplicate record");
    }

    for (const auto& [label, cnt] : seen) {
        auto it = f.counts.find(label);
        if (it == f.counts.end() || it->second != cnt)
            detail::bad(H, "counts entry for partition " + label +
                               " does not match the records");
    }
    if (f.counts.count("1,1,1") && f.counts.at("1,1,1") != psi_head_111(f.p))
        detail::bad(H, "counts entry for partition 1,1,1 is wrong");
    if (f.counts.count("total")) {
        u64 sum = 0;
        for (const auto& [label, cnt] : f.counts)
            if (label != "total") sum += cnt;
        if (f.counts.at("total") != sum) detail::bad(H, "total does not match the parts");
    }
    return f;
}

inline bool records_equal(const CensusRecord& a, const CensusRecord& b) {
    return a.p == b.p && a.n == b.n && a.partition == b.partition && a.ring.A.p == b.ring.A.p &&
           a.ring.A.exps == b.ring.A.exps && a.ring.table == b.ring.table && a.fp == b.fp &&
           a.base == b.base && a.sigma == b.sigma && a.z == b.z && a.m == b.m;
}

inline bool export_import_roundtrip(const CensusFile& f) {
    std::string text = export_census(f);
    CensusFile g = import_census(text);
    if (export_census(g) != text) return false;
    if (g.p != f.p || g.n != f.n || g.partition != f.partition || g.nu != f.nu || g.h != f.h ||
        g.counts != f.counts || g.records.size() != f.records.size())
        return false;
    for (std::size_t i = 0; i < f.records.size(); ++i)
        if (!records_equal(f.records[i], g.records[i])) return false;
    return true;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::FormatError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::FormatError, "cannot open " + path + " for writing");
    out << text;
    if (!out) fail(Errc::FormatError, "failed writing " + path);
}

}  // namespace coex

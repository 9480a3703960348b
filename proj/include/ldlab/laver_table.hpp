#pragma once

#include <boost/crc.hpp>

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "outcome.hpp"
#include "term.hpp"

namespace ldlab {

using Index = std::uint32_t;

inline constexpr unsigned max_level = 24;
inline constexpr unsigned hard_max_level = 31;
inline constexpr std::uint64_t default_cell_cap = std::uint64_t(1) << 28;

// (2^k, *_k) with one period stored per row; row 0 is implicit.
class LaverTable {
public:
    LaverTable() = default;

    unsigned level() const { return k_; }
    Index order() const { return Index(1) << k_; }

    Index apply(Index m, Index n) const {
        check(m);
        check(n);
        return at(m, n);
    }
    // c with c * 1 = m * (n * 1)
    Index compose(Index m, Index n) const {
        check(m);
        check(n);
        Index mask = order() - 1;
        return (at(m, (n + 1) & mask) + mask) & mask;
    }
    Index period(Index m) const {
        check(m);
        return m == 0 ? order() : Index(1) << log_period_[m];
    }
    // m*1 ... m*p_m
    const Index* row(Index m) const {
        check(m);
        if (m == 0) throw RangeError("row 0 is implicit");
        return values_.data() + offset_[m];
    }
    std::uint64_t stored_cells() const { return values_.size(); }

    // unchecked lookup
    Index at(Index m, Index n) const {
        if (m == 0) return n;
        if (n == 0) return 0;
        return values_[offset_[m] + ((n - 1) & ((Index(1) << log_period_[m]) - 1))];
    }

    friend bool operator==(const LaverTable& a, const LaverTable& b) {
        if (a.k_ != b.k_) return false;
        for (Index m = 1; m < a.order(); ++m) {
            if (a.log_period_[m] != b.log_period_[m]) return false;
            if (!std::equal(a.row(m), a.row(m) + a.period(m), b.row(m))) return false;
        }
        return true;
    }

    // Build from explicit rows (m = 1 .. 2^k-1); used by the binary loader.
    static LaverTable from_rows(unsigned k, const std::vector<std::vector<Index>>& rows) {
        LaverTable t;
        t.k_ = k;
        Index n = Index(1) << k;
        if (rows.size() != n - 1) throw Error("row count mismatch");
        t.offset_.assign(n, 0);
        t.log_period_.assign(n, 0);
        for (Index m = 1; m < n; ++m) {
            const auto& r = rows[m - 1];
            if (r.empty() || (r.size() & (r.size() - 1)) != 0 || r.size() > n)
                throw Error("row period is not a power of two");
            t.offset_[m] = t.values_.size();
            t.log_period_[m] = static_cast<std::uint8_t>(__builtin_ctzll(r.size()));
            for (Index v : r) {
                if (v >= n) throw Error("cell value out of range");
                t.values_.push_back(v);
            }
        }
        return t;
    }

private:
    friend LaverTable build_table(unsigned k, bool force, std::uint64_t cell_cap);

    void check(Index m) const {
        if (m >= order())
            throw RangeError("index " + std::to_string(m) + " out of range for level " + std::to_string(k_));
    }

    unsigned k_ = 0;
    std::vector<std::uint64_t> offset_;
    std::vector<std::uint8_t> log_period_;
    std::vector<Index> values_;
};

inline LaverTable build_table(unsigned k, bool force = false, std::uint64_t cell_cap = default_cell_cap) {
    if (k < 1 || k > (force ? hard_max_level : max_level))
        throw RangeError("level " + std::to_string(k) + " outside 1.." +
                         std::to_string(force ? hard_max_level : max_level));
    LaverTable t;
    t.k_ = k;
    const Index n = Index(1) << k;
    const Index mask = n - 1;
    t.offset_.assign(n, 0);
    t.log_period_.assign(n, 0);
    for (Index m = mask; m >= 1; --m) {
        t.offset_[m] = t.values_.size();
        Index step = (m + 1) & mask;
        Index v = step;
        std::uint64_t len = 0;
        while (v != 0) {
            if (t.values_.size() >= cell_cap)
                throw ResourceError("table level " + std::to_string(k) + " exceeds the cell cap of " +
                                    std::to_string(cell_cap));
            t.values_.push_back(v);
            ++len;
            if (v <= m) throw Error("table recursion read an undefined cell");
            v = t.at(v, step);
        }
        t.values_.push_back(0);
        ++len;
        if (len & (len - 1)) throw Error("row period is not a power of two");
        t.log_period_[m] = static_cast<std::uint8_t>(__builtin_ctzll(len));
    }
    t.values_.shrink_to_fit();
    return t;
}

// ---------------------------------------------------------------- projections

inline Index project(Index i, unsigned from_k, unsigned to_k) {
    if (to_k > from_k) throw RangeError("projection must go to a lower level");
    if (from_k < 32 && i >= (Index(1) << from_k)) throw RangeError("index out of range for source level");
    return to_k >= 32 ? i : (i & ((Index(1) << to_k) - 1));
}

// ---------------------------------------------------------------- evaluation

using Assignment = std::unordered_map<std::uint32_t, Index>;

inline Index eval_term(const LaverTable& t, const Term& w, const Assignment& assign) {
    std::unordered_map<const void*, Index> memo;
    auto rec = [&](auto&& self, const Term& u) -> Index {
        if (u.is_leaf()) {
            auto it = assign.find(u.var_index());
            if (it == assign.end())
                throw PreconditionError("unassigned generator " + generator_name(u.var_index()));
            if (it->second >= t.order()) throw RangeError("assigned index out of range");
            return it->second;
        }
        auto m = memo.find(u.node_id());
        if (m != memo.end()) return m->second;
        Index a = self(self, u.left());
        Index b = self(self, u.right());
        Index r = u.is_apply() ? t.at(a, b) : t.compose(a, b);
        memo.emplace(u.node_id(), r);
        return r;
    };
    return rec(rec, w);
}

// x -> 1
inline Index residue(const LaverTable& t, const Term& w) {
    return eval_term(t, w, Assignment{{0, t.order() > 1 ? 1u : 0u}});
}

// ---------------------------------------------------------------- law checks

enum class Law { left_distributive, compose_associative, compose_apply, apply_compose, compose_swap };

inline const char* law_name(Law l) {
    switch (l) {
    case Law::left_distributive: return "a(bc) = (ab)(ac)";
    case Law::compose_associative: return "a o (b o c) = (a o b) o c";
    case Law::compose_apply: return "(a o b)c = a(bc)";
    case Law::apply_compose: return "a(b o c) = ab o ac";
    case Law::compose_swap: return "a o b = ab o a";
    }
    return "?";
}

struct Violation {
    Law law;
    Index a, b, c;
};

struct LawReport {
    unsigned level = 0;
    std::uint64_t triples = 0;
    std::vector<Violation> violations;
    std::uint64_t violation_count = 0;
    bool ok() const { return violation_count == 0; }
};

struct VerifyMode {
    bool exhaustive = true;
    std::uint64_t samples = 0;
    std::uint64_t seed = 1;
    static VerifyMode all() { return {true, 0, 1}; }
    static VerifyMode sample(std::uint64_t n, std::uint64_t seed) { return {false, n, seed}; }
};

inline constexpr unsigned exhaustive_law_cap = 6;

inline LawReport verify_laws(const LaverTable& t, VerifyMode mode = VerifyMode::all(),
                             bool allow_large = false) {
    LawReport rep;
    rep.level = t.level();
    const Index n = t.order();
    auto note = [&](Law l, Index a, Index b, Index c) {
        ++rep.violation_count;
        if (rep.violations.size() < 32) rep.violations.push_back({l, a, b, c});
    };
    auto triple = [&](Index a, Index b, Index c, bool pair_law) {
        ++rep.triples;
        if (t.at(a, t.at(b, c)) != t.at(t.at(a, b), t.at(a, c))) note(Law::left_distributive, a, b, c);
        if (t.compose(a, t.compose(b, c)) != t.compose(t.compose(a, b), c))
            note(Law::compose_associative, a, b, c);
        if (t.at(t.compose(a, b), c) != t.at(a, t.at(b, c))) note(Law::compose_apply, a, b, c);
        if (t.at(a, t.compose(b, c)) != t.compose(t.at(a, b), t.at(a, c))) note(Law::apply_compose, a, b, c);
        if (pair_law && t.compose(a, b) != t.compose(t.at(a, b), a)) note(Law::compose_swap, a, b, c);
    };
    if (mode.exhaustive) {
        if (t.level() > exhaustive_law_cap && !allow_large)
            throw RangeError("exhaustive law check is limited to level " + std::to_string(exhaustive_law_cap));
        for (Index a = 0; a < n; ++a)
            for (Index b = 0; b < n; ++b)
                for (Index c = 0; c < n; ++c) triple(a, b, c, c == 0);
    } else {
        std::mt19937_64 rng(mode.seed);
        std::uniform_int_distribution<Index> d(0, n - 1);
        for (std::uint64_t i = 0; i < mode.samples; ++i) {
            Index a = d(rng), b = d(rng), c = d(rng);
            triple(a, b, c, true);
        }
    }
    return rep;
}

// ---------------------------------------------------------------- binary format

struct CorruptFile : Error {
    using Error::Error;
};
struct VersionUnsupported : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

inline constexpr char table_magic[4] = {'L', 'D', 'T', '1'};
inline constexpr std::uint8_t table_version = 1;

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
inline std::uint32_t get_u32(const std::uint8_t* p) {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
           std::uint32_t(p[3]) << 24;
}
inline std::uint32_t crc32(const std::uint8_t* p, std::size_t n) {
    boost::crc_32_type crc;
    crc.process_bytes(p, n);
    return crc.checksum();
}

} // namespace detail

inline std::vector<std::uint8_t> encode_table(const LaverTable& t) {
    std::vector<std::uint8_t> out(table_magic, table_magic + 4);
    out.push_back(table_version);
    out.push_back(static_cast<std::uint8_t>(t.level()));
    for (Index m = 1; m < t.order(); ++m) {
        Index p = t.period(m);
        detail::put_u32(out, p);
        const Index* r = t.row(m);
        for (Index i = 0; i < p; ++i) detail::put_u32(out, r[i]);
    }
    detail::put_u32(out, detail::crc32(out.data() + 4, out.size() - 4));
    return out;
}

inline LaverTable decode_table(const std::vector<std::uint8_t>& in) {
    if (in.size() < 10) throw CorruptFile("file too short");
    if (std::memcmp(in.data(), table_magic, 4) != 0) throw CorruptFile("bad magic");
    std::size_t body = in.size() - 4;
    if (detail::crc32(in.data() + 4, body - 4) != detail::get_u32(in.data() + body))
        throw CorruptFile("checksum mismatch");
    if (in[4] != table_version) throw VersionUnsupported("format version " + std::to_string(in[4]));
    unsigned k = in[5];
    if (k < 1 || k > hard_max_level) throw CorruptFile("bad level");
    Index n = Index(1) << k;
    std::size_t pos = 6;
    std::vector<std::vector<Index>> rows;
    rows.reserve(n - 1);
    for (Index m = 1; m < n; ++m) {
        if (pos + 4 > body) throw CorruptFile("truncated");
        Index p = detail::get_u32(in.data() + pos);
        pos += 4;
        if (p == 0 || p > n || (std::uint64_t(p) * 4 > body - pos)) throw CorruptFile("bad period");
        std::vector<Index> r(p);
        for (Index i = 0; i < p; ++i, pos += 4) r[i] = detail::get_u32(in.data() + pos);
        rows.push_back(std::move(r));
    }
    if (pos != body) throw CorruptFile("trailing bytes");
    try {
        return LaverTable::from_rows(k, rows);
    } catch (const CorruptFile&) {
        throw;
    } catch (const Error& e) {
        throw CorruptFile(e.what());
    }
}

inline void save_table(const LaverTable& t, const std::string& path) {
    auto bytes = encode_table(t);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("write failed for " + path);
}

inline LaverTable load_table(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (f.bad()) throw IoError("read failed for " + path);
    return decode_table(bytes);
}

inline void write_csv(const LaverTable& t, std::ostream& os) {
    os << "m,n,value\n";
    for (Index m = 0; m < t.order(); ++m)
        for (Index n = 0; n < t.order(); ++n) os << m << ',' << n << ',' << t.at(m, n) << '\n';
}

} // namespace ldlab

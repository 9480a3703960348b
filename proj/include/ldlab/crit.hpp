#pragma once

#include <cstdint>
#include <string>

#include "outcome.hpp"
#include "table_cache.hpp"
#include "term.hpp"

namespace ldlab {

inline constexpr unsigned default_crit_level = 16;

struct CritIndex {
    unsigned gamma_index = 0;
    unsigned witness_level = 0;
    Index residue = 0;
};

enum class Relation { less, equal, greater };

inline const char* relation_name(Relation r) {
    return r == Relation::less ? "less" : r == Relation::equal ? "equal" : "greater";
}
inline Relation flip(Relation r) {
    return r == Relation::less ? Relation::greater : r == Relation::greater ? Relation::less : r;
}

inline unsigned nu2(std::uint64_t i) { return i == 0 ? 64 : static_cast<unsigned>(__builtin_ctzll(i)); }

inline Outcome<CritIndex> crit_index(const Term& w, unsigned max_k = default_crit_level) {
    if (!w.single_generator()) throw PreconditionError("crit_index needs a single-generator term");
    for (unsigned k = 1; k <= max_k; ++k) {
        Index r = residue(*shared_table(k), w);
        if (r != 0) return CritIndex{nu2(r), k, r};
    }
    return Exhausted{"all residues zero up to level " + std::to_string(max_k), max_k};
}

inline Outcome<Relation> compare_crit(const Term& u, const Term& w, unsigned max_k = default_crit_level) {
    auto a = crit_index(u, max_k);
    if (!a) return a.exhausted();
    auto b = crit_index(w, max_k);
    if (!b) return b.exhausted();
    if (a->gamma_index < b->gamma_index) return Relation::less;
    if (a->gamma_index > b->gamma_index) return Relation::greater;
    return Relation::equal;
}

inline Outcome<unsigned> kappa_index(unsigned n, unsigned max_k = default_crit_level) {
    auto c = crit_index(right_power(n), max_k);
    if (!c) return c.exhausted();
    return c->gamma_index;
}

inline Outcome<unsigned> f_count(unsigned n, unsigned max_k = default_crit_level) {
    auto a = kappa_index(n, max_k);
    if (!a) return a.exhausted();
    auto b = kappa_index(n + 1, max_k);
    if (!b) return b.exhausted();
    return *b - *a - 1;
}

// least k with 1 *_k (i mod 2^k) != 0
inline Outcome<unsigned> min_k_nonzero(std::uint64_t i, unsigned max_k = default_crit_level) {
    if (i == 0) throw PreconditionError("min_k_nonzero needs i >= 1");
    for (unsigned k = 1; k <= max_k; ++k) {
        auto t = shared_table(k);
        Index j = static_cast<Index>(i & (std::uint64_t(t->order()) - 1));
        if (t->at(1, j) != 0) return k;
    }
    return Exhausted{"1 * i is zero at every level up to " + std::to_string(max_k), max_k};
}

} // namespace ldlab

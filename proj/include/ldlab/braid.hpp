#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "order.hpp"
#include "outcome.hpp"
#include "term.hpp"

namespace ldlab {

struct Letter {
    unsigned index = 1;  // i >= 1
    int sign = 1;        // +1 or -1
    friend bool operator==(const Letter&, const Letter&) = default;
    friend auto operator<=>(const Letter&, const Letter&) = default;
};

struct BraidWord {
    std::vector<Letter> letters;
    bool empty() const { return letters.empty(); }
    std::size_t length() const { return letters.size(); }
    friend bool operator==(const BraidWord&, const BraidWord&) = default;
    friend auto operator<=>(const BraidWord&, const BraidWord&) = default;
};

inline BraidWord sigma(unsigned i, int sign = 1) {
    if (i < 1) throw PreconditionError("braid generators start at 1");
    return BraidWord{{Letter{i, sign}}};
}

inline BraidWord free_reduce(const BraidWord& w) {
    std::vector<Letter> st;
    for (const auto& l : w.letters) {
        if (!st.empty() && st.back().index == l.index && st.back().sign == -l.sign) st.pop_back();
        else st.push_back(l);
    }
    return {st};
}

inline BraidWord shift(const BraidWord& w) {
    BraidWord out = w;
    for (auto& l : out.letters) ++l.index;
    return out;
}

inline BraidWord inverse(const BraidWord& w) {
    BraidWord out;
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) out.letters.push_back({it->index, -it->sign});
    return out;
}

inline BraidWord concat(const BraidWord& a, const BraidWord& b) {
    BraidWord out = a;
    out.letters.insert(out.letters.end(), b.letters.begin(), b.letters.end());
    return out;
}

// a s(b) s1 s(a)^-1
inline BraidWord bracket(const BraidWord& a, const BraidWord& b) {
    return free_reduce(concat(concat(concat(a, shift(b)), sigma(1)), inverse(shift(a))));
}

inline BraidWord alpha_of(const Term& b) {
    if (!b.single_generator()) throw PreconditionError("alpha encoding needs a single-generator term");
    if (!b.compose_free()) throw PreconditionError("alpha encoding is defined on compose-free terms");
    std::unordered_map<const void*, BraidWord> memo;
    auto rec = [&](auto&& self, const Term& t) -> BraidWord {
        if (t.is_leaf()) return {};
        auto it = memo.find(t.node_id());
        if (it != memo.end()) return it->second;
        BraidWord w = bracket(self(self, t.left()), self(self, t.right()));
        memo.emplace(t.node_id(), w);
        return w;
    };
    return rec(rec, b);
}

// "s2 S1"; "e" or empty for the trivial word
inline BraidWord parse_braid(std::string_view text) {
    BraidWord w;
    std::size_t p = 0;
    while (p < text.size()) {
        char c = text[p];
        if (c == ' ' || c == '\t' || c == ',') { ++p; continue; }
        if (c == 'e' && (p + 1 == text.size() || text[p + 1] == ' ')) { ++p; continue; }
        if (c != 's' && c != 'S') throw SyntaxError("expected s<i> or S<i>", p);
        std::size_t q = ++p;
        unsigned v = 0;
        while (p < text.size() && text[p] >= '0' && text[p] <= '9') {
            v = v * 10 + unsigned(text[p] - '0');
            if (v > 1'000'000) throw SyntaxError("generator index too large", q);
            ++p;
        }
        if (p == q || v == 0) throw SyntaxError("expected a positive generator index", q);
        w.letters.push_back({v, c == 's' ? 1 : -1});
    }
    return w;
}

inline std::string render_braid(const BraidWord& w) {
    if (w.empty()) return "e";
    std::string out;
    for (const auto& l : w.letters) {
        if (!out.empty()) out += ' ';
        out += (l.sign > 0 ? 's' : 'S') + std::to_string(l.index);
    }
    return out;
}

// ---------------------------------------------------------------- action on sequences

struct TermSequence {
    std::vector<Term> entries;  // continued by x

    Term at(std::size_t i) const { return i < entries.size() ? entries[i] : x_term; }
    void set(std::size_t i, const Term& t) {
        while (entries.size() <= i) entries.push_back(x_term);
        entries[i] = t;
    }
    // drop trailing x entries
    void trim() {
        while (!entries.empty() && entries.back().is_leaf() && entries.back().var_index() == 0) entries.pop_back();
    }
};

enum class ActStatus { defined, undefined, exhausted };

inline const char* act_status_name(ActStatus s) {
    return s == ActStatus::defined ? "defined" : s == ActStatus::undefined ? "undefined" : "exhausted";
}

struct ActResult {
    ActStatus status = ActStatus::defined;
    TermSequence sequence;
    std::size_t failed_letter = 0;  // position of the letter that was not applicable
};

// c with b c == a, if any
inline Outcome<std::optional<Term>> left_divide(OrderEngine& eng, const Term& b, const Term& a) {
    auto r = eng.relation(b, a);
    if (!r) return r.exhausted();
    if (*r != Relation::less) return std::optional<Term>{};
    auto s = eng.prenormal(b, a);
    if (!s) return s.exhausted();
    if (s->tail.size() == 1 && s->last_op == Kind::apply) return std::optional<Term>{s->tail[0]};
    return std::optional<Term>{};
}

inline ActResult act(const BraidWord& w, const TermSequence& v, OrderEngine& eng) {
    ActResult out;
    out.sequence = v;
    for (std::size_t pos = 0; pos < w.letters.size(); ++pos) {
        const Letter& l = w.letters[pos];
        std::size_t i = l.index - 1;
        Term a = out.sequence.at(i), b = out.sequence.at(i + 1);
        if (l.sign > 0) {
            out.sequence.set(i, Term::apply(a, b));
            out.sequence.set(i + 1, a);
            continue;
        }
        auto c = left_divide(eng, b, a);
        if (!c) {
            out.status = ActStatus::exhausted;
            out.failed_letter = pos;
            return out;
        }
        if (!c.value()) {
            out.status = ActStatus::undefined;
            out.failed_letter = pos;
            return out;
        }
        out.sequence.set(i, b);
        out.sequence.set(i + 1, *c.value());
    }
    out.sequence.trim();
    return out;
}

inline ActResult act(const BraidWord& w, const TermSequence& v, Fuel fuel = {}) {
    OrderEngine eng(fuel);
    return act(w, v, eng);
}

struct ClosureItem {
    BraidWord word;
    Term shape;
};

// All bracket combinations of `a` over term shapes with at most `depth` leaves; one item per word.
inline std::vector<ClosureItem> closure_sample(const BraidWord& a, unsigned depth,
                                               std::uint64_t cap = 200'000) {
    std::vector<std::vector<ClosureItem>> by(depth + 1);
    std::vector<ClosureItem> out;
    if (depth == 0) return out;
    by[1] = {{free_reduce(a), x_term}};
    std::uint64_t made = 1;
    for (unsigned s = 2; s <= depth; ++s)
        for (unsigned i = 1; i < s; ++i)
            for (const auto& l : by[i])
                for (const auto& r : by[s - i]) {
                    if (++made > cap) throw ResourceError("closure sample exceeds cap");
                    by[s].push_back({bracket(l.word, r.word), Term::apply(l.shape, r.shape)});
                }
    std::map<BraidWord, Term> uniq;
    for (unsigned s = 1; s <= depth; ++s)
        for (const auto& it : by[s]) uniq.emplace(it.word, it.shape);
    for (const auto& [w, t] : uniq) out.push_back({w, t});
    return out;
}

} // namespace ldlab

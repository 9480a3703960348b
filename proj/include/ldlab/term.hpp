#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "outcome.hpp"

namespace ldlab {

enum class Kind : std::uint8_t { leaf, apply, compose };

inline constexpr std::uint64_t default_size_cap = 1'000'000;

class Term {
    struct Node;

public:
    Term() : Term(var(0)) {}

    static Term var(std::uint32_t index = 0) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::leaf;
        n->index = index;
        n->size = 1;
        n->hash = std::hash<std::uint64_t>{}(0x9e3779b97f4a7c15ull ^ index);
        n->compose_free = true;
        n->max_var = index;
        return Term(std::move(n));
    }
    static Term apply(const Term& a, const Term& b) { return make(Kind::apply, a, b); }
    static Term compose(const Term& a, const Term& b) { return make(Kind::compose, a, b); }

    Kind kind() const { return n_->kind; }
    bool is_leaf() const { return n_->kind == Kind::leaf; }
    bool is_apply() const { return n_->kind == Kind::apply; }
    bool is_compose() const { return n_->kind == Kind::compose; }
    std::uint32_t var_index() const { return n_->index; }
    const Term& left() const { return child(0); }
    const Term& right() const { return child(1); }
    // leaf count, saturating
    std::uint64_t size() const { return n_->size; }
    std::size_t hash() const { return n_->hash; }
    bool compose_free() const { return n_->compose_free; }
    std::uint32_t max_var() const { return n_->max_var; }
    bool single_generator() const { return n_->max_var == 0; }
    const void* node_id() const { return n_.get(); }

    friend bool operator==(const Term& a, const Term& b) {
        if (a.n_ == b.n_) return true;
        if (a.n_->hash != b.n_->hash || a.n_->kind != b.n_->kind || a.n_->size != b.n_->size)
            return false;
        if (a.is_leaf()) return a.n_->index == b.n_->index;
        return a.left() == b.left() && a.right() == b.right();
    }
    friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
    friend Term operator*(const Term& a, const Term& b) { return apply(a, b); }

private:
    struct Node {
        Kind kind = Kind::leaf;
        std::uint32_t index = 0;
        std::uint32_t max_var = 0;
        bool compose_free = true;
        std::uint64_t size = 1;
        std::size_t hash = 0;
        std::vector<Term> kids;
    };

    explicit Term(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

    static Term make(Kind k, const Term& a, const Term& b) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        std::uint64_t s = a.size() + b.size();
        n->size = s < a.size() ? std::numeric_limits<std::uint64_t>::max() : s;
        std::size_t h = a.hash() * 0x100000001b3ull + (k == Kind::apply ? 0x51ed27 : 0xc0ffee);
        n->hash = (h ^ (b.hash() + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2)));
        n->compose_free = k == Kind::apply && a.compose_free() && b.compose_free();
        n->max_var = std::max(a.max_var(), b.max_var());
        n->kids = {a, b};
        return Term(std::move(n));
    }

    const Term& child(int i) const {
        if (is_leaf()) throw PreconditionError("leaf has no children");
        return n_->kids[i];
    }

    std::shared_ptr<const Node> n_;
};

struct TermHash {
    std::size_t operator()(const Term& t) const { return t.hash(); }
};

inline const Term x_term = Term::var(0);

// ---------------------------------------------------------------- text syntax

enum class Style { compact, full_parens };

inline std::string generator_name(std::uint32_t i) {
    if (i < 3) return std::string(1, "xyz"[i]);
    return "x" + std::to_string(i);
}

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    Term run() {
        Term t = composition();
        skip();
        if (p_ != s_.size()) fail("unexpected character");
        return t;
    }

private:
    std::string_view s_;
    std::size_t p_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, p_); }

    void skip() {
        while (p_ < s_.size() && (s_[p_] == ' ' || s_[p_] == '\t' || s_[p_] == '\n' || s_[p_] == '\r'))
            ++p_;
    }
    bool compose_sign() {
        skip();
        if (p_ < s_.size() && s_[p_] == 'o') { ++p_; return true; }
        if (s_.substr(p_, 3) == "\xE2\x88\x98") { p_ += 3; return true; }
        return false;
    }
    bool atom_start() {
        skip();
        return p_ < s_.size() && (s_[p_] == 'x' || s_[p_] == 'y' || s_[p_] == 'z' || s_[p_] == '(');
    }

    Term composition() {
        Term a = application();
        if (compose_sign()) return Term::compose(a, composition());
        return a;
    }
    Term application() {
        Term a = atom();
        for (;;) {
            skip();
            if (p_ < s_.size() && s_[p_] == '*') {
                ++p_;
                a = Term::apply(a, atom());
            } else if (atom_start()) {
                a = Term::apply(a, atom());
            } else {
                return a;
            }
        }
    }
    Term atom() {
        skip();
        if (p_ >= s_.size()) fail("unexpected end of input");
        char c = s_[p_];
        if (c == '(') {
            ++p_;
            Term t = composition();
            skip();
            if (p_ >= s_.size() || s_[p_] != ')') fail("expected ')'");
            ++p_;
            return t;
        }
        if (c == 'y' || c == 'z') { ++p_; return Term::var(c == 'y' ? 1 : 2); }
        if (c == 'x') {
            ++p_;
            std::size_t q = p_;
            std::uint64_t v = 0;
            while (p_ < s_.size() && s_[p_] >= '0' && s_[p_] <= '9') {
                v = v * 10 + static_cast<std::uint64_t>(s_[p_] - '0');
                if (v > 1'000'000) fail("generator index too large");
                ++p_;
            }
            return Term::var(p_ == q ? 0 : static_cast<std::uint32_t>(v));
        }
        fail("expected generator or '('");
    }
};

} // namespace detail

inline Term parse_term(std::string_view text) { return detail::Parser(text).run(); }

inline std::string render_term(const Term& w, Style style = Style::compact) {
    static const std::string circ = "\xE2\x88\x98";
    if (w.is_leaf()) return generator_name(w.var_index());
    if (style == Style::full_parens) {
        const char* op = w.is_apply() ? "*" : circ.c_str();
        return "(" + render_term(w.left(), style) + op + render_term(w.right(), style) + ")";
    }
    std::string l = render_term(w.left(), style);
    if (w.left().is_compose()) l = "(" + l + ")";
    if (w.is_compose()) return l + circ + render_term(w.right(), style);
    if (w.right().is_leaf()) return l + render_term(w.right(), style);
    return l + "(" + render_term(w.right(), style) + ")";
}

// ---------------------------------------------------------------- builders

inline void check_size(std::uint64_t size, std::uint64_t cap) {
    if (size > cap)
        throw ResourceError("term size " + std::to_string(size) + " exceeds cap " + std::to_string(cap));
}

inline Term iterate(const Term& w, unsigned n, std::uint64_t cap = default_size_cap) {
    Term t = w;
    check_size(t.size(), cap);
    for (unsigned i = 0; i < n; ++i) {
        check_size(2 * t.size(), cap);
        t = Term::apply(t, t);
    }
    return t;
}

// I_0 = k, I_1 = j, I_{n+2} = I_{n+1} I_n with j = generator 0 and k = generator 1.
inline Term iterate_pair(unsigned n, std::uint64_t cap = default_size_cap) {
    Term prev = Term::var(1), cur = Term::var(0);
    if (n == 0) return prev;
    for (unsigned i = 1; i < n; ++i) {
        check_size(cur.size() + prev.size(), cap);
        Term next = Term::apply(cur, prev);
        prev = cur;
        cur = next;
    }
    return cur;
}

// x_(1) = x, x_(m+1) = x_(m) x
inline Term left_power(unsigned m, const Term& x = x_term) {
    if (m == 0) throw PreconditionError("left power needs m >= 1");
    Term t = x;
    for (unsigned i = 1; i < m; ++i) t = Term::apply(t, x);
    return t;
}

// T_0 = x, T_{m+1} = x T_m
inline Term right_power(unsigned m, const Term& x = x_term) {
    Term t = x;
    for (unsigned i = 0; i < m; ++i) t = Term::apply(x, t);
    return t;
}

// ---------------------------------------------------------------- composition factors

struct SigmaDecomposition {
    std::vector<Term> factors;
    std::size_t length() const { return factors.size(); }
};

inline Term compose_all(const std::vector<Term>& factors) {
    if (factors.empty()) throw PreconditionError("empty factor list");
    Term t = factors.back();
    for (std::size_t i = factors.size() - 1; i-- > 0;) t = Term::compose(factors[i], t);
    return t;
}

namespace detail {

inline const std::vector<Term>& sigma_factors(
    const Term& w, std::uint64_t cap,
    std::unordered_map<const void*, std::vector<Term>>& memo) {
    auto it = memo.find(w.node_id());
    if (it != memo.end()) return it->second;
    std::vector<Term> out;
    if (w.compose_free()) {
        out = {w};
    } else if (w.is_compose()) {
        out = sigma_factors(w.left(), cap, memo);
        const auto& r = sigma_factors(w.right(), cap, memo);
        out.insert(out.end(), r.begin(), r.end());
    } else {
        // (a o b)c = a(bc) and a(b o c) = ab o ac
        std::vector<Term> a = sigma_factors(w.left(), cap, memo);
        out = sigma_factors(w.right(), cap, memo);
        for (std::size_t i = a.size(); i-- > 0;)
            for (auto& b : out) {
                check_size(a[i].size() + b.size(), cap);
                b = Term::apply(a[i], b);
            }
    }
    std::uint64_t total = 0;
    for (const auto& f : out) total += f.size();
    check_size(total, cap);
    return memo.emplace(w.node_id(), std::move(out)).first->second;
}

} // namespace detail

inline SigmaDecomposition sigma_decompose(const Term& w, std::uint64_t cap = default_size_cap) {
    std::unordered_map<const void*, std::vector<Term>> memo;
    return {detail::sigma_factors(w, cap, memo)};
}

// Terms with exactly n leaves over generator x.
inline std::vector<Term> all_a_terms(unsigned n, const Term& x = x_term) {
    std::vector<std::vector<Term>> by(n + 1);
    if (n == 0) return {};
    by[1] = {x};
    for (unsigned s = 2; s <= n; ++s)
        for (unsigned i = 1; i < s; ++i)
            for (const auto& a : by[i])
                for (const auto& b : by[s - i]) by[s].push_back(Term::apply(a, b));
    return by[n];
}

inline std::vector<Term> all_p_terms(unsigned n, const Term& x = x_term) {
    std::vector<std::vector<Term>> by(n + 1);
    if (n == 0) return {};
    by[1] = {x};
    for (unsigned s = 2; s <= n; ++s)
        for (Kind k : {Kind::apply, Kind::compose})
            for (unsigned i = 1; i < s; ++i)
                for (const auto& a : by[i])
                    for (const auto& b : by[s - i])
                        by[s].push_back(k == Kind::apply ? Term::apply(a, b) : Term::compose(a, b));
    return by[n];
}

inline std::vector<Term> a_terms_up_to(unsigned n) {
    std::vector<Term> out;
    for (unsigned s = 1; s <= n; ++s) {
        auto v = all_a_terms(s);
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

} // namespace ldlab

template <>
struct std::hash<ldlab::Term> {
    std::size_t operator()(const ldlab::Term& t) const { return t.hash(); }
};

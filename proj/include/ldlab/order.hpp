#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "crit.hpp"
#include "outcome.hpp"
#include "table_cache.hpp"
#include "term.hpp"

namespace ldlab {

// ---------------------------------------------------------------- expansion steps

// Node path from the root: 'l' = left child, 'r' = right child.
using Path = std::string;

inline const Term& subterm(const Term& w, const Path& p) {
    const Term* t = &w;
    for (char c : p) {
        if (t->is_leaf()) throw InvalidPosition("path leaves the term");
        if (c == 'l') t = &t->left();
        else if (c == 'r') t = &t->right();
        else throw InvalidPosition("bad path character");
    }
    return *t;
}

namespace detail {

inline Term replace_at(const Term& w, const Path& p, std::size_t i, const Term& with) {
    if (i == p.size()) return with;
    if (w.is_leaf()) throw InvalidPosition("path leaves the term");
    const Term& l = w.left();
    const Term& r = w.right();
    if (p[i] == 'l') {
        Term nl = replace_at(l, p, i + 1, with);
        return w.is_apply() ? Term::apply(nl, r) : Term::compose(nl, r);
    }
    if (p[i] == 'r') {
        Term nr = replace_at(r, p, i + 1, with);
        return w.is_apply() ? Term::apply(l, nr) : Term::compose(l, nr);
    }
    throw InvalidPosition("bad path character");
}

} // namespace detail

// a(bc) -> (ab)(ac) at the node addressed by `position`
inline Term expand_once(const Term& w, const Path& position) {
    const Term& n = subterm(w, position);
    if (!n.is_apply() || !n.right().is_apply())
        throw InvalidPosition("no a(bc) redex at path '" + position + "'");
    const Term& a = n.left();
    const Term& b = n.right().left();
    const Term& c = n.right().right();
    return detail::replace_at(w, position, 0, Term::apply(Term::apply(a, b), Term::apply(a, c)));
}

inline std::vector<Path> redexes(const Term& w) {
    std::vector<Path> out;
    Path p;
    auto rec = [&](auto&& self, const Term& t) -> void {
        if (t.is_leaf()) return;
        if (t.is_apply() && t.right().is_apply()) out.push_back(p);
        p.push_back('l');
        self(self, t.left());
        p.back() = 'r';
        self(self, t.right());
        p.pop_back();
    };
    rec(rec, w);
    return out;
}

// ---------------------------------------------------------------- verdict types

struct Fuel {
    std::uint64_t steps = 100'000;
    unsigned max_k = 20;
    std::uint64_t certificate_nodes = 20'000;
};

struct ExpansionCertificate {
    Term common;
    std::vector<Path> from_u;
    std::vector<Path> from_v;
};

// head items[0] ... items[n-1] (o tail)
struct Representation {
    Term head;
    std::vector<Term> items;
    std::optional<Term> tail;

    Term product() const {
        Term t = head;
        for (const auto& s : items) t = Term::apply(t, s);
        if (tail) t = Term::compose(t, *tail);
        return t;
    }
};

struct OrderVerdict {
    Relation relation = Relation::equal;
    // less: the second input written over the first; greater: the first written over the second
    std::optional<Representation> representation;
    std::optional<ExpansionCertificate> expansion;
};

enum class EquivKind { equivalent, inequivalent, exhausted };

inline const char* equiv_name(EquivKind k) {
    return k == EquivKind::equivalent ? "equivalent" : k == EquivKind::inequivalent ? "inequivalent" : "exhausted";
}

struct EquivVerdict {
    EquivKind kind = EquivKind::exhausted;
    std::string method;
    std::optional<ExpansionCertificate> expansion;
    unsigned witness_level = 0;
    Index residue_u = 0, residue_v = 0;
    std::optional<Relation> order;
    std::uint64_t spent = 0;
};

struct PrenormalSequence {
    Term head;
    std::vector<Term> tail;
    Kind last_op = Kind::apply;

    std::vector<Term> entries() const {
        std::vector<Term> e{head};
        e.insert(e.end(), tail.begin(), tail.end());
        return e;
    }
    Term product() const {
        Term t = head;
        for (std::size_t i = 0; i < tail.size(); ++i)
            t = (i + 1 == tail.size() && last_op == Kind::compose) ? Term::compose(t, tail[i])
                                                                   : Term::apply(t, tail[i]);
        return t;
    }
};

struct DivisionTree {
    struct Node {
        Term label;
        std::vector<std::size_t> children;
        Kind last_op = Kind::apply;
        bool leaf = true;
    };
    std::vector<Node> nodes;
    const Node& root() const { return nodes.front(); }
    std::size_t depth(std::size_t i = 0) const {
        std::size_t d = 0;
        for (auto c : nodes[i].children) d = std::max(d, depth(c));
        return d + 1;
    }
};

// ---------------------------------------------------------------- engine

// Reusable decision context with interned terms and memoized comparisons.
// Not thread-safe; use one engine per thread.
class OrderEngine {
public:
    explicit OrderEngine(Fuel fuel = {}) : fuel_(fuel) {
        nodes_.push_back({Kind::leaf, -1, -1});
    }

    const Fuel& fuel() const { return fuel_; }
    void set_fuel(Fuel f) { fuel_ = f; }

    Outcome<OrderVerdict> compare(const Term& u, const Term& v) {
        require_single(u);
        require_single(v);
        return guarded<OrderVerdict>([&] {
            int a = intern(u), b = intern(v);
            const Cmp& r = cmp(a, b);
            OrderVerdict out;
            out.relation = r.rel < 0 ? Relation::less : r.rel > 0 ? Relation::greater : Relation::equal;
            if (r.rel != 0 && r.rep) {
                Representation rep;
                rep.head = r.rel < 0 ? u : v;
                for (int s : r.items) rep.items.push_back(term(s));
                if (r.tail >= 0) rep.tail = term(r.tail);
                out.representation = std::move(rep);
            }
            if (r.rel == 0 && u.compose_free() && v.compose_free() && fuel_.certificate_nodes > 0)
                out.expansion = common_expansion_ids(a, b, fuel_.certificate_nodes);
            return out;
        });
    }

    // less/equal/greater without certificates
    Outcome<Relation> relation(const Term& u, const Term& v) {
        require_single(u);
        require_single(v);
        return guarded<Relation>([&] {
            int r = rel(intern(u), intern(v));
            return r < 0 ? Relation::less : r > 0 ? Relation::greater : Relation::equal;
        });
    }

    EquivVerdict decide_equiv(const Term& u, const Term& v) {
        require_single(u);
        require_single(v);
        EquivVerdict out;
        unsigned first_levels = std::min(fuel_.max_k, 10u);
        if (table_witness(u, v, 1, first_levels, out)) return out;
        auto r = guarded<int>([&] { return rel(intern(u), intern(v)); });
        out.spent = steps_;
        if (r && *r == 0) {
            out.kind = EquivKind::equivalent;
            out.method = "division";
            if (u.compose_free() && v.compose_free() && fuel_.certificate_nodes > 0) {
                out.expansion = common_expansion_ids(intern(u), intern(v), fuel_.certificate_nodes);
                if (out.expansion) out.method = "expansion";
            }
            return out;
        }
        if (r) {
            out.order = *r < 0 ? Relation::less : Relation::greater;
            if (table_witness(u, v, first_levels + 1, fuel_.max_k, out)) return out;
            out.kind = EquivKind::inequivalent;
            out.method = "order";
            return out;
        }
        if (u.compose_free() && v.compose_free()) {
            out.expansion = common_expansion_ids(intern(u), intern(v), fuel_.steps);
            if (out.expansion) {
                out.kind = EquivKind::equivalent;
                out.method = "expansion";
                return out;
            }
        }
        if (table_witness(u, v, first_levels + 1, fuel_.max_k, out)) return out;
        out.kind = EquivKind::exhausted;
        out.method = "fuel";
        return out;
    }

    bool equivalent(const Term& u, const Term& v) {
        auto r = relation(u, v);
        return r && *r == Relation::equal;
    }

    // Breadth-first search of both expansion sets for a common term.
    std::optional<ExpansionCertificate> common_expansion(const Term& u, const Term& v, std::uint64_t nodes) {
        require_single(u);
        require_single(v);
        if (!u.compose_free() || !v.compose_free()) throw PreconditionError("expansion search needs A-terms");
        return common_expansion_ids(intern(u), intern(v), nodes);
    }

    Outcome<PrenormalSequence> prenormal(const Term& u, const Term& v) {
        require_single(u);
        require_single(v);
        return guarded<PrenormalSequence>([&] {
            const Seq& s = prenormal_ids(intern(u), intern(v), 0);
            PrenormalSequence out;
            out.head = u;
            for (std::size_t i = 1; i < s.items.size(); ++i) out.tail.push_back(term(s.items[i]));
            out.last_op = s.comp ? Kind::compose : Kind::apply;
            return out;
        });
    }

    Outcome<DivisionTree> division_tree(const Term& u, const Term& v) {
        require_single(u);
        require_single(v);
        return guarded<DivisionTree>([&] {
            DivisionTree t;
            int uid = intern(u);
            build_tree(t, uid, intern(v), 0);
            return t;
        });
    }

    Outcome<Relation> lex_compare_xdivision(const Term& u, const Term& v) {
        require_single(u);
        require_single(v);
        return guarded<Relation>([&] {
            int r = lexcmp(form(intern(u), 0), form(intern(v), 0));
            return r < 0 ? Relation::less : r > 0 ? Relation::greater : Relation::equal;
        });
    }

    std::uint64_t last_steps() const { return steps_; }
    std::size_t interned() const { return nodes_.size(); }

private:
    struct Rec {
        Kind kind;
        int a, b;
    };
    struct Cmp {
        int rel = 0;
        bool rep = false;
        std::vector<int> items;
        int tail = -1;
    };
    struct Seq {
        std::vector<int> items;
        bool comp = false;
    };
    struct FuelOut {};
    struct Unsupported {
        std::string what;
    };

    static constexpr int X = 0;

    Fuel fuel_;
    std::uint64_t steps_ = 0;
    std::vector<Rec> nodes_;
    std::unordered_map<std::uint64_t, int> intern_;
    std::unordered_map<const void*, std::pair<Term, int>> from_term_;
    std::vector<std::optional<Term>> to_term_;
    std::unordered_map<int, std::vector<int>> sdec_;
    std::unordered_map<std::uint64_t, Cmp> cmp_memo_;
    std::unordered_map<std::uint64_t, Seq> pren_memo_;
    std::unordered_map<int, int> form_of_;
    struct Form {
        std::vector<int> entries;
        bool comp = false;
    };
    std::vector<Form> forms_;

    static void require_single(const Term& t) {
        if (!t.single_generator()) throw PreconditionError("order operations need single-generator terms");
    }

    template <class T, class F>
    Outcome<T> guarded(F&& f) {
        steps_ = 0;
        try {
            return T(f());
        } catch (const FuelOut&) {
            return Exhausted{"step limit reached", steps_};
        } catch (const Unsupported& e) {
            return Exhausted{e.what, steps_};
        }
    }

    void tick() {
        if (++steps_ > fuel_.steps) throw FuelOut{};
    }

    static std::uint64_t key(int a, int b) { return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b); }

    int mk(Kind k, int a, int b) {
        std::uint64_t kk = (std::uint64_t(k) << 62) | (std::uint64_t(std::uint32_t(a)) << 31) | std::uint32_t(b);
        auto it = intern_.find(kk);
        if (it != intern_.end()) return it->second;
        if (nodes_.size() >= (std::size_t(1) << 30)) throw Unsupported{"term arena full"};
        nodes_.push_back({k, a, b});
        int id = static_cast<int>(nodes_.size() - 1);
        intern_.emplace(kk, id);
        return id;
    }
    int ap(int a, int b) { return mk(Kind::apply, a, b); }
    int co(int a, int b) { return mk(Kind::compose, a, b); }

    int intern(const Term& t) {
        if (t.is_leaf()) return X;
        auto it = from_term_.find(t.node_id());
        if (it != from_term_.end()) return it->second.second;
        int id = mk(t.kind(), intern(t.left()), intern(t.right()));
        from_term_.emplace(t.node_id(), std::make_pair(t, id));
        return id;
    }

    Term term(int id) {
        if (to_term_.size() < nodes_.size()) to_term_.resize(nodes_.size());
        if (to_term_[id]) return *to_term_[id];
        Term t = id == X ? x_term
                         : (nodes_[id].kind == Kind::apply ? Term::apply(term(nodes_[id].a), term(nodes_[id].b))
                                                           : Term::compose(term(nodes_[id].a), term(nodes_[id].b)));
        if (to_term_.size() < nodes_.size()) to_term_.resize(nodes_.size());
        to_term_[id] = t;
        return t;
    }

    bool compose_free(int t) {
        while (t != X) {
            if (nodes_[t].kind == Kind::compose) return false;
            if (!compose_free(nodes_[t].b)) return false;
            t = nodes_[t].a;
        }
        return true;
    }

    // ------------------------------------------------------------ composition factors

    const std::vector<int>& sdec(int t) {
        auto it = sdec_.find(t);
        if (it != sdec_.end()) return it->second;
        std::vector<int> out;
        if (t == X) {
            out = {X};
        } else if (nodes_[t].kind == Kind::compose) {
            out = sdec(nodes_[t].a);
            const auto& r = sdec(nodes_[t].b);
            out.insert(out.end(), r.begin(), r.end());
        } else {
            std::vector<int> a = sdec(nodes_[t].a);
            out = sdec(nodes_[t].b);
            for (std::size_t i = a.size(); i-- > 0;)
                for (auto& b : out) b = ap(a[i], b);
        }
        return sdec_.emplace(t, std::move(out)).first->second;
    }

    int comp_list(const std::vector<int>& fs, std::size_t from) {
        int t = fs.back();
        for (std::size_t i = fs.size() - 1; i-- > from;) t = co(fs[i], t);
        return t;
    }

    std::vector<int> spine(int t) {
        std::vector<int> out;
        while (t != X) {
            if (nodes_[t].kind != Kind::apply) throw Unsupported{"spine through compose"};
            out.push_back(nodes_[t].b);
            t = nodes_[t].a;
        }
        std::reverse(out.begin(), out.end());
        return out;
    }

    int mul(int a, const std::vector<int>& items, int tail) {
        for (int s : items) a = ap(a, s);
        if (tail >= 0) a = co(a, tail);
        return a;
    }

    // ------------------------------------------------------------ comparison

    int rel(int a, int b) { return cmp(a, b).rel; }

    // rel -1: v == u items (o tail); rel +1: u == v items (o tail)
    const Cmp& cmp(int u, int v) {
        static const Cmp equal{};
        if (u == v) return equal;
        auto it = cmp_memo_.find(key(u, v));
        if (it != cmp_memo_.end()) return it->second;
        std::vector<int> du = sdec(u), dv = sdec(v);
        int tu = du.size() > 1 ? comp_list(du, 1) : -1;
        int tv = dv.size() > 1 ? comp_list(dv, 1) : -1;
        Cmp r = cmpseq(X, spine(du[0]), tu, spine(dv[0]), tv);
        return cmp_memo_.emplace(key(u, v), std::move(r)).first->second;
    }

    static Cmp flipped(Cmp c) {
        c.rel = -c.rel;
        return c;
    }

    Cmp tailrep(int rel, int a, const std::vector<int>& hs, int t) {
        Cmp out;
        out.rel = rel;
        out.rep = true;
        if (hs.empty()) {
            out.tail = t;
            return out;
        }
        out.items.push_back(hs[0]);
        for (std::size_t i = 1; i < hs.size(); ++i) out.items.push_back(ap(a, hs[i]));
        out.tail = t < 0 ? a : co(ap(a, t), a);
        return out;
    }

    struct Step {
        bool done = false;
        Cmp result;
        int a = X;
        std::vector<int> f;
        int tf = -1;
        std::vector<int> e;
        int te = -1;
    };

    // p = a o g against q = a E (o te), E nonempty
    Step headtail(int a, int g, const std::vector<int>& E, int te) {
        Step s;
        int e = E[0];
        Cmp r = cmp(g, e);
        if (r.rel == 1 && !r.rep) throw Unsupported{"comparison without representation"};
        if (r.rel == -1) {
            s.done = true;
            s.result.rel = -1;
            if (r.tail < 0 && !r.items.empty()) {
                s.result.rep = true;
                s.result.items.push_back(r.items[0]);
                for (std::size_t i = 1; i < r.items.size(); ++i) s.result.items.push_back(ap(a, r.items[i]));
                s.result.items.insert(s.result.items.end(), E.begin() + 1, E.end());
                s.result.tail = te;
            }
            return s;
        }
        s.a = ap(a, e);
        s.e.assign(E.begin() + 1, E.end());
        s.te = te;
        if (r.rel == 0) {
            s.tf = a;
            return s;
        }
        for (int h : r.items) s.f.push_back(ap(a, h));
        s.tf = r.tail < 0 ? a : co(ap(a, r.tail), a);
        return s;
    }

    Cmp cmpseq(int a, std::vector<int> F, int tf, std::vector<int> E, int te) {
        for (;;) {
            tick();
            if (F.empty() && E.empty()) {
                if (tf < 0 && te < 0) return Cmp{};
                if (tf < 0) return Cmp{-1, true, {}, te};
                if (te < 0) return Cmp{1, true, {}, tf};
                Cmp r = cmp(tf, te);
                if (r.rel == 0) return Cmp{};
                if (!r.rep) return Cmp{r.rel, false, {}, -1};
                return tailrep(r.rel, a, r.items, r.tail);
            }
            if (F.empty() && tf < 0) return Cmp{-1, true, E, te};
            if (E.empty() && te < 0) return Cmp{1, true, F, tf};
            if (F.empty()) {
                Step s = headtail(a, tf, E, te);
                if (s.done) return s.result;
                a = s.a;
                F = std::move(s.f);
                tf = s.tf;
                E = std::move(s.e);
                te = s.te;
                continue;
            }
            if (E.empty()) {
                Step s = headtail(a, te, F, tf);
                if (s.done) return flipped(s.result);
                a = s.a;
                E = std::move(s.f);
                te = s.tf;
                F = std::move(s.e);
                tf = s.te;
                continue;
            }
            int f = F[0], e = E[0];
            Cmp r = cmp(f, e);
            if (r.rel != 0 && (r.tail >= 0 || !r.rep)) throw Unsupported{"composite spine quotient"};
            if (r.rel == 0) {
                a = ap(a, f);
                F.erase(F.begin());
                E.erase(E.begin());
            } else if (r.rel < 0) {
                std::vector<int> ne;
                for (int g : r.items) ne.push_back(ap(a, g));
                ne.insert(ne.end(), E.begin() + 1, E.end());
                E = std::move(ne);
                a = ap(a, f);
                F.erase(F.begin());
            } else {
                std::vector<int> nf;
                for (int g : r.items) nf.push_back(ap(a, g));
                nf.insert(nf.end(), F.begin() + 1, F.end());
                F = std::move(nf);
                a = ap(a, e);
                E.erase(E.begin());
            }
        }
    }

    // ------------------------------------------------------------ prenormal sequences

    int product(const std::vector<int>& s, std::size_t upto) {
        int a = s[0];
        for (std::size_t i = 1; i <= upto; ++i) a = ap(a, s[i]);
        return a;
    }
    int seq_value(const Seq& s) {
        if (!s.comp) return product(s.items, s.items.size() - 1);
        if (s.items.size() < 2) throw Unsupported{"malformed sequence"};
        return co(product(s.items, s.items.size() - 2), s.items.back());
    }

    // first i with u_{i+2} >_L u_0 ... u_i (or the compose condition failing)
    std::optional<std::pair<std::size_t, int>> first_violation(const Seq& s) {
        std::size_t n = s.items.size() - 1;
        std::vector<int> pre{s.items[0]};
        for (std::size_t i = 1; i <= n; ++i) pre.push_back(ap(pre.back(), s.items[i]));
        for (std::size_t i = 0; i + 2 <= n; ++i) {
            int r = rel(s.items[i + 2], pre[i]);
            if (r > 0) return std::make_pair(i, pre[i]);
            if (s.comp && i + 2 == n && r == 0) return std::make_pair(i, pre[i]);
        }
        return std::nullopt;
    }

    // (Pa) c where c == P D[1..] (o if dcomp); returns items over P and a pending factor
    std::pair<std::vector<int>, int> apply_rule(int P, int a, const Seq& D) {
        std::vector<int> d(D.items.begin() + 1, D.items.end());
        int Pa = ap(P, a);
        std::vector<int> mid;
        if (!D.comp) {
            if (d.size() == 1) return {{ap(a, d[0])}, -1};
            mid = {co(a, d[0]), d[1]};
            for (std::size_t i = 2; i < d.size(); ++i) mid.push_back(ap(Pa, d[i]));
            return {mid, -1};
        }
        std::vector<int> head(d.begin(), d.end() - 1);
        int dl = d.back();
        if (head.empty()) mid = {a, P};
        else if (head.size() == 1) mid = {ap(a, head[0])};
        else {
            mid = {co(a, head[0]), head[1]};
            for (std::size_t i = 2; i < head.size(); ++i) mid.push_back(ap(Pa, head[i]));
        }
        return {mid, ap(Pa, dl)};
    }

    bool is_prenormal(const Seq& s) { return !first_violation(s); }

    const Seq& prenormal_ids(int u, int v, int depth) {
        auto it = pren_memo_.find(key(u, v));
        if (it != pren_memo_.end()) return it->second;
        if (depth > 48) throw Unsupported{"prenormal recursion too deep"};
        const Cmp& c = cmp(u, v);
        if (c.rel > 0) throw NotDominated("first term is not below the second");
        Seq s;
        s.items = {u};
        if (c.rel == 0) return pren_memo_.emplace(key(u, v), s).first->second;
        if (!c.rep) throw Unsupported{"comparison without representation"};
        s.items.insert(s.items.end(), c.items.begin(), c.items.end());
        if (c.tail >= 0) {
            s.items.push_back(c.tail);
            s.comp = true;
        }
        std::optional<Seq> done = normalize(s, depth);
        if (!done) done = search_prenormal(u, v, s);
        if (!done) throw Unsupported{"no prenormal sequence found"};
        return pren_memo_.emplace(key(u, v), std::move(*done)).first->second;
    }

    std::vector<std::vector<int>> seen_entries_;

    std::optional<Seq> normalize(Seq s, int depth) {
        std::set<std::pair<std::vector<int>, bool>> seen;
        for (int it = 0; it < 400; ++it) {
            tick();
            if (!seen.insert({s.items, s.comp}).second) {
                seen_entries_.push_back(s.items);
                return std::nullopt;
            }
            auto fv = first_violation(s);
            if (!fv) return s;
            auto [i, P] = *fv;
            int a = s.items[i + 1], c = s.items[i + 2];
            int Pa = ap(P, a);
            std::vector<int> next(s.items.begin(), s.items.begin() + static_cast<long>(i) + 1);
            if (s.comp && i + 2 == s.items.size() - 1) {
                if (rel(c, P) == 0) {
                    // (Pa) o P = P o a
                    next.push_back(a);
                    s.items = std::move(next);
                    continue;
                }
                const Seq& D = prenormal_ids(P, c, depth + 1);
                auto [mid, last] = apply_rule(P, a, D);
                next.insert(next.end(), mid.begin(), mid.end());
                next.push_back(last < 0 ? Pa : co(last, Pa));
                s.items = std::move(next);
                continue;
            }
            const Seq& D = prenormal_ids(P, c, depth + 1);
            auto [mid, last] = apply_rule(P, a, D);
            std::vector<int> rest(s.items.begin() + static_cast<long>(i) + 3, s.items.end());
            next.insert(next.end(), mid.begin(), mid.end());
            if (last < 0) {
                next.insert(next.end(), rest.begin(), rest.end());
            } else if (!rest.empty()) {
                next.push_back(ap(last, rest[0]));
                next.insert(next.end(), rest.begin() + 1, rest.end());
            } else if (s.comp) {
                seen_entries_.push_back(s.items);
                return std::nullopt;
            } else {
                next.push_back(last);
                s.comp = true;
            }
            s.items = std::move(next);
        }
        seen_entries_.push_back(s.items);
        return std::nullopt;
    }

    // Bounded enumeration over small entries, used when normalization does not settle.
    std::optional<Seq> search_prenormal(int u, int v, const Seq& start) {
        std::vector<int> pool;
        std::unordered_set<int> in_pool;
        auto add = [&](int t) {
            if (in_pool.insert(t).second) pool.push_back(t);
        };
        std::vector<std::vector<int>> by{{}, {X}};
        for (int s = 2; s <= 4; ++s) {
            by.emplace_back();
            for (Kind k : {Kind::apply, Kind::compose})
                for (int i = 1; i < s; ++i)
                    for (int a : by[i])
                        for (int b : by[s - i]) by[s].push_back(mk(k, a, b));
        }
        for (const auto& layer : by)
            for (int t : layer) add(t);
        for (std::size_t i = 1; i < start.items.size(); ++i) add(start.items[i]);
        for (const auto& e : seen_entries_)
            for (std::size_t i = 1; i < e.size(); ++i) add(e[i]);
        seen_entries_.clear();
        std::sort(pool.begin(), pool.end(), [&](int a, int b) { return rel(a, b) < 0; });

        Seq cur;
        cur.items = {u};
        std::optional<Seq> found;
        std::size_t limit = 0;
        auto dfs = [&](auto&& self, int prefix) -> void {
            std::size_t j = cur.items.size();
            if (found || j > limit) return;
            std::vector<int> pre{cur.items[0]};
            for (std::size_t i = 1; i < j; ++i) pre.push_back(ap(pre.back(), cur.items[i]));
            for (int c : pool) {
                tick();
                int bound = j >= 2 ? rel(c, pre[j - 2]) : -1;
                if (bound > 0) break;
                if (bound < 0 && rel(co(prefix, c), v) == 0) {
                    found = cur;
                    found->items.push_back(c);
                    found->comp = true;
                    return;
                }
                int next = ap(prefix, c);
                int r = rel(next, v);
                if (r > 0) continue;
                if (r == 0) {
                    found = cur;
                    found->items.push_back(c);
                    return;
                }
                if (j == limit) continue;
                cur.items.push_back(c);
                self(self, next);
                cur.items.pop_back();
                if (found) return;
            }
        };
        for (limit = 1; limit <= 6 && !found; ++limit) dfs(dfs, u);
        return found;
    }

    // ------------------------------------------------------------ division trees

    std::size_t build_tree(DivisionTree& t, int u, int v, int depth) {
        if (depth > 64) throw Unsupported{"division tree too deep"};
        std::size_t idx = t.nodes.size();
        t.nodes.push_back({term(v), {}, Kind::apply, true});
        if (rel(v, u) <= 0) return idx;
        const Seq& s = prenormal_ids(u, v, 0);
        Seq copy = s;
        t.nodes[idx].leaf = false;
        t.nodes[idx].last_op = copy.comp ? Kind::compose : Kind::apply;
        for (int e : copy.items) {
            std::size_t c = build_tree(t, u, e, depth + 1);
            t.nodes[idx].children.push_back(c);
        }
        return idx;
    }

    // -1 for a leaf, else an index into forms_
    int form(int v, int depth) {
        auto it = form_of_.find(v);
        if (it != form_of_.end()) return it->second;
        if (depth > 64) throw Unsupported{"division form too deep"};
        int id = -1;
        if (rel(v, X) != 0) {
            Seq s = prenormal_ids(X, v, 0);
            Form f;
            f.comp = s.comp;
            for (std::size_t i = 1; i < s.items.size(); ++i) f.entries.push_back(form(s.items[i], depth + 1));
            forms_.push_back(std::move(f));
            id = static_cast<int>(forms_.size() - 1);
        }
        form_of_.emplace(v, id);
        return id;
    }

    int lexcmp(int f, int g) {
        if (f < 0 && g < 0) return 0;
        if (f < 0) return -1;
        if (g < 0) return 1;
        const Form A = forms_[f];
        const Form B = forms_[g];
        std::size_t n = std::min(A.entries.size(), B.entries.size());
        for (std::size_t i = 0; i < n; ++i) {
            int r = lexcmp(A.entries[i], B.entries[i]);
            if (r) return r;
            bool la = i + 1 == A.entries.size() && A.comp;
            bool lb = i + 1 == B.entries.size() && B.comp;
            if (la && lb) return 0;
            if (la) return 1;
            if (lb) return -1;
        }
        return (A.entries.size() > B.entries.size()) - (A.entries.size() < B.entries.size());
    }

    // ------------------------------------------------------------ expansion search

    std::vector<std::pair<int, Path>> expansions_of(int t) {
        std::vector<std::pair<int, Path>> out;
        Path p;
        auto rec = [&](auto&& self, int s) -> std::vector<std::pair<int, std::string>> {
            std::vector<std::pair<int, std::string>> r;
            if (s == X) return r;
            int a = nodes_[s].a, b = nodes_[s].b;
            if (b != X) r.push_back({ap(ap(a, nodes_[b].a), ap(a, nodes_[b].b)), ""});
            for (auto& [e, q] : self(self, a)) r.push_back({ap(e, b), "l" + q});
            for (auto& [e, q] : self(self, b)) r.push_back({ap(a, e), "r" + q});
            return r;
        };
        for (auto& [e, q] : rec(rec, t)) out.push_back({e, q});
        return out;
    }

    struct IdCert {
        int common;
        std::vector<Path> from_u, from_v;
    };

    // Split at the root once the left factors agree (then the right ones do too, by
    // cancellation); otherwise expand both sides until they do.
    std::optional<IdCert> guided(int u, int v, std::uint64_t& budget, unsigned depth) {
        if (u == v) return IdCert{u, {}, {}};
        if (u == X || v == X || depth > 64) return std::nullopt;
        if (rel(nodes_[u].a, nodes_[v].a) == 0) {
            auto l = guided(nodes_[u].a, nodes_[v].a, budget, depth + 1);
            if (!l) return std::nullopt;
            auto r = guided(nodes_[u].b, nodes_[v].b, budget, depth + 1);
            if (!r) return std::nullopt;
            IdCert c{ap(l->common, r->common), {}, {}};
            for (auto& q : l->from_u) c.from_u.push_back("l" + q);
            for (auto& q : r->from_u) c.from_u.push_back("r" + q);
            for (auto& q : l->from_v) c.from_v.push_back("l" + q);
            for (auto& q : r->from_v) c.from_v.push_back("r" + q);
            return c;
        }
        auto by_left = [this](int a, int b) { return rel(nodes_[a].a, nodes_[b].a) < 0; };
        struct Side {
            std::unordered_map<int, std::pair<int, Path>> parent;
            std::map<int, int, decltype(by_left)> classes;
            std::vector<int> frontier;
            explicit Side(decltype(by_left) f) : classes(f) {}
        };
        Side su(by_left), sv(by_left);
        su.parent[u] = {-1, ""};
        sv.parent[v] = {-1, ""};
        su.classes.emplace(u, u);
        sv.classes.emplace(v, v);
        su.frontier = {u};
        sv.frontier = {v};
        auto chain = [](const Side& s, int t) {
            std::vector<Path> steps;
            while (s.parent.at(t).first >= 0) {
                steps.push_back(s.parent.at(t).second);
                t = s.parent.at(t).first;
            }
            std::reverse(steps.begin(), steps.end());
            return steps;
        };
        bool turn = false;
        while (!su.frontier.empty() || !sv.frontier.empty()) {
            turn = !turn;
            Side& me = turn ? su : sv;
            Side& other = turn ? sv : su;
            std::vector<int> next;
            for (int t : me.frontier)
                for (auto& [e, p] : expansions_of(t)) {
                    if (me.parent.count(e)) continue;
                    if (budget == 0) return std::nullopt;
                    --budget;
                    me.parent[e] = {t, p};
                    next.push_back(e);
                    auto hit = other.classes.find(e);
                    if (hit == other.classes.end()) {
                        me.classes.emplace(e, e);
                        continue;
                    }
                    int a = turn ? e : hit->second, b = turn ? hit->second : e;
                    auto rest = guided(a, b, budget, depth + 1);
                    if (!rest) return std::nullopt;
                    IdCert c{rest->common, chain(su, a), chain(sv, b)};
                    c.from_u.insert(c.from_u.end(), rest->from_u.begin(), rest->from_u.end());
                    c.from_v.insert(c.from_v.end(), rest->from_v.begin(), rest->from_v.end());
                    return c;
                }
            me.frontier = std::move(next);
        }
        return std::nullopt;
    }

    std::optional<ExpansionCertificate> common_expansion_ids(int u, int v, std::uint64_t budget) {
        std::uint64_t saved = steps_;
        try {
            std::uint64_t b = budget;
            steps_ = 0;
            auto g = guided(u, v, b, 0);
            steps_ = saved;
            if (g) return ExpansionCertificate{term(g->common), g->from_u, g->from_v};
        } catch (const FuelOut&) {
            steps_ = saved;
        } catch (const Unsupported&) {
            steps_ = saved;
        }
        return bfs_expansion(u, v, budget);
    }

    std::optional<ExpansionCertificate> bfs_expansion(int u, int v, std::uint64_t budget) {
        struct Side {
            std::unordered_map<int, std::pair<int, Path>> parent;
            std::vector<int> frontier;
        };
        Side su, sv;
        su.parent[u] = {-1, ""};
        sv.parent[v] = {-1, ""};
        su.frontier = {u};
        sv.frontier = {v};
        auto chain = [&](const Side& s, int t) {
            std::vector<Path> steps;
            while (s.parent.at(t).first >= 0) {
                steps.push_back(s.parent.at(t).second);
                t = s.parent.at(t).first;
            }
            std::reverse(steps.begin(), steps.end());
            return steps;
        };
        auto finish = [&](int meet) {
            ExpansionCertificate c;
            c.common = term(meet);
            c.from_u = chain(su, meet);
            c.from_v = chain(sv, meet);
            return c;
        };
        if (u == v) return finish(u);
        std::uint64_t seen = 2;
        bool turn = false;
        while (!su.frontier.empty() || !sv.frontier.empty()) {
            turn = !turn;
            Side& me = turn ? su : sv;
            Side& other = turn ? sv : su;
            if (me.frontier.empty()) continue;
            std::vector<int> next;
            for (int t : me.frontier) {
                for (auto& [e, p] : expansions_of(t)) {
                    if (me.parent.count(e)) continue;
                    me.parent[e] = {t, p};
                    if (other.parent.count(e)) return finish(e);
                    next.push_back(e);
                    if (++seen > budget) return std::nullopt;
                }
            }
            me.frontier = std::move(next);
        }
        return std::nullopt;
    }

    bool table_witness(const Term& u, const Term& v, unsigned from, unsigned to, EquivVerdict& out) {
        for (unsigned k = from; k <= to; ++k) {
            auto t = shared_table(k);
            Index a = residue(*t, u), b = residue(*t, v);
            if (a != b) {
                out.kind = EquivKind::inequivalent;
                out.method = "table";
                out.witness_level = k;
                out.residue_u = a;
                out.residue_v = b;
                return true;
            }
        }
        return false;
    }
};

// ---------------------------------------------------------------- free functions

inline Outcome<OrderVerdict> compare(const Term& u, const Term& v, Fuel fuel = {}) {
    return OrderEngine(fuel).compare(u, v);
}
inline EquivVerdict decide_equiv(const Term& u, const Term& v, Fuel fuel = {}) {
    return OrderEngine(fuel).decide_equiv(u, v);
}
inline Outcome<PrenormalSequence> prenormal_decompose(const Term& u, const Term& v, Fuel fuel = {}) {
    return OrderEngine(fuel).prenormal(u, v);
}
inline Outcome<DivisionTree> division_tree(const Term& u, const Term& v, Fuel fuel = {}) {
    return OrderEngine(fuel).division_tree(u, v);
}
inline Outcome<Relation> lex_compare_xdivision(const Term& u, const Term& v, Fuel fuel = {}) {
    return OrderEngine(fuel).lex_compare_xdivision(u, v);
}

inline bool check_expansion_certificate(const Term& u, const Term& v, const ExpansionCertificate& c) {
    try {
        Term a = u, b = v;
        for (const auto& p : c.from_u) a = expand_once(a, p);
        for (const auto& p : c.from_v) b = expand_once(b, p);
        return a == c.common && b == c.common;
    } catch (const InvalidPosition&) {
        return false;
    }
}

} // namespace ldlab

#pragma once

#include <deque>
#include <optional>
#include <unordered_map>
#include <vector>

#include "order.hpp"
#include "term.hpp"

namespace ldlab {

// Rewrites a o b -> ab o a at compose nodes, breadth first, until `to` appears.
// Returns the paths of the rewritten nodes.
inline std::optional<std::vector<Path>> swap_rewrite_search(const Term& from, const Term& to,
                                                            std::uint64_t budget = 100'000) {
    std::unordered_map<Term, std::pair<Term, Path>, TermHash> parent;
    std::deque<Term> q{from};
    parent.emplace(from, std::make_pair(from, Path("-")));
    auto compose_nodes = [](const Term& w) {
        std::vector<Path> out;
        Path p;
        auto rec = [&](auto&& self, const Term& t) -> void {
            if (t.is_leaf()) return;
            if (t.is_compose()) out.push_back(p);
            p.push_back('l');
            self(self, t.left());
            p.back() = 'r';
            self(self, t.right());
            p.pop_back();
        };
        rec(rec, w);
        return out;
    };
    while (!q.empty()) {
        Term t = q.front();
        q.pop_front();
        if (t == to) {
            std::vector<Path> steps;
            Term c = t;
            while (parent.at(c).second != "-") {
                steps.push_back(parent.at(c).second);
                c = parent.at(c).first;
            }
            return std::vector<Path>(steps.rbegin(), steps.rend());
        }
        if (t.size() > 2 * to.size()) continue;
        for (const auto& p : compose_nodes(t)) {
            const Term& n = subterm(t, p);
            Term r = Term::compose(Term::apply(n.left(), n.right()), n.left());
            Term next = detail::replace_at(t, p, 0, r);
            if (parent.count(next)) continue;
            if (parent.size() >= budget) return std::nullopt;
            parent.emplace(next, std::make_pair(t, p));
            q.push_back(next);
        }
    }
    return std::nullopt;
}

inline Term swap_rewrite(const Term& w, const Path& p) {
    const Term& n = subterm(w, p);
    if (!n.is_compose()) throw InvalidPosition("no compose node at path '" + p + "'");
    return detail::replace_at(w, p, 0, Term::compose(Term::apply(n.left(), n.right()), n.left()));
}

} // namespace ldlab

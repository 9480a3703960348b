#include "cli.hpp"

#include <chrono>
#include <functional>
#include <random>
#include <sstream>

#include <ldlab/ldlab.hpp>

namespace ldlab::cli {

namespace {

Term random_a_term(std::mt19937_64& rng, unsigned max_size) {
    std::uniform_int_distribution<unsigned> d(1, max_size);
    auto rec = [&](auto&& self, unsigned n) -> Term {
        if (n == 1) return x_term;
        std::uniform_int_distribution<unsigned> s(1, n - 1);
        unsigned l = s(rng);
        return Term::apply(self(self, l), self(self, n - l));
    };
    return rec(rec, d(rng));
}

} // namespace

bool verify_all(const Config& cfg, std::ostream& out) {
    bool all = true;
    auto check = [&](const std::string& name, const std::function<std::string()>& fn) {
        auto t0 = std::chrono::steady_clock::now();
        std::string problem;
        try {
            problem = fn();
        } catch (const std::exception& e) {
            problem = std::string("exception: ") + e.what();
        }
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::ostringstream os;
        os.precision(2);
        os << std::fixed << s;
        out << (problem.empty() ? "PASS " : "FAIL ") << name << " (" << os.str() << " s)";
        if (!problem.empty()) out << ": " << problem;
        out << '\n';
        all = all && problem.empty();
    };
    std::mt19937_64 rng(cfg.seed);

    check("laws exhaustive k<=6", [&]() -> std::string {
        for (unsigned k = 1; k <= 6; ++k)
            if (!verify_laws(*shared_table(k)).ok()) return "violation at level " + std::to_string(k);
        return "";
    });
    check("laws sampled k=10,14,16", [&]() -> std::string {
        for (unsigned k : {10u, 14u, 16u})
            if (!verify_laws(*shared_table(k), VerifyMode::sample(100'000, cfg.seed)).ok())
                return "violation at level " + std::to_string(k);
        return "";
    });
    check("projection homomorphism levels<=6", [&]() -> std::string {
        for (unsigned hi = 1; hi <= 6; ++hi)
            for (unsigned lo = 1; lo <= hi; ++lo) {
                auto a = shared_table(hi), b = shared_table(lo);
                for (Index p = 0; p < a->order(); ++p)
                    for (Index q = 0; q < a->order(); ++q) {
                        Index pp = project(p, hi, lo), qq = project(q, hi, lo);
                        if (project(a->at(p, q), hi, lo) != b->at(pp, qq) ||
                            project(a->compose(p, q), hi, lo) != b->compose(pp, qq))
                            return "levels " + std::to_string(hi) + "->" + std::to_string(lo);
                    }
            }
        return "";
    });
    check("row periods double or stay under lifting k<=10", [&]() -> std::string {
        for (unsigned k = 1; k < 10; ++k) {
            auto lo = shared_table(k), hi = shared_table(k + 1);
            for (Index m = 1; m < hi->order(); ++m) {
                Index p = hi->period(m), q = lo->period(project(m, k + 1, k));
                if (p != q && p != 2 * q) return "row " + std::to_string(m) + " at level " + std::to_string(k + 1);
            }
        }
        return "";
    });
    check("residue stability", [&]() -> std::string {
        for (int i = 0; i < 200; ++i) {
            Term w = random_a_term(rng, 7);
            auto c = crit_index(w, 16);
            if (!c) continue;
            for (unsigned k = c->witness_level + 1; k <= 16; ++k) {
                Index r = residue(*shared_table(k), w);
                if (project(r, k, c->witness_level) != c->residue || nu2(r) != c->gamma_index)
                    return render_term(w);
            }
        }
        return "";
    });
    check("f and kappa small values", [&]() -> std::string {
        unsigned want_f[] = {0, 0, 1}, want_k[] = {0, 1, 2};
        for (unsigned n = 0; n < 3; ++n) {
            auto f = f_count(n, 16);
            auto kk = kappa_index(n, 16);
            if (!f || *f != want_f[n] || !kk || *kk != want_k[n]) return "n=" + std::to_string(n);
        }
        if (f_count(3, 16)) return "f(3) should be out of reach";
        return "";
    });
    check("order trichotomy, certificates and transitivity size<=5", [&]() -> std::string {
        OrderEngine eng;
        auto ts = a_terms_up_to(5);
        for (const auto& u : ts)
            for (const auto& v : ts) {
                auto a = eng.compare(u, v), b = eng.compare(v, u);
                if (!a || !b) return "undecided " + render_term(u) + " " + render_term(v);
                if (a->relation != flip(b->relation)) return "antisymmetry " + render_term(u) + " " + render_term(v);
                if (a->relation == Relation::equal &&
                    (!a->expansion || !check_expansion_certificate(u, v, *a->expansion)))
                    return "missing expansion certificate";
                if (a->relation == Relation::less) {
                    if (!a->representation || a->representation->head != u) return "missing representation";
                    auto e = eng.relation(a->representation->product(), v);
                    if (!e || *e != Relation::equal) return "bad representation";
                }
            }
        for (const auto& a : ts)
            for (const auto& b : ts)
                for (const auto& c : ts)
                    if (*eng.relation(a, b) != Relation::greater && *eng.relation(b, c) != Relation::greater &&
                        *eng.relation(a, c) == Relation::greater)
                        return "transitivity";
        return "";
    });
    check("left cancellation and monotonicity", [&]() -> std::string {
        OrderEngine eng;
        for (int i = 0; i < 500; ++i) {
            Term u = random_a_term(rng, 4), v = random_a_term(rng, 4), w = random_a_term(rng, 4);
            auto a = eng.relation(Term::apply(u, v), Term::apply(u, w));
            auto b = eng.relation(v, w);
            if (!a || !b) return "undecided";
            if (*a != *b) return render_term(u) + " " + render_term(v) + " " + render_term(w);
        }
        return "";
    });
    check("iterate identities", [&]() -> std::string {
        OrderEngine eng;
        for (const Term& w : {x_term, Term::apply(x_term, x_term)})
            for (unsigned n = 0; n <= 3; ++n)
                for (unsigned i = 0; i <= n; ++i)
                    if (!eng.equivalent(Term::apply(iterate(w, i), iterate(w, n)), iterate(w, n + 1)))
                        return "w=" + render_term(w) + " i=" + std::to_string(i) + " n=" + std::to_string(n);
        return "";
    });
    check("pair iterates compose to j o k", [&]() -> std::string {
        for (unsigned n = 0; n <= 6; ++n) {
            Term lhs = Term::compose(iterate_pair(n + 1), iterate_pair(n));
            Term rhs = Term::compose(Term::var(0), Term::var(1));
            if (n >= 1 && !swap_rewrite_search(rhs, lhs)) return "rewrite search n=" + std::to_string(n);
            for (unsigned k = 1; k <= 5; ++k) {
                auto t = shared_table(k);
                for (Index a = 0; a < t->order(); ++a)
                    for (Index b = 0; b < t->order(); ++b) {
                        Assignment as{{0, a}, {1, b}};
                        if (eval_term(*t, lhs, as) != eval_term(*t, rhs, as)) return "table n=" + std::to_string(n);
                    }
            }
        }
        return "";
    });
    check("braid action reproduces terms size<=5", [&]() -> std::string {
        OrderEngine eng;
        for (const auto& b : a_terms_up_to(5)) {
            ActResult r = act(alpha_of(b), TermSequence{}, eng);
            if (r.status != ActStatus::defined) return "undefined for " + render_term(b);
            if (!eng.equivalent(r.sequence.at(0), b)) return render_term(b);
            for (std::size_t i = 1; i < r.sequence.entries.size(); ++i)
                if (!eng.equivalent(r.sequence.entries[i], x_term)) return render_term(b);
        }
        return "";
    });
    check("binary format round trip k<=8", [&]() -> std::string {
        for (unsigned k = 1; k <= 8; ++k) {
            auto t = shared_table(k);
            auto bytes = encode_table(*t);
            if (!(decode_table(bytes) == *t)) return "level " + std::to_string(k);
            bytes[bytes.size() / 2] ^= 0x10;
            try {
                decode_table(bytes);
                return "corruption missed at level " + std::to_string(k);
            } catch (const CorruptFile&) {
            }
        }
        return "";
    });
    return all;
}

} // namespace ldlab::cli

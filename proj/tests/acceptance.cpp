// One PASS/FAIL line per acceptance criterion.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <ldlab/ldlab.hpp>
#include "cli.hpp"

using namespace ldlab;

namespace {

int failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<std::string()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    std::string problem;
    try {
        problem = body();
    } catch (const std::exception& e) {
        problem = std::string("exception: ") + e.what();
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (problem.empty() && s > limit_s) problem = "over time limit";
    bool ok = problem.empty() || problem[0] == '+';
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f s / %.0f s", s, limit_s);
    std::cout << (ok ? "PASS " : "FAIL ") << id << ' ' << name << " (" << buf << ")";
    if (!problem.empty()) std::cout << (ok ? " " : ": ") << (ok ? problem.substr(1) : problem);
    std::cout << std::endl;
    if (!ok) ++failures;
}

Term random_a_term(std::mt19937_64& rng, unsigned max_size) {
    unsigned n = 1 + unsigned(rng() % max_size);
    auto rec = [&](auto&& self, unsigned s) -> Term {
        if (s == 1) return x_term;
        unsigned l = 1 + unsigned(rng() % (s - 1));
        return Term::apply(self(self, l), self(self, s - l));
    };
    return rec(rec, n);
}

std::string run_cli(const std::vector<std::string>& a, int* code = nullptr) {
    std::ostringstream out, err;
    int c = cli::run(a, out, err);
    if (code) *code = c;
    std::string s = out.str();
    while (!s.empty() && s.back() == '\n') s.pop_back();
    return s;
}

std::string show(const Term& u, const Term& v) { return render_term(u) + " vs " + render_term(v); }

} // namespace

int main() {
    auto cache = std::filesystem::temp_directory_path() / ("ldlab-acceptance-" + std::to_string(::getpid()));
    ::setenv("LDLAB_CACHE", cache.c_str(), 1);
    std::mt19937_64 rng(20240501);

    criterion(1, "table cells match memoized brute-force recursion, k<=8", 10, []() -> std::string {
        for (unsigned k = 1; k <= 8; ++k) {
            const int n = 1 << k;
            std::vector<int> memo(std::size_t(n) * n, -1);
            std::function<int(int, int)> f = [&](int m, int i) -> int {
                int& slot = memo[std::size_t(m) * n + i];
                if (slot >= 0) return slot;
                int v;
                if (i == 0) v = 0;
                else if (m == 0) v = i;
                else if (i == 1) v = (m + 1) % n;
                else v = f(f(m, i - 1), f(m, 1));
                return slot = v;
            };
            auto t = build_table(k);
            for (int m = 0; m < n; ++m)
                for (int i = 0; i < n; ++i)
                    if (int(t.apply(Index(m), Index(i))) != f(m, i))
                        return "k=" + std::to_string(k) + " cell " + std::to_string(m) + "," + std::to_string(i);
        }
        return "";
    });

    criterion(2, "law suite: exhaustive k<=6, sampled 1e5 at k=10,14,16", 60, []() -> std::string {
        for (unsigned k = 1; k <= 6; ++k) {
            auto r = verify_laws(*shared_table(k));
            if (r.triples != (std::uint64_t(1) << (3 * k))) return "triple count at k=" + std::to_string(k);
            if (!r.ok()) return std::string(law_name(r.violations[0].law)) + " at k=" + std::to_string(k);
        }
        for (unsigned k : {10u, 14u, 16u}) {
            auto r = verify_laws(*shared_table(k), VerifyMode::sample(100000, 1));
            if (r.triples != 100000 || !r.ok()) return "sampled k=" + std::to_string(k);
        }
        return "";
    });

    criterion(3, "projection homomorphism: exhaustive levels<=6, sampled (16,8)", 60, [&]() -> std::string {
        for (unsigned hi = 1; hi <= 6; ++hi)
            for (unsigned lo = 1; lo <= hi; ++lo) {
                auto a = shared_table(hi), b = shared_table(lo);
                for (Index p = 0; p < a->order(); ++p)
                    for (Index q = 0; q < a->order(); ++q) {
                        Index pp = project(p, hi, lo), qq = project(q, hi, lo);
                        if (project(a->apply(p, q), hi, lo) != b->apply(pp, qq) ||
                            project(a->compose(p, q), hi, lo) != b->compose(pp, qq))
                            return std::to_string(hi) + "->" + std::to_string(lo);
                    }
            }
        auto a = shared_table(16), b = shared_table(8);
        for (int i = 0; i < 100000; ++i) {
            Index p = Index(rng() % a->order()), q = Index(rng() % a->order());
            Index pp = project(p, 16, 8), qq = project(q, 16, 8);
            if (project(a->apply(p, q), 16, 8) != b->apply(pp, qq) ||
                project(a->compose(p, q), 16, 8) != b->compose(pp, qq))
                return "16->8";
        }
        return "";
    });

    criterion(4, "f(0..2) = 0,0,1; kappa(0..2) = 0,1,2; crit of ((xx)x)(xx) between kappa 2 and 3", 60,
              []() -> std::string {
                  const char* f[] = {"0", "0", "1"};
                  for (int n = 0; n < 3; ++n) {
                      if (run_cli({"--max-k", "16", "crit", "f", std::to_string(n)}) != f[n]) return "crit f " + std::to_string(n);
                      if (run_cli({"--max-k", "16", "crit", "kappa", std::to_string(n)}) != std::to_string(n))
                          return "crit kappa " + std::to_string(n);
                  }
                  auto g = crit_index(parse_term("((xx)x)(xx)"), 16);
                  auto k2 = kappa_index(2, 16), k3 = kappa_index(3, 16);
                  if (!g || !k2 || !k3) return "undecided";
                  if (!(*k2 < g->gamma_index && g->gamma_index < *k3)) return "not strictly between";
                  return "+(gamma " + std::to_string(g->gamma_index) + ", kappa_2 " + std::to_string(*k2) +
                         ", kappa_3 " + std::to_string(*k3) + ")";
              });

    criterion(5, "gamma_index of left powers x_(m) equals nu2(m), m<=16", 60, []() -> std::string {
        for (unsigned m = 1; m <= 16; ++m) {
            auto c = crit_index(left_power(m), 16);
            if (!c || c->gamma_index != nu2(m)) return "m=" + std::to_string(m);
        }
        return "";
    });

    criterion(6, "residue stability, 200 random A-terms of size<=7 up to level 16", 60, [&]() -> std::string {
        int decided = 0;
        for (int i = 0; i < 200; ++i) {
            Term w = random_a_term(rng, 7);
            unsigned k0 = 0;
            Index r0 = 0;
            for (unsigned k = 1; k <= 16; ++k) {
                Index r = residue(*shared_table(k), w);
                if (k0 == 0) {
                    if (r != 0) k0 = k, r0 = r;
                    continue;
                }
                if (project(r, k, k0) != r0 || nu2(r) != nu2(r0)) return render_term(w);
            }
            decided += k0 != 0;
        }
        return "+(" + std::to_string(decided) + "/200 reach a nonzero residue)";
    });

    criterion(7, "order: trichotomy with certificates, antisymmetry, transitivity, lex agreement", 600,
              [&]() -> std::string {
                  OrderEngine eng;
                  auto check_pair = [&](const Term& u, const Term& v) -> std::string {
                      auto r = eng.compare(u, v);
                      if (!r) return "undecided " + show(u, v);
                      if (r->relation == Relation::equal) {
                          if (!r->expansion || !check_expansion_certificate(u, v, *r->expansion))
                              return "equal without certificate " + show(u, v);
                      } else {
                          const Term& small = r->relation == Relation::less ? u : v;
                          const Term& big = r->relation == Relation::less ? v : u;
                          if (!r->representation || r->representation->head != small)
                              return "bad representation " + show(u, v);
                          auto e = eng.decide_equiv(r->representation->product(), big);
                          if (e.kind != EquivKind::equivalent) return "representation not equivalent " + show(u, v);
                      }
                      return "";
                  };
                  auto ts = a_terms_up_to(5);
                  for (const auto& u : ts)
                      for (const auto& v : ts)
                          if (auto p = check_pair(u, v); !p.empty()) return p;
                  for (int i = 0; i < 500; ++i) {
                      Term u = random_a_term(rng, 7), v = random_a_term(rng, 7);
                      if (auto p = check_pair(u, v); !p.empty()) return p;
                  }
                  std::vector<std::vector<Relation>> m(ts.size(), std::vector<Relation>(ts.size()));
                  for (std::size_t i = 0; i < ts.size(); ++i)
                      for (std::size_t j = 0; j < ts.size(); ++j) m[i][j] = *eng.relation(ts[i], ts[j]);
                  for (std::size_t i = 0; i < ts.size(); ++i)
                      for (std::size_t j = 0; j < ts.size(); ++j) {
                          if (m[i][j] != flip(m[j][i])) return "antisymmetry " + show(ts[i], ts[j]);
                          for (std::size_t k = 0; k < ts.size(); ++k)
                              if (m[i][j] != Relation::greater && m[j][k] != Relation::greater &&
                                  m[i][k] == Relation::greater)
                                  return "transitivity";
                      }
                  std::size_t both = 0, total = 0;
                  auto lex = [&](const Term& u, const Term& v) -> std::string {
                      ++total;
                      auto a = eng.lex_compare_xdivision(u, v);
                      if (!a) return "";
                      ++both;
                      if (*a != *eng.relation(u, v)) return "lex disagrees " + show(u, v);
                      return "";
                  };
                  for (const auto& u : ts)
                      for (const auto& v : ts)
                          if (auto p = lex(u, v); !p.empty()) return p;
                  for (int i = 0; i < 500; ++i)
                      if (auto p = lex(random_a_term(rng, 7), random_a_term(rng, 7)); !p.empty()) return p;
                  return "+(lex decided " + std::to_string(both) + "/" + std::to_string(total) + " pairs)";
              });

    criterion(8, "left cancellation and monotonicity, 500 random triples", 600, [&]() -> std::string {
        OrderEngine eng;
        for (int i = 0; i < 500; ++i) {
            Term u = random_a_term(rng, 4), v = random_a_term(rng, 4), w = random_a_term(rng, 4);
            Term uv = Term::apply(u, v), uw = Term::apply(u, w);
            auto a = eng.decide_equiv(uv, uw), b = eng.decide_equiv(v, w);
            if (a.kind == EquivKind::exhausted || b.kind == EquivKind::exhausted) return "exhausted";
            if ((a.kind == EquivKind::equivalent) != (b.kind == EquivKind::equivalent))
                return "cancellation " + render_term(u) + " " + render_term(v) + " " + render_term(w);
            auto c = eng.relation(uv, uw), d = eng.relation(v, w);
            if (!c || !d) return "exhausted";
            if (*c != *d) return "monotonicity " + render_term(u) + " " + render_term(v) + " " + render_term(w);
        }
        return "";
    });

    criterion(9, "iterate identities and I_{n+1} o I_n = j o k in tables", 600, []() -> std::string {
        OrderEngine eng;
        for (const Term& w : {x_term, Term::apply(x_term, x_term)})
            for (unsigned n = 0; n <= 3; ++n)
                for (unsigned i = 0; i <= n; ++i)
                    if (eng.decide_equiv(Term::apply(iterate(w, i), iterate(w, n)), iterate(w, n + 1)).kind !=
                        EquivKind::equivalent)
                        return "w=" + render_term(w) + " i=" + std::to_string(i) + " n=" + std::to_string(n);
        Term jk = Term::compose(Term::var(0), Term::var(1));
        for (unsigned n = 0; n <= 6; ++n) {
            Term lhs = Term::compose(iterate_pair(n + 1), iterate_pair(n));
            for (unsigned k = 1; k <= 5; ++k) {
                auto t = shared_table(k);
                for (Index a = 0; a < t->order(); ++a)
                    for (Index b = 0; b < t->order(); ++b) {
                        Assignment as{{0, a}, {1, b}};
                        if (eval_term(*t, lhs, as) != eval_term(*t, jk, as))
                            return "n=" + std::to_string(n) + " k=" + std::to_string(k);
                    }
            }
        }
        return "";
    });

    criterion(10, "braid coherence for A-terms of size<=5, worked words, undefined inverse", 300, []() -> std::string {
        OrderEngine eng;
        for (const auto& b : a_terms_up_to(5)) {
            auto r = act(alpha_of(b), TermSequence{}, eng);
            if (r.status != ActStatus::defined) return "not defined for " + render_term(b);
            if (eng.decide_equiv(r.sequence.at(0), b).kind != EquivKind::equivalent) return render_term(b);
            for (std::size_t i = 1; i <= r.sequence.entries.size(); ++i)
                if (eng.decide_equiv(r.sequence.at(i), x_term).kind != EquivKind::equivalent) return render_term(b);
        }
        if (!alpha_of(x_term).letters.empty()) return "alpha x";
        if (render_braid(alpha_of(parse_term("xx"))) != "s1") return "alpha xx";
        if (render_braid(alpha_of(parse_term("x(xx)"))) != "s2 s1") return "alpha x(xx)";
        auto u = act(parse_braid("S1"), TermSequence{{x_term, parse_term("xx")}}, eng);
        if (u.status != ActStatus::undefined) return "inverse action should be undefined";
        return "";
    });

    criterion(11, "out of reach at default limits: f(3) and kappa_index(4) exhausted", 120, []() -> std::string {
        int code = 0;
        std::string out = run_cli({"crit", "f", "3"}, &code);
        if (code != cli::exit_exhausted || out.rfind("exhausted", 0) != 0) return "crit f 3 returned " + out;
        if (f_count(3)) return "f(3) decided";
        if (kappa_index(4)) return "kappa_index(4) decided";
        auto k3 = kappa_index(3);
        // kappa_index(3) is small; the f(2) check above needs it
        return "+(kappa_index(3) = " + (k3 ? std::to_string(*k3) : std::string("exhausted")) +
               " is decided; the exhausted quantity is kappa_index(4))";
    });

    criterion(12, "binary format: bit-exact round trip k<=12, every single-byte corruption detected", 300,
              [&]() -> std::string {
                  auto dir = std::filesystem::temp_directory_path() / ("ldlab-acc-fmt-" + std::to_string(::getpid()));
                  std::filesystem::create_directories(dir);
                  for (unsigned k = 1; k <= 12; ++k) {
                      auto t = build_table(k);
                      auto path = (dir / "t.ldt").string();
                      save_table(t, path);
                      std::ifstream f(path, std::ios::binary);
                      std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), {});
                      if (bytes != encode_table(t)) return "file bytes differ at k=" + std::to_string(k);
                      auto back = load_table(path);
                      if (!(back == t) || encode_table(back) != bytes) return "round trip k=" + std::to_string(k);
                      std::size_t positions = k <= 8 ? bytes.size() : 3000;
                      for (std::size_t i = 0; i < positions; ++i) {
                          std::size_t pos = k <= 8 ? i : std::size_t(rng() % bytes.size());
                          auto bad = bytes;
                          bad[pos] ^= std::uint8_t(1 + rng() % 255);
                          try {
                              decode_table(bad);
                              return "corruption undetected k=" + std::to_string(k) + " byte " + std::to_string(pos);
                          } catch (const CorruptFile&) {
                          }
                      }
                  }
                  std::filesystem::remove_all(dir);
                  return "";
              });

    std::filesystem::remove_all(cache);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}

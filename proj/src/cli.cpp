#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <functional>
#include <iomanip>
#include <sstream>

#include <ldlab/ldlab.hpp>

namespace ldlab::cli {

using json = nlohmann::json;

namespace {

struct Reply {
    std::string verdict;
    json certificate = nullptr;
    std::optional<unsigned> witness_level;
    std::string text;
    int status = exit_ok;
};

json term_json(const Term& t) { return render_term(t); }

json representation_json(const Representation& r) {
    json j{{"head", term_json(r.head)}, {"items", json::array()}};
    for (const auto& i : r.items) j["items"].push_back(term_json(i));
    j["tail"] = r.tail ? term_json(*r.tail) : json(nullptr);
    j["product"] = term_json(r.product());
    return j;
}

json expansion_json(const ExpansionCertificate& c) {
    return json{{"common", term_json(c.common)}, {"from_first", c.from_u}, {"from_second", c.from_v}};
}

std::string sequence_text(const PrenormalSequence& s) {
    std::string out = "[" + render_term(s.head) + ";";
    for (std::size_t i = 0; i < s.tail.size(); ++i) out += (i ? ", " : " ") + render_term(s.tail[i]);
    out += "] ";
    out += s.last_op == Kind::compose ? "compose" : "apply";
    return out;
}

json sequence_json(const PrenormalSequence& s) {
    json j{{"head", term_json(s.head)}, {"tail", json::array()},
           {"last_op", s.last_op == Kind::compose ? "compose" : "apply"}};
    for (const auto& t : s.tail) j["tail"].push_back(term_json(t));
    return j;
}

void tree_text(const DivisionTree& t, std::size_t i, int depth, std::ostringstream& os) {
    const auto& n = t.nodes[i];
    os << std::string(std::size_t(2 * depth), ' ') << render_term(n.label);
    if (!n.leaf && n.last_op == Kind::compose) os << "  (compose)";
    os << '\n';
    for (auto c : n.children) tree_text(t, c, depth + 1, os);
}

json tree_json(const DivisionTree& t, std::size_t i) {
    const auto& n = t.nodes[i];
    json j{{"label", term_json(n.label)}, {"leaf", n.leaf}};
    if (!n.leaf) {
        j["last_op"] = n.last_op == Kind::compose ? "compose" : "apply";
        j["children"] = json::array();
        for (auto c : n.children) j["children"].push_back(tree_json(t, c));
    }
    return j;
}

std::string sequence_text(const TermSequence& s) {
    std::string out = "<";
    for (const auto& e : s.entries) out += render_term(e) + ", ";
    return out + "x, ...>";
}

json term_sequence_json(const TermSequence& s) {
    json j = json::array();
    for (const auto& e : s.entries) j.push_back(term_json(e));
    return j;
}

Reply exhausted_reply(const Exhausted& e) {
    Reply r;
    r.verdict = "exhausted";
    r.certificate = json{{"reason", e.what}, {"spent", e.spent}};
    r.text = "exhausted (" + e.what + ")";
    r.status = exit_exhausted;
    return r;
}

Fuel fuel_of(const Config& c) {
    Fuel f;
    f.steps = c.fuel;
    f.max_k = std::min(c.max_k, 20u);
    return f;
}

void check_level(unsigned k, const Config& c) {
    unsigned cap = c.force ? hard_max_level : max_level;
    if (k < 1 || k > cap) throw RangeError("level must be in 1.." + std::to_string(cap) + " (use --force above 24)");
}

LaverTable cached_table(unsigned k, const Config& c, bool* built = nullptr) {
    check_level(k, c);
    TableCache cache(c.cache_dir);
    return cache.get(k, c.force, built);
}

std::pair<std::uint32_t, Index> parse_assignment(const std::string& s) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw Error("assignment must look like g=i: " + s);
    Term g = parse_term(s.substr(0, eq));
    if (!g.is_leaf()) throw Error("assignment needs a generator name: " + s);
    return {g.var_index(), static_cast<Index>(std::stoul(s.substr(eq + 1)))};
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Config cfg;
    cfg.cache_dir = default_cache_dir();
    std::string cache_dir, output = "text";
    bool json_flag = false;

    CLI::App app{"Finite left-distributive tables, term order decisions and braid brackets"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--cache-dir", cache_dir, "table cache directory (else LDLAB_CACHE, else platform default)");
    app.add_option("--max-k", cfg.max_k, "largest table level used by searches")->capture_default_str();
    app.add_option("--fuel", cfg.fuel, "step budget for order decisions")->capture_default_str();
    app.add_option("--output", output, "text or json")->check(CLI::IsMember({"text", "json"}));
    app.add_flag("--json", json_flag, "same as --output json");
    app.add_option("--seed", cfg.seed, "seed for sampled verification")->capture_default_str();
    app.add_flag("--force", cfg.force, "allow levels above 24");

    std::function<Reply()> action;
    auto sub = [](CLI::App* parent, const std::string& name, const std::string& desc) {
        auto* s = parent->add_subcommand(name, desc);
        s->fallthrough();
        return s;
    };

    unsigned k = 0;
    Index m = 0;
    std::string e1, e2, path;
    std::vector<std::string> assigns, rest;
    bool csv = false, exhaustive = false;
    std::uint64_t samples = 0, count = 0;

    // ---------------------------------------------------------------- table
    auto* table = sub(&app, "table", "Laver tables");
    table->require_subcommand(1);
    auto* tbuild = sub(table, "build", "build and cache a table");
    tbuild->add_option("K", k)->required();
    tbuild->callback([&] {
        action = [&] {
            bool built = false;
            LaverTable t = cached_table(k, cfg, &built);
            Reply r;
            r.verdict = built ? "built" : "loaded";
            TableCache cache(cfg.cache_dir);
            r.certificate = json{{"level", k}, {"elements", t.order()}, {"stored_cells", t.stored_cells()},
                                 {"path", cache.path_for(k).string()}};
            std::ostringstream os;
            os << "level " << k << ": " << t.order() << " elements, " << t.stored_cells() << " stored cells, "
               << r.verdict << " (" << cache.path_for(k).string() << ")";
            r.text = os.str();
            return r;
        };
    });
    auto* tshow = sub(table, "show", "print a table");
    tshow->add_option("K", k)->required();
    tshow->add_flag("--csv", csv, "CSV with header m,n,value");
    tshow->callback([&] {
        action = [&] {
            LaverTable t = cached_table(k, cfg);
            Reply r;
            r.verdict = "ok";
            std::ostringstream os;
            if (csv) {
                write_csv(t, os);
                r.text = os.str();
                if (!r.text.empty() && r.text.back() == '\n') r.text.pop_back();
                r.certificate = json{{"csv", r.text}};
                return r;
            }
            json rows = json::array();
            for (Index i = 1; i < t.order(); ++i) {
                std::vector<Index> vals(t.row(i), t.row(i) + t.period(i));
                rows.push_back(json{{"m", i}, {"period", t.period(i)}, {"values", vals}});
                os << i << " (p=" << t.period(i) << "):";
                for (Index v : vals) os << ' ' << v;
                if (i + 1 < t.order()) os << '\n';
            }
            r.certificate = json{{"level", k}, {"rows", rows}};
            r.text = os.str();
            return r;
        };
    });
    auto* tperiod = sub(table, "period", "row period p_m");
    tperiod->add_option("K", k)->required();
    tperiod->add_option("M", m)->required();
    tperiod->callback([&] {
        action = [&] {
            LaverTable t = cached_table(k, cfg);
            Reply r;
            r.verdict = std::to_string(t.period(m));
            r.text = r.verdict;
            r.certificate = json{{"level", k}, {"m", m}, {"period", t.period(m)}};
            return r;
        };
    });
    auto* tverify = sub(table, "verify", "check the left distributive and composition laws");
    tverify->add_option("K", k)->required();
    auto* ex_flag = tverify->add_flag("--exhaustive", exhaustive, "all triples");
    tverify->add_option("--sample", samples, "number of sampled triples")->excludes(ex_flag);
    tverify->callback([&] {
        action = [&] {
            LaverTable t = cached_table(k, cfg);
            bool full = exhaustive || (samples == 0 && k <= exhaustive_law_cap);
            LawReport rep = full ? verify_laws(t, VerifyMode::all(), cfg.force)
                                 : verify_laws(t, VerifyMode::sample(samples ? samples : 100'000, cfg.seed));
            Reply r;
            r.verdict = rep.ok() ? "ok" : "violations";
            json v = json::array();
            for (const auto& x : rep.violations)
                v.push_back(json{{"law", law_name(x.law)}, {"a", x.a}, {"b", x.b}, {"c", x.c}});
            r.certificate = json{{"level", k}, {"mode", full ? "exhaustive" : "sample"}, {"triples", rep.triples},
                                 {"violations", rep.violation_count}, {"examples", v}};
            std::ostringstream os;
            os << r.verdict << ": level " << k << ", " << rep.triples << " triples ("
               << (full ? "exhaustive" : "sampled") << "), " << rep.violation_count << " violations";
            for (const auto& x : rep.violations)
                os << "\n  " << law_name(x.law) << " fails at a=" << x.a << " b=" << x.b << " c=" << x.c;
            r.text = os.str();
            r.status = rep.ok() ? exit_ok : exit_error;
            return r;
        };
    });
    auto* texport = sub(table, "export", "write a table in the binary format");
    texport->add_option("K", k)->required();
    texport->add_option("PATH", path)->required();
    texport->callback([&] {
        action = [&] {
            LaverTable t = cached_table(k, cfg);
            save_table(t, path);
            Reply r;
            r.verdict = "ok";
            r.certificate = json{{"level", k}, {"path", path}};
            r.text = "wrote level " + std::to_string(k) + " to " + path;
            return r;
        };
    });
    auto* timport = sub(table, "import", "read and check a table file");
    timport->add_option("PATH", path)->required();
    timport->callback([&] {
        action = [&] {
            LaverTable t = load_table(path);
            LawReport rep = t.level() <= exhaustive_law_cap ? verify_laws(t)
                                                             : verify_laws(t, VerifyMode::sample(10'000, cfg.seed));
            bool same = t == build_table(t.level(), true);
            Reply r;
            r.verdict = rep.ok() && same ? "ok" : "mismatch";
            r.certificate = json{{"level", t.level()}, {"laws_ok", rep.ok()}, {"matches_rebuild", same}};
            r.text = r.verdict + ": level " + std::to_string(t.level()) + (same ? ", matches rebuild" : ", differs from rebuild") +
                     (rep.ok() ? ", laws hold" : ", law violations");
            r.status = rep.ok() && same ? exit_ok : exit_error;
            return r;
        };
    });

    // ---------------------------------------------------------------- term
    auto* term = sub(&app, "term", "term decisions");
    term->require_subcommand(1);
    auto* teval = sub(term, "eval", "evaluate in (2^K, *, o)");
    teval->add_option("K", k)->required();
    teval->add_option("EXPR", e1)->required();
    teval->add_option("--assign", assigns, "generator assignment g=i (default x=1)");
    teval->callback([&] {
        action = [&] {
            LaverTable t = cached_table(k, cfg);
            Assignment a{{0, 1}};
            for (const auto& s : assigns) {
                auto [g, i] = parse_assignment(s);
                a[g] = i;
            }
            Index v = eval_term(t, parse_term(e1), a);
            Reply r;
            r.verdict = std::to_string(v);
            r.text = r.verdict;
            r.certificate = json{{"level", k}, {"value", v}};
            r.witness_level = k;
            return r;
        };
    });
    auto* tequiv = sub(term, "equiv", "decide equivalence");
    tequiv->add_option("EXPR1", e1)->required();
    tequiv->add_option("EXPR2", e2)->required();
    tequiv->callback([&] {
        action = [&] {
            Term u = parse_term(e1), v = parse_term(e2);
            EquivVerdict d = decide_equiv(u, v, fuel_of(cfg));
            Reply r;
            r.verdict = equiv_name(d.kind);
            json c{{"method", d.method}};
            if (d.expansion) c["expansion"] = expansion_json(*d.expansion);
            if (d.witness_level) {
                c["residues"] = {d.residue_u, d.residue_v};
                r.witness_level = d.witness_level;
            }
            if (d.order) c["order"] = relation_name(*d.order);
            r.certificate = c;
            r.text = r.verdict;
            if (d.kind == EquivKind::inequivalent && d.witness_level)
                r.text += " (level " + std::to_string(d.witness_level) + ": " + std::to_string(d.residue_u) +
                          " vs " + std::to_string(d.residue_v) + ")";
            if (d.kind == EquivKind::exhausted) r.status = exit_exhausted;
            return r;
        };
    });
    auto* tcompare = sub(term, "compare", "decide the left-division order");
    tcompare->add_option("EXPR1", e1)->required();
    tcompare->add_option("EXPR2", e2)->required();
    tcompare->callback([&] {
        action = [&] {
            auto res = compare(parse_term(e1), parse_term(e2), fuel_of(cfg));
            if (!res) return exhausted_reply(res.exhausted());
            Reply r;
            r.verdict = relation_name(res->relation);
            r.text = r.verdict;
            json c = json::object();
            if (res->representation) c["representation"] = representation_json(*res->representation);
            if (res->expansion) c["expansion"] = expansion_json(*res->expansion);
            r.certificate = c;
            return r;
        };
    });
    auto* tpren = sub(term, "prenormal", "U-prenormal sequence of V");
    tpren->add_option("U", e1)->required();
    tpren->add_option("V", e2)->required();
    tpren->callback([&] {
        action = [&] {
            auto res = prenormal_decompose(parse_term(e1), parse_term(e2), fuel_of(cfg));
            if (!res) return exhausted_reply(res.exhausted());
            Reply r;
            r.verdict = "ok";
            r.text = sequence_text(*res);
            r.certificate = sequence_json(*res);
            return r;
        };
    });
    auto* ttree = sub(term, "tree", "U-division tree of V");
    ttree->add_option("U", e1)->required();
    ttree->add_option("V", e2)->required();
    ttree->callback([&] {
        action = [&] {
            auto res = division_tree(parse_term(e1), parse_term(e2), fuel_of(cfg));
            if (!res) return exhausted_reply(res.exhausted());
            Reply r;
            r.verdict = "ok";
            std::ostringstream os;
            tree_text(*res, 0, 0, os);
            r.text = os.str();
            r.text.pop_back();
            r.certificate = tree_json(*res, 0);
            return r;
        };
    });
    auto* tsigma = sub(term, "sigma", "composition factors");
    tsigma->add_option("EXPR", e1)->required();
    tsigma->callback([&] {
        action = [&] {
            auto d = sigma_decompose(parse_term(e1));
            Reply r;
            r.verdict = std::to_string(d.length());
            json f = json::array();
            std::string text;
            for (const auto& t : d.factors) {
                f.push_back(term_json(t));
                text += (text.empty() ? "" : ", ") + render_term(t);
            }
            r.certificate = json{{"factors", f}, {"length", d.length()}};
            r.text = "[" + text + "] c=" + r.verdict;
            return r;
        };
    });

    // ---------------------------------------------------------------- crit
    auto* crit = sub(&app, "crit", "critical point indices");
    crit->require_subcommand(1);
    auto* cindex = sub(crit, "index", "gamma index of a term");
    cindex->add_option("EXPR", e1)->required();
    cindex->callback([&] {
        action = [&] {
            auto c = crit_index(parse_term(e1), cfg.max_k);
            if (!c) return exhausted_reply(c.exhausted());
            Reply r;
            r.verdict = std::to_string(c->gamma_index);
            r.text = r.verdict;
            r.witness_level = c->witness_level;
            r.certificate = json{{"gamma_index", c->gamma_index}, {"residue", c->residue}};
            return r;
        };
    });
    auto* ccompare = sub(crit, "compare", "compare gamma indices");
    ccompare->add_option("EXPR1", e1)->required();
    ccompare->add_option("EXPR2", e2)->required();
    ccompare->callback([&] {
        action = [&] {
            auto a = crit_index(parse_term(e1), cfg.max_k);
            auto b = crit_index(parse_term(e2), cfg.max_k);
            if (!a) return exhausted_reply(a.exhausted());
            if (!b) return exhausted_reply(b.exhausted());
            Relation rel = a->gamma_index < b->gamma_index   ? Relation::less
                           : a->gamma_index > b->gamma_index ? Relation::greater
                                                             : Relation::equal;
            Reply r;
            r.verdict = relation_name(rel);
            r.text = r.verdict;
            r.witness_level = std::max(a->witness_level, b->witness_level);
            r.certificate = json{{"gamma_indices", {a->gamma_index, b->gamma_index}},
                                 {"residues", {a->residue, b->residue}},
                                 {"levels", {a->witness_level, b->witness_level}}};
            return r;
        };
    });
    auto number_cmd = [&](const std::string& name, const std::string& desc,
                          std::function<Outcome<unsigned>(std::uint64_t)> fn) {
        auto* c = sub(crit, name, desc);
        c->add_option("N", count)->required();
        c->callback([&, fn] {
            action = [&, fn] {
                auto v = fn(count);
                if (!v) return exhausted_reply(v.exhausted());
                Reply r;
                r.verdict = std::to_string(*v);
                r.text = r.verdict;
                r.certificate = json{{"value", *v}, {"max_k", cfg.max_k}};
                return r;
            };
        });
    };
    number_cmd("kappa", "kappa index", [&](std::uint64_t n) { return kappa_index(unsigned(n), cfg.max_k); });
    number_cmd("f", "number of gamma indices strictly between consecutive kappas",
               [&](std::uint64_t n) { return f_count(unsigned(n), cfg.max_k); });
    number_cmd("mink", "least level with 1 * I nonzero", [&](std::uint64_t n) { return min_k_nonzero(n, cfg.max_k); });

    // ---------------------------------------------------------------- braid
    auto* braid = sub(&app, "braid", "braid words");
    braid->require_subcommand(1);
    auto* balpha = sub(braid, "alpha", "braid word of a term");
    balpha->add_option("EXPR", e1)->required();
    balpha->callback([&] {
        action = [&] {
            BraidWord w = alpha_of(parse_term(e1));
            Reply r;
            r.verdict = render_braid(w);
            r.text = r.verdict;
            r.certificate = json{{"length", w.length()}};
            return r;
        };
    });
    auto* bact = sub(braid, "act", "act on a sequence of terms");
    bact->add_option("WORD", e1)->required();
    bact->add_option("TERMS", rest);
    bact->callback([&] {
        action = [&] {
            TermSequence s;
            for (const auto& t : rest) {
                std::size_t a = 0;
                while (a <= t.size()) {
                    std::size_t b = std::min(t.find(',', a), t.size());
                    if (b > a) s.entries.push_back(parse_term(t.substr(a, b - a)));
                    a = b + 1;
                }
            }
            ActResult a = act(parse_braid(e1), s, fuel_of(cfg));
            Reply r;
            if (a.status != ActStatus::defined) {
                r.verdict = act_status_name(a.status);
                r.text = r.verdict + " at letter " + std::to_string(a.failed_letter + 1);
                r.certificate = json{{"failed_letter", a.failed_letter + 1}};
                r.status = exit_exhausted;
                return r;
            }
            r.verdict = "defined";
            r.text = sequence_text(a.sequence);
            r.certificate = json{{"sequence", term_sequence_json(a.sequence)}};
            return r;
        };
    });
    auto* bbracket = sub(braid, "bracket", "W1[W2]");
    bbracket->add_option("W1", e1)->required();
    bbracket->add_option("W2", e2)->required();
    bbracket->callback([&] {
        action = [&] {
            BraidWord w = bracket(parse_braid(e1), parse_braid(e2));
            Reply r;
            r.verdict = render_braid(w);
            r.text = r.verdict;
            r.certificate = json{{"length", w.length()}};
            return r;
        };
    });

    // ---------------------------------------------------------------- bench, verify
    auto* bench = sub(&app, "bench", "timings");
    bench->require_subcommand(1);
    auto* btable = sub(bench, "table", "table build time");
    btable->add_option("K", k)->required();
    btable->callback([&] {
        action = [&] {
            check_level(k, cfg);
            auto t0 = std::chrono::steady_clock::now();
            LaverTable t = build_table(k, cfg.force);
            double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            Reply r;
            r.verdict = "ok";
            std::uint64_t bytes = encode_table(t).size();
            r.certificate = json{{"level", k}, {"build_ms", ms}, {"stored_cells", t.stored_cells()},
                                 {"file_bytes", bytes}};
            std::ostringstream os;
            os << "level " << k << ": built in " << std::fixed << std::setprecision(1) << ms << " ms, "
               << t.stored_cells() << " stored cells, " << bytes << " bytes on disk";
            r.text = os.str();
            return r;
        };
    });
    auto* verify = sub(&app, "verify", "invariant sweeps");
    verify->require_subcommand(1);
    auto* vall = sub(verify, "all", "run every invariant check");
    vall->callback([&] {
        action = [&] {
            std::ostringstream os;
            bool ok = verify_all(cfg, os);
            Reply r;
            r.verdict = ok ? "ok" : "failed";
            r.text = os.str();
            if (!r.text.empty() && r.text.back() == '\n') r.text.pop_back();
            r.certificate = json{{"report", r.text}};
            r.status = ok ? exit_ok : exit_error;
            return r;
        };
    });

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_error;
    }
    if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
    if (json_flag) output = "json";
    cfg.output = output == "json" ? Output::json : Output::text;
    if (cfg.max_k > max_level && !cfg.force) {
        err << "error: --max-k above " << max_level << " needs --force\n";
        return exit_error;
    }
    if (!action) {
        err << "error: no command\n";
        return exit_error;
    }
    auto t0 = std::chrono::steady_clock::now();
    Reply r;
    try {
        r = action();
    } catch (const SyntaxError& e) {
        err << "syntax error: " << e.what() << '\n';
        return exit_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_error;
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (cfg.output == Output::json) {
        json j{{"verdict", r.verdict},
               {"certificate", r.certificate},
               {"witness_level", r.witness_level ? json(*r.witness_level) : json(nullptr)},
               {"timings", {{"total_ms", ms}}}};
        out << j.dump() << '\n';
    } else {
        out << r.text << '\n';
    }
    return r.status;
}

} // namespace ldlab::cli

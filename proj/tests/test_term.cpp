#include <gtest/gtest.h>

#include <random>

#include <ldlab/ldlab.hpp>

using namespace ldlab;

namespace {

Term P(const char* s) { return parse_term(s); }
const Term x = x_term;
const Term xx = Term::apply(x, x);

Term random_term(std::mt19937_64& rng, unsigned size, unsigned gens, bool compose) {
    if (size == 1) return Term::var(std::uniform_int_distribution<unsigned>(0, gens - 1)(rng));
    unsigned l = std::uniform_int_distribution<unsigned>(1, size - 1)(rng);
    Term a = random_term(rng, l, gens, compose), b = random_term(rng, size - l, gens, compose);
    if (compose && rng() % 3 == 0) return Term::compose(a, b);
    return Term::apply(a, b);
}

} // namespace

TEST(Parse, Examples) {
    EXPECT_EQ(P("x(xx)"), Term::apply(x, xx));
    EXPECT_EQ(P("xxx"), Term::apply(xx, x));
    EXPECT_EQ(P("x o x x"), Term::compose(x, xx));
    EXPECT_EQ(P("x ∘ x x"), Term::compose(x, xx));
    EXPECT_EQ(P("x*x*x"), P("xxx"));
    EXPECT_EQ(P("x o x o x"), Term::compose(x, Term::compose(x, x)));
    EXPECT_EQ(P("(x o x)x"), Term::apply(Term::compose(x, x), x));
}

TEST(Parse, Generators) {
    EXPECT_EQ(P("y"), Term::var(1));
    EXPECT_EQ(P("z"), Term::var(2));
    EXPECT_EQ(P("x0"), x);
    EXPECT_EQ(P("x1"), Term::var(1));
    EXPECT_EQ(P("x12x3"), Term::apply(Term::var(12), Term::var(3)));
    EXPECT_EQ(P("x y"), Term::apply(x, Term::var(1)));
}

TEST(Parse, SyntaxErrorsCarryPosition) {
    for (auto [text, pos] : std::vector<std::pair<const char*, std::size_t>>{
             {"", 0}, {"(x", 2}, {"x)", 1}, {"xq", 1}, {"x o", 3}, {"()", 1}, {"x**x", 2}}) {
        try {
            parse_term(text);
            ADD_FAILURE() << "accepted " << text;
        } catch (const SyntaxError& e) {
            EXPECT_EQ(e.position, pos) << text;
        }
    }
}

TEST(Render, Examples) {
    EXPECT_EQ(render_term(Term::apply(xx, x)), "xxx");
    EXPECT_EQ(render_term(Term::apply(x, xx)), "x(xx)");
    EXPECT_EQ(render_term(Term::compose(x, x)), "x∘x");
    EXPECT_EQ(render_term(Term::compose(Term::compose(x, x), x)), "(x∘x)∘x");
    EXPECT_EQ(render_term(Term::apply(Term::compose(x, x), x)), "(x∘x)x");
    EXPECT_EQ(render_term(Term::apply(x, Term::var(7))), "xx7");
    EXPECT_EQ(render_term(Term::apply(x, xx), Style::full_parens), "(x*(x*x))");
}

TEST(Render, RoundTripExhaustive) {
    for (unsigned n = 1; n <= 5; ++n)
        for (const auto& t : all_p_terms(n)) {
            EXPECT_EQ(parse_term(render_term(t, Style::full_parens)), t);
            EXPECT_EQ(parse_term(render_term(t)), t);
        }
}

TEST(Render, RoundTripRandomMultiGenerator) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        Term t = random_term(rng, 1 + unsigned(rng() % 12), 5, true);
        EXPECT_EQ(parse_term(render_term(t, Style::full_parens)), t);
        EXPECT_EQ(parse_term(render_term(t)), t);
    }
}

TEST(Term, StructuralEquality) {
    EXPECT_EQ(P("x(xx)"), P("x(xx)"));
    EXPECT_NE(P("x(xx)"), P("(xx)(xx)"));
    EXPECT_NE(P("xx"), P("x o x"));
    EXPECT_NE(x, Term::var(1));
    EXPECT_EQ(P("x(xx)").size(), 3u);
    EXPECT_TRUE(P("x(xx)").compose_free());
    EXPECT_FALSE(P("x(x o x)").compose_free());
}

TEST(Iterate, Examples) {
    EXPECT_EQ(iterate(x, 0), x);
    EXPECT_EQ(iterate(x, 1), xx);
    EXPECT_EQ(iterate(x, 2), Term::apply(xx, xx));
    for (unsigned n = 0; n <= 19; ++n) EXPECT_EQ(iterate(x, n).size(), std::uint64_t(1) << n);
    EXPECT_EQ(iterate(xx, 3).size(), 16u);
}

TEST(Iterate, SizeCap) {
    EXPECT_NO_THROW(iterate(x, 19));
    EXPECT_THROW(iterate(x, 20), ResourceError);
    EXPECT_NO_THROW(iterate(x, 20, std::uint64_t(1) << 20));
    EXPECT_THROW(iterate(xx, 8, 256), ResourceError);
}

TEST(IteratePair, Examples) {
    Term j = Term::var(0), k = Term::var(1);
    EXPECT_EQ(iterate_pair(0), k);
    EXPECT_EQ(iterate_pair(1), j);
    EXPECT_EQ(iterate_pair(2), Term::apply(j, k));
    EXPECT_EQ(iterate_pair(3), Term::apply(Term::apply(j, k), j));
    EXPECT_EQ(iterate_pair(4), Term::apply(Term::apply(Term::apply(j, k), j), Term::apply(j, k)));
    // sizes follow Fibonacci
    std::uint64_t a = 1, b = 1;
    for (unsigned n = 2; n <= 25; ++n) {
        std::uint64_t c = a + b;
        a = b;
        b = c;
        EXPECT_EQ(iterate_pair(n).size(), b);
    }
}

TEST(Sigma, Examples) {
    auto f = sigma_decompose(P("x o (x o x)")).factors;
    EXPECT_EQ(f, (std::vector<Term>{x, x, x}));
    EXPECT_EQ(sigma_decompose(P("(x o x)x")).factors, (std::vector<Term>{P("x(xx)")}));
    EXPECT_EQ(sigma_decompose(P("x(x o x)")).factors, (std::vector<Term>{xx, xx}));
    EXPECT_EQ(sigma_decompose(P("(x o x) o x")).length(), 3u);
}

TEST(Sigma, ATermIsItsOwnFactor) {
    for (unsigned n = 1; n <= 6; ++n)
        for (const auto& t : all_a_terms(n)) {
            auto d = sigma_decompose(t);
            ASSERT_EQ(d.length(), 1u);
            EXPECT_EQ(d.factors[0], t);
        }
}

TEST(Sigma, FactorsComposeFreeAndEquivalentInTables) {
    std::vector<LaverTable> tables;
    for (unsigned k = 1; k <= 5; ++k) tables.push_back(build_table(k));
    for (unsigned n = 1; n <= 5; ++n)
        for (const auto& t : all_p_terms(n)) {
            auto d = sigma_decompose(t);
            for (const auto& f : d.factors) EXPECT_TRUE(f.compose_free());
            Term back = compose_all(d.factors);
            for (const auto& tab : tables)
                for (Index i = 0; i < tab.order(); ++i)
                    EXPECT_EQ(eval_term(tab, back, {{0, i}}), eval_term(tab, t, {{0, i}})) << render_term(t);
        }
}

TEST(Sigma, SizeCap) {
    Term t = P("(x o x o x o x)(x o x o x o x)");
    EXPECT_EQ(sigma_decompose(t).length(), 4u);
    EXPECT_THROW(sigma_decompose(t, 8), ResourceError);
}

TEST(Enumerate, Counts) {
    // Catalan numbers, and 2^(n-1) Catalan for two operations
    unsigned cat[] = {1, 1, 2, 5, 14, 42, 132};
    for (unsigned n = 1; n <= 7; ++n) {
        EXPECT_EQ(all_a_terms(n).size(), cat[n - 1]);
        EXPECT_EQ(all_p_terms(n).size(), cat[n - 1] << (n - 1));
    }
}

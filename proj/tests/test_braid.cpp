#include <gtest/gtest.h>

#include <ldlab/ldlab.hpp>

using namespace ldlab;

namespace {

Term P(const char* s) { return parse_term(s); }
BraidWord B(const char* s) { return parse_braid(s); }
const Term x = x_term;

bool seq_equiv(OrderEngine& eng, const TermSequence& a, const TermSequence& b) {
    std::size_t n = std::max(a.entries.size(), b.entries.size());
    for (std::size_t i = 0; i < n; ++i)
        if (!eng.equivalent(a.at(i), b.at(i))) return false;
    return true;
}

std::vector<TermSequence> small_sequences() {
    std::vector<TermSequence> out;
    auto ts = a_terms_up_to(3);
    for (const auto& a : ts)
        for (const auto& b : ts)
            for (const auto& c : ts) out.push_back(TermSequence{{a, b, c}});
    return out;
}

} // namespace

TEST(Words, ParseRender) {
    EXPECT_EQ(B("s2 s1"), concat(sigma(2), sigma(1)));
    EXPECT_EQ(B("S1"), sigma(1, -1));
    EXPECT_EQ(B("s1,S3"), concat(sigma(1), sigma(3, -1)));
    EXPECT_TRUE(B("e").letters.empty());
    EXPECT_TRUE(B("").letters.empty());
    EXPECT_EQ(render_braid(B("s2 S1")), "s2 S1");
    EXPECT_EQ(render_braid(BraidWord{}), "e");
    EXPECT_THROW(B("s0"), SyntaxError);
    EXPECT_THROW(B("t1"), SyntaxError);
    EXPECT_THROW(B("s"), SyntaxError);
}

TEST(Words, FreeReduce) {
    EXPECT_TRUE(free_reduce(B("s1 S1")).letters.empty());
    EXPECT_EQ(free_reduce(B("s1 s2 S2 s1")), B("s1 s1"));
    EXPECT_TRUE(free_reduce(BraidWord{}).letters.empty());
    EXPECT_EQ(free_reduce(B("s1 s2 S1")), B("s1 s2 S1"));
    EXPECT_TRUE(free_reduce(B("s3 s1 S1 S3")).letters.empty());
}

TEST(Words, ShiftInverse) {
    EXPECT_EQ(shift(B("s1")), B("s2"));
    EXPECT_EQ(shift(B("s1 S3")), B("s2 S4"));
    EXPECT_TRUE(shift(BraidWord{}).letters.empty());
    EXPECT_EQ(inverse(B("s1 S2 s3")), B("S3 s2 S1"));
    EXPECT_TRUE(free_reduce(concat(B("s1 S2 s3"), inverse(B("s1 S2 s3")))).letters.empty());
}

TEST(Bracket, Examples) {
    EXPECT_EQ(bracket(BraidWord{}, BraidWord{}), B("s1"));
    EXPECT_EQ(bracket(B("s1"), BraidWord{}), B("s1 s1 S2"));
    EXPECT_EQ(bracket(BraidWord{}, B("s1")), B("s2 s1"));
}

TEST(Alpha, Examples) {
    EXPECT_TRUE(alpha_of(x).letters.empty());
    EXPECT_EQ(alpha_of(P("xx")), B("s1"));
    EXPECT_EQ(alpha_of(P("x(xx)")), B("s2 s1"));
    EXPECT_EQ(alpha_of(P("xxx")), B("s1 s1 S2"));
    EXPECT_THROW(alpha_of(P("x o x")), PreconditionError);
    EXPECT_THROW(alpha_of(P("xy")), PreconditionError);
}

TEST(Act, Examples) {
    auto a = act(B("s2 s1"), TermSequence{{x, x, x}});
    ASSERT_EQ(a.status, ActStatus::defined);
    EXPECT_EQ(a.sequence.at(0), P("x(xx)"));
    EXPECT_EQ(a.sequence.at(1), x);
    EXPECT_EQ(a.sequence.at(2), x);

    auto b = act(B("S1"), TermSequence{{P("xx"), x}});
    ASSERT_EQ(b.status, ActStatus::defined);
    EXPECT_EQ(b.sequence.at(0), x);
    EXPECT_EQ(b.sequence.at(1), x);

    auto c = act(B("S1"), TermSequence{{x, P("xx")}});
    EXPECT_EQ(c.status, ActStatus::undefined);
    EXPECT_EQ(c.failed_letter, 0u);

    auto d = act(B("s2"), TermSequence{});
    EXPECT_EQ(d.sequence.at(1), P("xx"));
}

TEST(Act, Coherence) {
    OrderEngine eng;
    for (const auto& b : a_terms_up_to(5)) {
        auto r = act(alpha_of(b), TermSequence{}, eng);
        ASSERT_EQ(r.status, ActStatus::defined) << render_term(b);
        EXPECT_TRUE(eng.equivalent(r.sequence.at(0), b)) << render_term(b);
        for (std::size_t i = 1; i < r.sequence.entries.size() + 2; ++i) EXPECT_TRUE(eng.equivalent(r.sequence.at(i), x));
    }
}

TEST(Act, HomomorphismShadow) {
    OrderEngine eng;
    auto ts = a_terms_up_to(4);
    for (const auto& b : ts)
        for (const auto& c : ts) {
            auto p = act(alpha_of(Term::apply(b, c)), TermSequence{}, eng);
            auto q = act(bracket(alpha_of(b), alpha_of(c)), TermSequence{}, eng);
            ASSERT_EQ(p.status, ActStatus::defined);
            ASSERT_EQ(q.status, ActStatus::defined);
            EXPECT_TRUE(seq_equiv(eng, p.sequence, q.sequence));
        }
}

TEST(Act, BraidRelations) {
    OrderEngine eng;
    auto seqs = small_sequences();
    for (unsigned i = 1; i <= 2; ++i) {
        BraidWord l = concat(concat(sigma(i), sigma(i + 1)), sigma(i));
        BraidWord r = concat(concat(sigma(i + 1), sigma(i)), sigma(i + 1));
        for (const auto& s : seqs) {
            auto a = act(l, s, eng), b = act(r, s, eng);
            ASSERT_EQ(a.status, ActStatus::defined);
            ASSERT_EQ(b.status, ActStatus::defined);
            EXPECT_TRUE(seq_equiv(eng, a.sequence, b.sequence));
        }
    }
    for (const auto& s : seqs) {
        auto a = act(concat(sigma(1), sigma(3)), s, eng), b = act(concat(sigma(3), sigma(1)), s, eng);
        EXPECT_TRUE(seq_equiv(eng, a.sequence, b.sequence));
    }
}

TEST(Act, InverseRelations) {
    OrderEngine eng;
    auto seqs = small_sequences();
    BraidWord l = B("S1 S2 S1"), r = B("S2 S1 S2");
    std::size_t both = 0;
    for (const auto& s : seqs) {
        auto a = act(l, s, eng), b = act(r, s, eng);
        ASSERT_NE(a.status, ActStatus::exhausted);
        ASSERT_NE(b.status, ActStatus::exhausted);
        if (a.status == ActStatus::defined && b.status == ActStatus::defined) {
            ++both;
            EXPECT_TRUE(seq_equiv(eng, a.sequence, b.sequence));
        }
    }
    EXPECT_GT(both, 0u);
}

TEST(Act, WordTimesInverse) {
    OrderEngine eng;
    std::vector<BraidWord> words{B("s1"), B("s2 s1"), B("s1 s1 S2"), B("s1 s2 s1"), B("s3 s1 s2")};
    std::size_t defined = 0;
    for (const auto& s : small_sequences())
        for (const auto& w : words) {
            auto a = act(concat(w, inverse(w)), s, eng);
            ASSERT_NE(a.status, ActStatus::exhausted);
            if (a.status != ActStatus::defined) continue;
            ++defined;
            EXPECT_TRUE(seq_equiv(eng, a.sequence, s));
        }
    // positive words followed by their inverse are always defined
    for (const auto& s : small_sequences()) {
        auto a = act(B("s1 s2 s1 S1 S2 S1"), s, eng);
        ASSERT_EQ(a.status, ActStatus::defined);
        EXPECT_TRUE(seq_equiv(eng, a.sequence, s));
    }
    EXPECT_GT(defined, 0u);
}

TEST(Closure, Examples) {
    auto one = closure_sample(BraidWord{}, 1);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_TRUE(one[0].word.letters.empty());

    auto two = closure_sample(BraidWord{}, 2);
    ASSERT_EQ(two.size(), 2u);

    auto three = closure_sample(BraidWord{}, 3);
    std::set<BraidWord> words;
    for (const auto& c : three) words.insert(c.word);
    EXPECT_TRUE(words.count(B("s2 s1")));
    EXPECT_TRUE(words.count(B("s1 s1 S2")));
    for (const auto& c : three) EXPECT_EQ(c.word, alpha_of(c.shape));

    EXPECT_THROW(closure_sample(BraidWord{}, 9, 100), ResourceError);
}

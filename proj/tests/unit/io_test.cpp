#include <gtest/gtest.h>

#include <random>

#include "support/support.hpp"

using namespace ultrashift;
using support::fixture;
using support::spec;

namespace {

const char* kFixtures[] = {"fanout.ug", "twoloops.ug", "infloops.ug", "cycle2.ug",
                           "loopcycle.ug", "pumped.ug",   "ladder.ug"};

Diagnostic firstDiagnostic(const std::string& text) {
    auto p = parseUltragraph(text);
    EXPECT_FALSE(p.ok());
    if (p.diagnostics.empty()) return {};
    return p.diagnostics.front();
}

/// Random presentations that are valid by construction: every vertex family has
/// an identity-sourced edge family, so no vertex is a sink.
std::string randomPresentation(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> fams(1, 3), small(0, 4), coef(0, 3), pick(0, 9);
    int m = fams(rng);
    std::vector<std::string> names;
    std::string out;
    for (int i = 0; i < m; ++i) {
        names.push_back("w" + std::to_string(i));
        out += "vertexfamily " + names.back() + ";\n";
    }
    auto atom = [&]() {
        const std::string& f = names[static_cast<std::size_t>(std::uniform_int_distribution<int>(0, m - 1)(rng))];
        if (pick(rng) < 3) {
            std::string guard = pick(rng) < 5 ? "j >= " + std::to_string(small(rng))
                                              : "j % 3 == " + std::to_string(small(rng) % 3);
            return "{ " + f + "[" + std::to_string(coef(rng) + 1) + "*j+" + std::to_string(small(rng)) + "] : " +
                   guard + " }";
        }
        return "{ " + f + "[" + std::to_string(coef(rng)) + "*k+" + std::to_string(small(rng)) + "] }";
    };
    auto body = [&]() {
        std::string b = atom();
        if (pick(rng) < 4) b += " + " + atom();
        return b;
    };
    for (int i = 0; i < m; ++i) {
        out += "edgefamily e" + std::to_string(i) + "(k) {\n  source " + names[static_cast<std::size_t>(i)] + "[k];\n";
        int split = pick(rng);
        if (split < 3) {
            out += "  range " + body() + ";\n";
        } else if (split < 6) {
            int t = small(rng) + 1;
            out += "  range k < " + std::to_string(t) + " => " + body() + ";\n";
            out += "  range k >= " + std::to_string(t) + " => " + body() + ";\n";
        } else {
            out += "  range k % 2 == 0 => " + body() + ";\n  range k % 2 == 1 => " + body() + ";\n";
        }
        out += "}\n";
    }
    if (pick(rng) < 3) {
        out += "edgefamily x(k) {\n  domain k % 3 == 1 or k in {0, 2};\n  source " + names[0] + "[2*k+1];\n  range " +
               body() + ";\n}\n";
    }
    if (pick(rng) < 3)
        for (const auto& n : names) out += "grading " + n + " = " + std::to_string(small(rng) - 2) + "*n - 1;\n";
    return out;
}

}  // namespace

TEST(Parse, BundledFixturesParse) {
    for (const char* f : kFixtures) EXPECT_NO_THROW(fixture(f)) << f;
}

TEST(Parse, FanoutMatchesDisplayedRules) {
    Ultragraph g = fixture("fanout.ug");
    ASSERT_EQ(g.vertexFamilies().size(), 2u);
    ASSERT_EQ(g.edgeFamilies().size(), 2u);
    for (Index k = 0; k < 30; ++k) {
        EXPECT_EQ(g.source({"e", k}), (VertexId{"u", k}));
        EXPECT_EQ(g.source({"f", k}), (VertexId{"v", k}));
    }
    VertexSet evens = g.range({"e", 0});
    for (Index n = 0; n < 60; ++n) EXPECT_EQ(evens.contains({"u", n}), n >= 2 && n % 2 == 0) << n;
    EXPECT_FALSE(evens.isFinite());
    for (Index k = 1; k < 30; ++k) EXPECT_EQ(g.range({"e", k}), VertexSet::singleton({"u", k + 1}));
    EXPECT_EQ(g.range({"f", 0}), VertexSet::fromMembers({{"v", 1}, {"v", 2}, {"u", 1}}));
    for (Index k = 1; k < 30; ++k)
        EXPECT_EQ(g.range({"f", k}), VertexSet::fromMembers({{"v", 2 * k + 1}, {"v", 2 * k + 2}}));
}

TEST(Parse, TwoLoopFixture) {
    Ultragraph g = fixture("twoloops.ug");
    ASSERT_EQ(g.vertexFamilies().size(), 1u);
    EXPECT_EQ(g.vertexFamilies()[0].domain, IndexSet::singleton(0));
    EXPECT_EQ(g.allEdges().members().size(), 2u);
    EXPECT_TRUE(g.isFinite());
}

TEST(Parse, SinkIsDiagnosedWithPosition) {
    Diagnostic d = firstDiagnostic(support::readFile(support::fixturePath("sink.ug")));
    EXPECT_EQ(d.code, codes::kSink);
    EXPECT_EQ(d.line, 2);
    EXPECT_GT(d.column, 0);
    EXPECT_NE(d.message.find("u[0]"), std::string::npos);
}

TEST(Parse, NonAffineRuleIsDiagnosed) {
    Diagnostic d = firstDiagnostic(support::readFile(support::fixturePath("nonaffine.ug")));
    EXPECT_EQ(d.code, codes::kNonAffine);
    EXPECT_EQ(d.line, 5);
    EXPECT_EQ(firstDiagnostic("vertexfamily u;\nedgefamily e(k) { source u[k]; range { u[j+1] }; }").code,
              codes::kNonAffine);
    EXPECT_EQ(firstDiagnostic("vertexfamily u;\nedgefamily e(k) { source u[k]; range { u[k-1] }; }").code,
              codes::kDomain);
}

TEST(Parse, GuardOverlapAndCover) {
    auto overlap = parseUltragraph(
        "vertexfamily u;\nedgefamily e(k) {\n source u[k];\n range k >= 0 => { u[k+1] };\n range k == 3 => { u[0] };\n}\n");
    ASSERT_FALSE(overlap.ok());
    EXPECT_EQ(overlap.diagnostics.front().code, codes::kGuardOverlap);
    auto gap = parseUltragraph("vertexfamily u;\nedgefamily e(k) {\n source u[k];\n range k >= 2 => { u[k+1] };\n}\n");
    ASSERT_FALSE(gap.ok());
    EXPECT_EQ(gap.diagnostics.front().code, codes::kGuardCover);
}

TEST(Parse, SyntaxErrorsCarryPositions) {
    const char* bad[] = {"vertexfamily ;", "vertexfamily u;\nedgefamily e(k) { source u[k] range { u[k] }; }",
                         "vertexfamily u;\nedgefamily e(k) { source u[k]; }", "vertexfamily u;\n$",
                         "vertexfamily u;\nedgefamily e(k) { source u[k]; range { v[k] }; }",
                         "vertexfamily u;\nvertexfamily u;\nedgefamily e(k) { source u[k]; range { u[k] }; }"};
    for (const char* text : bad) {
        auto p = parseUltragraph(text);
        ASSERT_FALSE(p.ok()) << text;
        for (const auto& d : p.diagnostics) {
            EXPECT_FALSE(d.code.empty()) << text;
            EXPECT_GT(d.line, 0) << text << " " << d.str();
            EXPECT_GT(d.column, 0) << text << " " << d.str();
        }
    }
}

TEST(RoundTrip, BundledFixtures) {
    for (const char* f : kFixtures) {
        Ultragraph g = fixture(f);
        auto again = parseUltragraph(serializeUltragraph(g));
        ASSERT_TRUE(again.ok()) << f << "\n" << serializeUltragraph(g);
        EXPECT_EQ(*again, g) << f;
        EXPECT_EQ(serializeUltragraph(*again), serializeUltragraph(g)) << f;
    }
}

TEST(RoundTrip, RandomPresentations) {
    std::mt19937_64 rng(2024);
    int checked = 0;
    while (checked < 50) {
        std::string text = randomPresentation(rng);
        auto g = parseUltragraph(text);
        ASSERT_TRUE(g.ok()) << text << "\n" << g.diagnostics.front().str();
        auto again = parseUltragraph(serializeUltragraph(*g));
        ASSERT_TRUE(again.ok()) << serializeUltragraph(*g);
        EXPECT_EQ(*again, *g) << text;
        EXPECT_EQ(again->gradingHint(), g->gradingHint());
        ++checked;
    }
}

TEST(PathSpec, FanoutPoints) {
    Ultragraph g = fixture("fanout.ug");
    ShiftPoint x = spec(g, "tail:e[0]|e@2");
    EdgePath want{{"e", 0}, {"e", 2}, {"e", 3}, {"e", 4}, {"e", 5}};
    EXPECT_EQ(realize(x, 5), want);
    ShiftPoint y = spec(g, "fin:|r(e[0])");
    ASSERT_TRUE(y.isFinite());
    EXPECT_TRUE(y.finite()->edges.empty());
    EXPECT_EQ(y.finite()->terminal, g.range({"e", 0}));
}

TEST(PathSpec, InvalidChainsAndTerminals) {
    Ultragraph g = fixture("fanout.ug");
    EXPECT_FALSE(parsePathSpec("ep:|a[0]", g).ok());
    EXPECT_EQ(parsePathSpec("tail:e[1]|e@3", g).diagnostics.front().code, codes::kPath);
    EXPECT_EQ(parsePathSpec("fin:|{u[2]}", g).diagnostics.front().code, codes::kEmitter);
    EXPECT_EQ(parsePathSpec("fin:e[1]|{u[2]}", g).diagnostics.front().code, codes::kEmitter);
    EXPECT_EQ(parsePathSpec("zz:e[1]", g).diagnostics.front().code, codes::kSyntax);
    Ultragraph cyc = fixture("cycle2.ug");
    EXPECT_FALSE(parsePathSpec("ep:|g[0]", cyc).ok());
    EXPECT_TRUE(parsePathSpec("ep:|g[0].h[0]", cyc).ok());
}

TEST(PathSpec, PrintedSpecsParseBack) {
    Ultragraph g = fixture("fanout.ug");
    for (const char* s : {"tail:e[0]|e@2", "tail:f[0]|e@1", "fin:|r(e[0])", "fin:e[0]|r(e[0])", "tail:|e@7"}) {
        ShiftPoint x = spec(g, s);
        ShiftPoint y = spec(g, pathSpecStr(x));
        EXPECT_EQ(structuralEqual(x, y), Tri::Yes) << s << " -> " << pathSpecStr(x);
    }
    Ultragraph loops = fixture("twoloops.ug");
    for (const char* s : {"ep:a[0]|b[0].a[0]", "bcode:w[0]|a[0]|b[0]|f(1,3,shift:4)", "code:w[0]|a[0]|b[0]|01~1",
                          "bcode:w[0]|a[0]|b[0]|beta(0~1;f(sel:01~1))"}) {
        ShiftPoint x = spec(loops, s);
        ShiftPoint y = spec(loops, pathSpecStr(x));
        EXPECT_EQ(realize(x, 200), realize(y, 200)) << s;
    }
}

TEST(PathSpec, BitsAndJSyntax) {
    EXPECT_EQ(parseJ("nat").at(5), 5u);
    JPresentation j = parseJ("1,3,shift:4");
    EXPECT_EQ(j.at(1), 1u);
    EXPECT_EQ(j.at(2), 3u);
    EXPECT_EQ(j.at(3), 7u);
    JPresentation p = parseJ("sel:01~1");
    EXPECT_TRUE(p.inP());
    EXPECT_EQ(p.at(1), 1u);
    EXPECT_EQ(p.at(2), 4u);
    EXPECT_EQ(p.at(3), 6u);
    EXPECT_EQ(parseJ(j.str()), j);
    EXPECT_EQ(parseJ(p.str()), p);
    EXPECT_THROW(parseJ("3,1,shift:0"), std::invalid_argument);
    EXPECT_THROW(parseBits("01"), std::invalid_argument);
    EXPECT_EQ(parseBits("1~0").at(1), true);
    EXPECT_EQ(parseBits("1~0").at(2), false);
}

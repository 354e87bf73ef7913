#include <gtest/gtest.h>

#include <random>

#include "support/support.hpp"

using namespace ultrashift;
using support::fixture;
using support::spec;

namespace {

std::vector<ShiftPoint> fanoutPool(const Ultragraph& g) {
    std::vector<std::string> specs = {"tail:e[0]|e@2", "tail:|e@1", "tail:|e@2",     "tail:|e@3",
                                      "tail:f[0]|e@1", "fin:|r(e[0])", "fin:e[0]|r(e[0])", "tail:e[0].e[2]|e@3",
                                      "tail:|e@5",     "tail:e[0]|e@4"};
    std::vector<ShiftPoint> out;
    for (const auto& s : specs) out.push_back(spec(g, s));
    return out;
}

std::vector<ShiftPoint> loopPool(const Ultragraph& g) {
    std::vector<std::string> specs = {"ep:|a[0]",
                                      "ep:|g[0].h[0]",
                                      "ep:a[0]|g[0].h[0]",
                                      "ep:g[0].h[0]|a[0]",
                                      "ep:a[0].a[0]|g[0].h[0].a[0]",
                                      "ep:|a[0].g[0].h[0]",
                                      "bcode:w[0]|a[0]|g[0].h[0]|f(nat)",
                                      "bcode:w[0]|a[0]|g[0].h[0]|f(sel:01~1)",
                                      "code:w[0]|a[0]|g[0].h[0]|f(1,3,shift:4)"};
    std::vector<ShiftPoint> out;
    for (const auto& s : specs) out.push_back(spec(g, s));
    return out;
}

bool comparable(const DistanceValue& d) { return d.kind != DistanceValue::Kind::UnknownBeyond; }

void checkAxioms(UltrapathEnumeration& en, const std::vector<ShiftPoint>& pool, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (int t = 0; t < 60; ++t) {
        const ShiftPoint& x = pool[pick(rng)];
        const ShiftPoint& y = pool[pick(rng)];
        const ShiftPoint& z = pool[pick(rng)];
        auto dxy = distance(en, x, y), dyx = distance(en, y, x);
        auto dxz = distance(en, x, z), dyz = distance(en, y, z);
        EXPECT_TRUE(distance(en, x, x).isZero());
        EXPECT_EQ(dxy, dyx) << pathSpecStr(x) << " / " << pathSpecStr(y);
        EXPECT_EQ(dxy.isZero(), structuralEqual(x, y) == Tri::Yes);
        if (comparable(dxy) && comparable(dxz) && comparable(dyz)) {
            EXPECT_LE(dxz.value(), dxy.value() + dyz.value() + 1e-300)
                << pathSpecStr(x) << " " << pathSpecStr(y) << " " << pathSpecStr(z);
        }
    }
}

}  // namespace

TEST(Enumeration, ShellsAreOrderedAndUnique) {
    Ultragraph g = fixture("fanout.ug");
    for (auto order : {EnumerationOrder::Canonical, EnumerationOrder::ReverseWithinLength}) {
        EnumerationOptions opt;
        opt.order = order;
        UltrapathEnumeration en(g, opt);
        std::set<std::string> seen;
        for (Index L = 1; L <= 16; ++L) {
            const auto& sh = en.shell(L);
            for (std::size_t i = 0; i < sh.size(); ++i) {
                EXPECT_EQ(sh[i].key.size(), L);
                EXPECT_EQ(sh[i].key, sh[i].path.serialize());
                EXPECT_TRUE(seen.insert(sh[i].key).second) << sh[i].key;
                EXPECT_TRUE(en.contains(sh[i].path)) << sh[i].key;
                if (i > 0) {
                    EXPECT_TRUE(en.precedes(sh[i - 1].key, sh[i].key));
                }
            }
        }
        EXPECT_FALSE(seen.empty());
    }
}

TEST(Enumeration, RanksMatchListingPositions) {
    Ultragraph g = fixture("loopcycle.ug");
    UltrapathEnumeration en(g);
    auto list = en.enumerate(300);
    ASSERT_EQ(list.size(), 300u);
    for (Index i = 0; i < list.size(); ++i) {
        auto r = en.rankOf(list[i], 100000);
        ASSERT_EQ(r.status, UltrapathEnumeration::RankResult::Status::Found);
        EXPECT_EQ(r.rank, i + 1);
    }
    auto r = en.rankOf(list[299], 10);
    EXPECT_EQ(r.status, UltrapathEnumeration::RankResult::Status::Beyond);
}

TEST(Enumeration, ReverseOrderPermutesWithinLength) {
    Ultragraph g = fixture("fanout.ug");
    EnumerationOptions rev;
    rev.order = EnumerationOrder::ReverseWithinLength;
    UltrapathEnumeration a(g), b(g, rev);
    for (Index L = 1; L <= 14; ++L) {
        auto x = a.shell(L), y = b.shell(L);
        ASSERT_EQ(x.size(), y.size());
        std::reverse(y.begin(), y.end());
        for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(x[i].key, y[i].key);
    }
}

TEST(Metric, AxiomsOnFanout) {
    Ultragraph g = fixture("fanout.ug");
    UltrapathEnumeration en(g);
    checkAxioms(en, fanoutPool(g), 51);
}

TEST(Metric, AxiomsOnLoopCycle) {
    Ultragraph g = fixture("loopcycle.ug");
    UltrapathEnumeration en(g);
    checkAxioms(en, loopPool(g), 52);
}

TEST(Metric, FastDistanceMatchesScan) {
    Ultragraph g = fixture("fanout.ug");
    UltrapathEnumeration en(g);
    auto pool = fanoutPool(g);
    Ultragraph h = fixture("loopcycle.ug");
    UltrapathEnumeration hen(h);
    auto hpool = loopPool(h);
    const Index cap = 4000;
    for (std::size_t i = 0; i < pool.size(); ++i)
        for (std::size_t j = 0; j < pool.size(); ++j)
            EXPECT_EQ(distance(en, pool[i], pool[j], cap), bruteDistance(en, pool[i], pool[j], cap))
                << pathSpecStr(pool[i]) << " / " << pathSpecStr(pool[j]);
    for (std::size_t i = 0; i < hpool.size(); ++i)
        for (std::size_t j = 0; j < hpool.size(); ++j)
            EXPECT_EQ(distance(hen, hpool[i], hpool[j], cap), bruteDistance(hen, hpool[i], hpool[j], cap))
                << pathSpecStr(hpool[i]) << " / " << pathSpecStr(hpool[j]);
}

TEST(Metric, DistanceShrinksWithLongerAgreement) {
    Ultragraph g = fixture("loopcycle.ug");
    UltrapathEnumeration en(g);
    // a^n (g h)^inf against a^inf
    ShiftPoint base = spec(g, "ep:|a[0]");
    Index last = 0;
    for (int n = 1; n <= 6; ++n) {
        std::string prefix;
        for (int i = 0; i < n; ++i) prefix += i ? ".a[0]" : "a[0]";
        auto d = distance(en, spec(g, "ep:" + prefix + "|g[0].h[0]"), base);
        ASSERT_TRUE(d.isRank());
        EXPECT_GT(d.rank, last);
        last = d.rank;
    }
}

TEST(Metric, TrajectoryIsDistanceAlongTheOrbit) {
    Ultragraph g = fixture("fanout.ug");
    UltrapathEnumeration en(g);
    ShiftPoint x = spec(g, "tail:f[0]|e@1"), y = spec(g, "fin:|r(e[0])");
    auto tr = trajectory(en, x, y, 12);
    ASSERT_EQ(tr.size(), 13u);
    for (Index n = 0; n <= 12; ++n) EXPECT_EQ(tr[n], distance(en, shiftBy(x, n), shiftBy(y, n))) << n;
}

TEST(Metric, ValueRendering) {
    EXPECT_EQ(DistanceValue::zero().csvRank(), -1);
    EXPECT_EQ(DistanceValue::beyond(50).csvRank(), 0);
    EXPECT_EQ(DistanceValue::at(3).csvRank(), 3);
    EXPECT_EQ(DistanceValue::at(3).valueString(), "0.125");
    EXPECT_EQ(DistanceValue::zero().valueString(), "0");
    EXPECT_EQ(DistanceValue::at(2).str(), "2^-2");
    EXPECT_EQ(DistanceValue::at(1074).valueString(), "4.9406564584124654e-324");
    EXPECT_EQ(DistanceValue::at(1075).valueString(), "2.47032822921e-324");
    EXPECT_EQ(DistanceValue::at(3089).valueString(), "1.31323785767e-930");
}

TEST(Metric, UnknownBeyondTheRankCap) {
    Ultragraph g = fixture("loopcycle.ug");
    UltrapathEnumeration en(g);
    ShiftPoint x = spec(g, "ep:a[0].a[0].a[0].a[0].a[0].a[0].a[0].a[0]|g[0].h[0]");
    auto d = distance(en, x, spec(g, "ep:|a[0]"), 20);
    EXPECT_EQ(d.kind, DistanceValue::Kind::UnknownBeyond);
}

TEST(Convergence, FiniteLimitOnFanout) {
    Ultragraph g = fixture("fanout.ug");
    UltrapathEnumeration en(g);
    ShiftPoint limit = spec(g, "fin:e[0]|r(e[0])");
    std::vector<ShiftPoint> seq;
    for (Index n = 1; n <= 30; ++n) seq.push_back(spec(g, "tail:e[0]|e@" + std::to_string(2 * n)));
    auto rep = checkConvergence(en, seq, limit);
    EXPECT_EQ(rep.caseUsed, 'b');
    EXPECT_TRUE(rep.converges) << rep.note;
    ASSERT_TRUE(rep.distances.back().isRank());
    EXPECT_GT(rep.distances.back().rank, rep.distances.front().rank);

    std::vector<ShiftPoint> stuck(30, spec(g, "tail:e[0]|e@2"));
    auto bad = checkConvergence(en, stuck, limit);
    EXPECT_FALSE(bad.converges) << bad.note;
}

TEST(Convergence, InfiniteLimit) {
    Ultragraph g = fixture("loopcycle.ug");
    UltrapathEnumeration en(g);
    std::vector<ShiftPoint> seq;
    std::string prefix = "a[0]";
    for (int n = 1; n <= 14; ++n) {
        seq.push_back(spec(g, "ep:" + prefix + "|g[0].h[0]"));
        prefix += ".a[0]";
    }
    auto rep = checkConvergence(en, seq, spec(g, "ep:|a[0]"), 10);
    EXPECT_EQ(rep.caseUsed, 'a');
    EXPECT_TRUE(rep.converges) << rep.note;
    std::vector<ShiftPoint> alt;
    for (int n = 0; n < 14; ++n) alt.push_back(spec(g, n % 2 ? "ep:|a[0]" : "ep:|g[0].h[0]"));
    EXPECT_FALSE(checkConvergence(en, alt, spec(g, "ep:|a[0]"), 10).converges);
}

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "support/support.hpp"

using namespace ultrashift;

namespace {

constexpr Index kWindow = 400;

struct Parts {
    Index threshold;
    std::set<Index> below;
    Index period;
    std::set<Index> residues;

    bool member(Index n) const {
        if (n < threshold) return below.count(n) > 0;
        return residues.count(n % period) > 0;
    }
    IndexSet build() const {
        return IndexSet::fromParts(threshold, {below.begin(), below.end()}, period, {residues.begin(), residues.end()});
    }
};

Parts randomParts(std::mt19937_64& rng) {
    Parts p;
    p.threshold = std::uniform_int_distribution<Index>(0, 20)(rng);
    p.period = std::uniform_int_distribution<Index>(1, 6)(rng);
    std::bernoulli_distribution coin(0.4);
    for (Index n = 0; n < p.threshold; ++n)
        if (coin(rng)) p.below.insert(n);
    for (Index r = 0; r < p.period; ++r)
        if (coin(rng)) p.residues.insert(r);
    return p;
}

template <class F>
void expectWindow(const IndexSet& s, F member) {
    for (Index n = 0; n < kWindow; ++n) ASSERT_EQ(s.contains(n), member(n)) << "n=" << n << " set " << s.serialize();
}

}  // namespace

TEST(IndexSet, FactoriesMatchTheirDefinitions) {
    expectWindow(IndexSet::empty(), [](Index) { return false; });
    expectWindow(IndexSet::all(), [](Index) { return true; });
    expectWindow(IndexSet::singleton(7), [](Index n) { return n == 7; });
    expectWindow(IndexSet::atLeast(5), [](Index n) { return n >= 5; });
    expectWindow(IndexSet::interval(3, 9), [](Index n) { return n >= 3 && n < 9; });
    expectWindow(IndexSet::progression(4, 3, 2), [](Index n) { return n >= 4 && n % 3 == 2; });
    expectWindow(IndexSet::finite({9, 1, 4, 4}), [](Index n) { return n == 1 || n == 4 || n == 9; });
}

TEST(IndexSet, BooleanAlgebraAgainstPointwiseOracle) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 300; ++t) {
        Parts a = randomParts(rng), b = randomParts(rng);
        IndexSet x = a.build(), y = b.build();
        expectWindow(x, [&](Index n) { return a.member(n); });
        expectWindow(x.unite(y), [&](Index n) { return a.member(n) || b.member(n); });
        expectWindow(x.intersect(y), [&](Index n) { return a.member(n) && b.member(n); });
        expectWindow(x.minus(y), [&](Index n) { return a.member(n) && !b.member(n); });
        expectWindow(x.complement(), [&](Index n) { return !a.member(n); });

        bool subset = true;
        for (Index n = 0; n < kWindow; ++n) subset &= !a.member(n) || b.member(n);
        EXPECT_EQ(x.isSubsetOf(y), subset);

        bool anyTail = false, coTail = false;
        for (Index n = 200; n < kWindow; ++n) {
            anyTail |= a.member(n);
            coTail |= !a.member(n);
        }
        EXPECT_EQ(x.isFinite(), !anyTail);
        EXPECT_EQ(x.isCoInfinite(), coTail);
    }
}

TEST(IndexSet, CanonicalFormMakesEqualityExtensional) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 200; ++t) {
        Parts a = randomParts(rng);
        IndexSet x = a.build();
        // the same set written with a doubled period and a later threshold
        Parts b;
        b.threshold = a.threshold + 5;
        b.period = a.period * 2;
        for (Index n = 0; n < b.threshold; ++n)
            if (a.member(n)) b.below.insert(n);
        for (Index r = 0; r < b.period; ++r)
            if (a.residues.count(r % a.period)) b.residues.insert(r);
        EXPECT_EQ(x, b.build());
        EXPECT_EQ(IndexSet::deserialize(x.serialize()), x);
    }
}

TEST(IndexSet, QueriesAgreeWithEnumeration) {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 200; ++t) {
        Parts a = randomParts(rng);
        IndexSet x = a.build();
        std::vector<Index> members;
        for (Index n = 0; n < kWindow; ++n)
            if (a.member(n)) members.push_back(n);
        EXPECT_EQ(x.membersIn(0, kWindow), members);
        if (members.empty()) {
            EXPECT_FALSE(x.min().has_value());
            continue;
        }
        EXPECT_EQ(*x.min(), members.front());
        for (Index from : {Index{0}, Index{7}, Index{50}}) {
            auto it = std::lower_bound(members.begin(), members.end(), from);
            if (it != members.end()) {
                EXPECT_EQ(x.nextMember(from), std::optional<Index>(*it));
            }
        }
        if (x.isFinite()) {
            EXPECT_EQ(*x.max(), members.back());
            EXPECT_EQ(*x.size(), members.size());
        }
    }
}

TEST(IndexSet, PeriodOverflowIsReported) {
    Index p1 = (Index{1} << 21) + 1, p2 = (Index{1} << 21) + 3;
    IndexSet a = IndexSet::progression(0, p1, 0), b = IndexSet::progression(0, p2, 0);
    EXPECT_THROW(a.unite(b), PeriodOverflow);
}

TEST(Affine, ImageAndPreimageAgainstBruteForce) {
    std::mt19937_64 rng(14);
    for (int t = 0; t < 300; ++t) {
        Index a = std::uniform_int_distribution<Index>(0, 4)(rng);
        // a constant rule must itself be a valid index
        Affine f{a, std::uniform_int_distribution<std::int64_t>(a == 0 ? 0 : -3, 6)(rng)};
        Parts d = randomParts(rng), target = randomParts(rng);
        IndexSet domain = d.build().intersect(IndexSet::atLeast(f.firstValid()));
        IndexSet img = affineImage(f, domain);
        IndexSet pre = affinePreimage(f, target.build(), domain);
        std::set<Index> imgOracle;
        for (Index k = 0; k < kWindow; ++k) {
            bool inDomain = domain.contains(k);
            if (inDomain) imgOracle.insert(f(k));
            EXPECT_EQ(pre.contains(k), inDomain && target.member(f(k))) << f.str("k") << " at " << k;
        }
        for (Index n = 0; n < kWindow / 5; ++n) EXPECT_EQ(img.contains(n), imgOracle.count(n) > 0) << f.str("k");
    }
}

TEST(Affine, Rendering) {
    EXPECT_EQ((Affine{2, 2}).str("j"), "2*j+2");
    EXPECT_EQ((Affine{1, 1}).str("k"), "k+1");
    EXPECT_EQ(Affine::constant(3).str("k"), "3");
    EXPECT_EQ((Affine{1, -2}).firstValid(), 2u);
}

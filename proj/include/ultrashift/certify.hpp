#ifndef ULTRASHIFT_CERTIFY_HPP
#define ULTRASHIFT_CERTIFY_HPP

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "ultrashift/path.hpp"

namespace ultrashift {

/// The pair falls outside the presentation classes whose criteria are decidable.
class InsufficientMetadata : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace criteria {
inline constexpr const char* kRecurringEdge = "recurring-edge";
inline constexpr const char* kOutside = "distinct-edges-outside-emitter";
inline constexpr const char* kInside = "distinct-edges-inside-emitter";
inline constexpr const char* kCond1 = "cond1";
inline constexpr const char* kCond2 = "cond2";
inline constexpr const char* kCond3 = "cond3";
inline constexpr const char* kSeparatingSet = "separating-vertex-set";
inline constexpr const char* kConstant = "eventually-constant";
inline constexpr const char* kNone = "none";
}  // namespace criteria

struct PairCertificate {
    bool limsupPositive = false;
    std::string limsupCriterion = criteria::kNone;
    bool liminfZero = false;
    std::string liminfCriterion = criteria::kNone;
    bool scrambled = false;
    std::string note;

    static PairCertificate make(bool sup, std::string supBy, bool inf, std::string infBy, std::string note = {}) {
        PairCertificate c;
        c.limsupPositive = sup;
        c.limsupCriterion = sup ? std::move(supBy) : criteria::kNone;
        c.liminfZero = inf;
        c.liminfCriterion = inf ? std::move(infBy) : criteria::kNone;
        c.scrambled = sup && inf;
        c.note = std::move(note);
        return c;
    }

    friend bool operator==(const PairCertificate&, const PairCertificate&) = default;
};

namespace detail {

/// Joint eventually periodic edge sequences.
inline PairCertificate periodicPair(const PeriodicPath& x, const PeriodicPath& y) {
    auto at = [](const PeriodicPath& p, Index i) -> const EdgeId& {
        if (i < p.prefix.size()) return p.prefix[i];
        return p.cycle[(i - p.prefix.size()) % p.cycle.size()];
    };
    auto jp = JointPeriodic<EdgeId>::analyze(x.prefix.size(), x.cycle.size(), y.prefix.size(), y.cycle.size(),
                                             [&](Index i) { return at(x, i); }, [&](Index i) { return at(y, i); });
    bool differ = !jp.tailDisagreements.empty();
    // a disagreeing residue class carries one fixed edge of x; otherwise sigma^n x = sigma^n y eventually
    return PairCertificate::make(differ, criteria::kRecurringEdge, !differ, criteria::kCond2,
                                 differ ? "disagreement residues mod " + std::to_string(jp.period) : "eventually equal");
}

inline bool finitelyManyEdges(const ShiftPoint& x) {
    return std::holds_alternative<PeriodicPath>(x.node) || std::holds_alternative<CodedPath>(x.node);
}

/**
 * Sets deciding, for all large positions, whether a tail source lies in a given
 * member of G^0: the k-independent part of every infinite range clause, and
 * the fixed source vertex of a tail whose source rule is constant.
 */
inline std::vector<VertexSet> separatingShapes(const Ultragraph& g, const std::vector<const EdgeFamily*>& tails) {
    std::vector<VertexSet> out;
    for (const auto& f : g.edgeFamilies()) {
        IndexSet unclaimed = f.domain;
        for (const auto& c : f.clauses) {
            // the first matching clause decides r(e_k)
            IndexSet ks = c.guard.intersect(unclaimed);
            unclaimed = unclaimed.minus(c.guard);
            if (ks.isEmpty()) continue;
            VertexSet k;
            for (const auto& a : c.atoms)
                if (!a.dependsOnEdgeIndex()) k = k.unite(VertexSet::of(a.family, a.evaluate(0)));
            if (k.cardinality().infinite && std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
        }
    }
    for (const auto* f : tails)
        if (f->source.isConstant()) out.push_back(VertexSet::singleton({f->sourceFamily, f->source(0)}));
    return out;
}

/**
 * Two tails that never realign. Past the prefixes the first edges always
 * differ and never repeat, so the only separators that recur are vertex sets
 * containing one source and not the other; their memberships are eventually
 * periodic in the position.
 */
inline PairCertificate unalignedTails(const Ultragraph& g, const TailPath& x, const TailPath& y) {
    const EdgeFamily* fx = g.edgeFamily(x.family);
    const EdgeFamily* fy = g.edgeFamily(y.family);
    if (!fx || !fy) throw std::invalid_argument("unknown edge family in tail");
    auto shapes = separatingShapes(g, {fx, fy});
    Index period = 1, threshold = std::max(x.prefix.size(), y.prefix.size());
    for (const auto& s : shapes)
        for (const auto& [fam, idx] : s.atoms()) {
            period = std::lcm(period, idx.period());
            threshold = std::max(threshold, idx.threshold());
        }
    // position i carries family[start + i - |prefix|]
    auto source = [](const TailPath& t, const EdgeFamily& f, Index i) {
        return VertexId{f.sourceFamily, f.source(t.start + i - t.prefix.size())};
    };
    bool separated = false, quiet = false;
    for (Index i = threshold; i < threshold + period; ++i) {
        VertexId sx = source(x, *fx, i), sy = source(y, *fy, i);
        bool differ = false;
        for (const auto& s : shapes) differ = differ || s.contains(sx) != s.contains(sy);
        separated = separated || differ;
        quiet = quiet || !differ;
    }
    std::string note = separated ? (quiet ? "a vertex set separates the sources on some residues mod "
                                          : "a vertex set separates the sources on every residue mod ")
                                 : "no vertex set separates the sources; period ";
    return PairCertificate::make(separated, criteria::kSeparatingSet, quiet, criteria::kCond3,
                                 note + std::to_string(period));
}

}  // namespace detail

/**
 * Limsup/liminf criteria for two infinite paths, decided per presentation kind.
 * limsup > 0: one fixed edge recurs at infinitely many disagreement positions.
 * liminf = 0: cond1 (infinitely many distinct shared entries), cond2 (unbounded
 * agreement runs) or cond3 (infinitely many pairwise distinct disagreements).
 * Distinct first edges can still be told apart by a vertex set of G^0 holding
 * one source and not the other, so unaligned tails also need the graph.
 */
inline PairCertificate certifyPairInfInf(const ShiftPoint& a, const ShiftPoint& b, const Ultragraph* g = nullptr) {
    if (a.isFinite() || b.isFinite()) throw std::invalid_argument("both points must be infinite paths");
    ShiftPoint x = normalize(a), y = normalize(b);
    const auto* px = std::get_if<PeriodicPath>(&x.node);
    const auto* py = std::get_if<PeriodicPath>(&y.node);
    const auto* tx = std::get_if<TailPath>(&x.node);
    const auto* ty = std::get_if<TailPath>(&y.node);
    const auto* cx = std::get_if<CodedPath>(&x.node);
    const auto* cy = std::get_if<CodedPath>(&y.node);

    if (px && py) return detail::periodicPair(*px, *py);

    if (tx && ty) {
        // position i of the tail carries family[start + i - prefix]
        bool aligned = tx->family == ty->family &&
                       static_cast<std::int64_t>(tx->start) - static_cast<std::int64_t>(tx->prefix.size()) ==
                           static_cast<std::int64_t>(ty->start) - static_cast<std::int64_t>(ty->prefix.size());
        if (aligned)
            return PairCertificate::make(false, criteria::kNone, true, criteria::kCond1, "tails eventually equal");
        if (!g) throw InsufficientMetadata("tails that never realign need the graph to check vertex-set separators");
        return detail::unalignedTails(*g, *tx, *ty);
    }

    if ((tx && detail::finitelyManyEdges(y)) || (ty && detail::finitelyManyEdges(x))) {
        // the tail side never repeats an edge; the other side uses finitely many
        return PairCertificate::make(true, criteria::kRecurringEdge, false, criteria::kNone,
                                     "finitely many agreements with a family tail");
    }

    if (cx && cy) {
        bool sameShape = cx->base == cy->base && cx->c1 == cy->c1 && cx->c2 == cy->c2 &&
                         cx->balanced == cy->balanced && cx->skip == cy->skip;
        if (!sameShape || !cx->aligned())
            throw InsufficientMetadata("coded paths with different or unaligned blocks");
        auto facts = bitPairFacts(cx->bits, cy->bits);
        if (!facts.differInfinitelyOften || !facts.unboundedAgreementRuns)
            throw InsufficientMetadata("bit sequences " + cx->bits.str() + " and " + cy->bits.str() +
                                       " are outside the decided kinds");
        // blocks are aligned: a differing block position fixes one block edge, an
        // agreement run of k blocks is an agreement run of k block lengths
        return PairCertificate::make(*facts.differInfinitelyOften, criteria::kRecurringEdge,
                                     *facts.unboundedAgreementRuns, criteria::kCond2, "block-level");
    }
    throw InsufficientMetadata("no decided criterion for " + x.kind() + " against " + y.kind());
}

/**
 * Criteria for an infinite path x against the point (A, A), A a minimal
 * infinite emitter. limsup > 0: a recurring edge, or infinitely many distinct
 * edges with source outside A. liminf = 0: infinitely many distinct edges with
 * source inside A.
 */
inline PairCertificate certifyPairInfEmitter(const Ultragraph& g, const ShiftPoint& a, const VertexSet& A) {
    ShiftPoint x = normalize(a);
    if (x.isFinite()) throw std::invalid_argument("x must be an infinite path");
    if (detail::finitelyManyEdges(x))
        return PairCertificate::make(true, criteria::kRecurringEdge, false, criteria::kNone,
                                     "finitely many distinct edges");
    const auto& t = std::get<TailPath>(x.node);
    const EdgeFamily* f = g.edgeFamily(t.family);
    if (!f) throw std::invalid_argument("unknown edge family '" + t.family + "'");
    IndexSet tail = IndexSet::atLeast(t.start).intersect(f->domain);
    IndexSet inside = affinePreimage(f->source, A.indicesOf(f->sourceFamily), tail);
    IndexSet outside = tail.minus(inside);
    bool in = !inside.isFinite();
    bool out = !outside.isFinite();
    return PairCertificate::make(out, criteria::kOutside, in, criteria::kInside,
                                 "tail indices with source in A: " + inside.serialize());
}

/// Dispatch on the kinds of x and y; finite points (beta, B) reduce to (B, B).
inline PairCertificate certifyPair(const Ultragraph& g, const ShiftPoint& x, const ShiftPoint& y) {
    if (!x.isFinite() && !y.isFinite()) return certifyPairInfInf(x, y, &g);
    if (x.isFinite() && y.isFinite()) {
        // both are constant after max(|beta|, |beta'|) shifts
        bool same = x.finite()->terminal == y.finite()->terminal;
        return PairCertificate::make(!same, criteria::kConstant, same, criteria::kConstant,
                                     "both orbits reach a fixed point");
    }
    const ShiftPoint& inf = x.isFinite() ? y : x;
    const Ultrapath& fin = x.isFinite() ? *x.finite() : *y.finite();
    // limsup and liminf only see the tail, so shift both by |beta|
    return certifyPairInfEmitter(g, shiftBy(inf, fin.length()), fin.terminal);
}

}  // namespace ultrashift

#endif  // ULTRASHIFT_CERTIFY_HPP

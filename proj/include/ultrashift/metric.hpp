#ifndef ULTRASHIFT_METRIC_HPP
#define ULTRASHIFT_METRIC_HPP

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ultrashift/enumeration.hpp"

namespace ultrashift {

/// d = 2^{-rank}; Zero for equal points; UnknownBeyond when p_1..p_maxRank all agree.
struct DistanceValue {
    enum class Kind { Rank, Zero, UnknownBeyond };
    Kind kind = Kind::Zero;
    Index rank = 0;
    Index maxRank = 0;

    static DistanceValue zero() { return {Kind::Zero, 0, 0}; }
    static DistanceValue at(Index r) { return {Kind::Rank, r, 0}; }
    static DistanceValue beyond(Index m) { return {Kind::UnknownBeyond, 0, m}; }

    bool isZero() const { return kind == Kind::Zero; }
    bool isRank() const { return kind == Kind::Rank; }

    /// CSV rank column: -1 for Zero, 0 for UnknownBeyond.
    long long csvRank() const {
        if (kind == Kind::Zero) return -1;
        if (kind == Kind::UnknownBeyond) return 0;
        return static_cast<long long>(rank);
    }

    double value() const {
        if (kind != Kind::Rank) return 0.0;
        return std::ldexp(1.0, -static_cast<int>(std::min<Index>(rank, 1074)));
    }

    /// "%.17g" rendering, stable across runs; below the double range the
    /// mantissa and decimal exponent are computed separately.
    std::string valueString() const {
        char buf[64];
        if (kind != Kind::Rank || rank <= 1074) {
            std::snprintf(buf, sizeof buf, "%.17g", value());
            return buf;
        }
        long double e = -static_cast<long double>(rank) * std::log10(2.0L);
        long double exp10 = std::floor(e);
        std::snprintf(buf, sizeof buf, "%.12Lge%lld", std::pow(10.0L, e - exp10),
                      static_cast<long long>(exp10));
        return buf;
    }

    std::string str() const {
        switch (kind) {
            case Kind::Zero: return "zero";
            case Kind::UnknownBeyond: return "unknown-beyond(" + std::to_string(maxRank) + ")";
            default: return "2^-" + std::to_string(rank);
        }
    }

    friend bool operator==(const DistanceValue&, const DistanceValue&) = default;
};

constexpr Index kDefaultMaxRank = 100000;

/// alpha(x)(p): 1 iff p is an initial segment of x.
inline int alphaRow(const Ultragraph& g, const ShiftPoint& x, const Ultrapath& p) {
    return isInitialSegment(g, p, x) ? 1 : 0;
}

namespace detail {

/// Edges of x long enough to test every candidate of key length <= L.
inline EdgePath edgesForKeyLength(const ShiftPoint& x, Index L, Index minEdgeKey) {
    if (const auto* u = x.finite()) return u->edges;
    return realize(x, L / std::max<Index>(1, minEdgeKey) + 2);
}

/// Enumerated initial segments of x with key length exactly L.
inline void initialSegmentsOfLength(UltrapathEnumeration& en, const ShiftPoint& x, const EdgePath& xe, Index L,
                                    std::vector<Ultrapath>& out) {
    const Ultragraph& g = en.graph();
    const Ultrapath* fin = x.finite();
    auto accept = [&](const Ultrapath& p) {
        bool ok = fin ? isInitialSegmentView(g, p, fin->edges, false, &fin->terminal)
                      : isInitialSegmentView(g, p, xe, true, nullptr);
        if (ok) out.push_back(p);
    };
    auto singletonCandidate = [&](std::size_t k) -> std::optional<VertexSet> {
        if (k < xe.size()) return VertexSet::singleton(g.source(xe[k]));
        if (fin && fin->terminal.cardinality() == Cardinality::finite(1)) return fin->terminal;
        return std::nullopt;
    };
    for (std::size_t k = 0; k <= xe.size(); ++k) {
        EdgePath alpha(xe.begin(), xe.begin() + static_cast<std::ptrdiff_t>(k));
        Index used = k == 0 ? 0 : edgePathStr(alpha).size() + 1;
        if (used + en.minSetKey() > L) break;
        Index len = L - used;
        std::vector<VertexSet> sets =
            k == 0 ? en.nonSingletonDomainSets(len) : en.nonSingletonTerminals(alpha.back(), len);
        if (auto s = singletonCandidate(k); s && s->serialize().size() == len && en.permittedSet(k == 0 ? std::nullopt : std::optional<EdgeId>(alpha.back()), *s))
            sets.push_back(*s);
        for (auto& b : sets) accept(Ultrapath{alpha, std::move(b)});
        if (!fin && k == xe.size()) throw std::logic_error("realized window too short");
    }
}

}  // namespace detail

/**
 * d_X(x, y) as the rank of the first enumerated element that is an initial
 * segment of exactly one of x and y.
 */
inline DistanceValue distance(UltrapathEnumeration& en, const ShiftPoint& x, const ShiftPoint& y,
                              Index maxRank = kDefaultMaxRank) {
    if (structuralEqual(x, y) == Tri::Yes) return DistanceValue::zero();
    const Ultragraph& g = en.graph();
    Index minEdgeKey = ~Index{0};
    for (const auto& f : g.edgeFamilies()) minEdgeKey = std::min<Index>(minEdgeKey, f.name.size() + 3);
    Index start = 1;
    if (!x.isFinite() && !y.isFinite()) {
        // a path of m edges has key length >= m * (minEdgeKey + 1) + minSetKey, and
        // none shorter than the common prefix of x and y can tell them apart
        auto shortest = [&](Index m) { return m * (minEdgeKey + 1) + en.minSetKey(); };
        Index m = 0;
        while (entryAt(x, m + 1) == entryAt(y, m + 1)) {
            if (shortest(m + 1) > UltrapathEnumeration::kMaxKeyLength ||
                en.countBeforeCapped(shortest(m + 1), maxRank) >= maxRank)
                return DistanceValue::beyond(maxRank);
            ++m;
        }
        start = shortest(m);
    }
    for (Index L = start; L <= UltrapathEnumeration::kMaxKeyLength; ++L) {
        if (en.countBeforeCapped(L, maxRank) >= maxRank) break;
        if (L < en.minSetKey()) continue;
        EdgePath xe = detail::edgesForKeyLength(x, L, minEdgeKey);
        EdgePath ye = detail::edgesForKeyLength(y, L, minEdgeKey);
        std::vector<Ultrapath> cands;
        detail::initialSegmentsOfLength(en, x, xe, L, cands);
        detail::initialSegmentsOfLength(en, y, ye, L, cands);
        std::optional<std::string> best;
        for (const auto& p : cands) {
            if (alphaRow(g, x, p) == alphaRow(g, y, p)) continue;
            std::string k = p.serialize();
            if (!best || en.precedes(k, *best)) best = k;
        }
        if (!best) continue;
        auto r = en.rankOfKey(*best, maxRank);
        if (r.status == UltrapathEnumeration::RankResult::Status::Found) return DistanceValue::at(r.rank);
        if (r.status == UltrapathEnumeration::RankResult::Status::Beyond) break;
        throw std::logic_error("distinguisher " + *best + " missing from the enumeration");
    }
    return DistanceValue::beyond(maxRank);
}

/// Reference scan over p_1, p_2, ... (slow; used to cross-check `distance`).
inline DistanceValue bruteDistance(UltrapathEnumeration& en, const ShiftPoint& x, const ShiftPoint& y,
                                   Index maxRank) {
    if (structuralEqual(x, y) == Tri::Yes) return DistanceValue::zero();
    const Ultragraph& g = en.graph();
    Index rank = 0;
    for (Index L = 1; L <= UltrapathEnumeration::kMaxKeyLength && rank < maxRank; ++L) {
        for (const auto& e : en.shell(L)) {
            if (++rank > maxRank) break;
            if (alphaRow(g, x, e.path) != alphaRow(g, y, e.path)) return DistanceValue::at(rank);
        }
    }
    return DistanceValue::beyond(maxRank);
}

/// d(sigma^n x, sigma^n y) for n = 0..nMax.
inline std::vector<DistanceValue> trajectory(UltrapathEnumeration& en, const ShiftPoint& x, const ShiftPoint& y,
                                             Index nMax, Index maxRank = kDefaultMaxRank) {
    std::vector<DistanceValue> out;
    out.reserve(nMax + 1);
    ShiftPoint a = normalize(x), b = normalize(y);
    for (Index n = 0; n <= nMax; ++n) {
        out.push_back(distance(en, a, b, maxRank));
        a = shift(a);
        b = shift(b);
    }
    return out;
}

struct ConvergenceReport {
    bool converges = false;
    char caseUsed = 'a';           // 'a': infinite limit, 'b': finite limit
    Index settledFrom = 0;          // first index from which the structural condition holds
    Index agreementReached = 0;     // case (a): agreement depth achieved by the tail
    std::vector<DistanceValue> distances;
    std::optional<Index> monotoneFrom;  // ranks nondecreasing from here on
    std::string note;
};

/**
 * Finite-horizon check of sequence convergence. Case (a): agreement with the
 * infinite limit on ever longer prefixes, up to targetDepth. Case (b): terms
 * equal the limit or extend its edges through epsilon(A), and every
 * continuation edge seen in the first half is escaped in the last quarter.
 */
inline ConvergenceReport checkConvergence(UltrapathEnumeration& en, const std::vector<ShiftPoint>& seq,
                                          const ShiftPoint& limit, Index targetDepth = 10,
                                          Index maxRank = kDefaultMaxRank) {
    const Ultragraph& g = en.graph();
    ConvergenceReport rep;
    for (const auto& s : seq) rep.distances.push_back(distance(en, s, limit, maxRank));
    auto better = [](const DistanceValue& a, const DistanceValue& b) {
        // a is at least as close as b
        if (a.isZero()) return true;
        if (b.isZero()) return false;
        if (a.kind == DistanceValue::Kind::UnknownBeyond) return true;
        if (b.kind == DistanceValue::Kind::UnknownBeyond) return false;
        return a.rank >= b.rank;
    };
    if (!seq.empty()) {
        Index from = seq.size() - 1;
        while (from > 0 && better(rep.distances[from], rep.distances[from - 1])) --from;
        rep.monotoneFrom = from;
    }
    const Index n = seq.size();
    if (n == 0) {
        rep.converges = true;
        rep.note = "empty sequence";
        return rep;
    }

    if (!limit.isFinite()) {
        rep.caseUsed = 'a';
        EdgePath lim = realize(limit, targetDepth);
        std::vector<Index> agree(n);
        for (Index i = 0; i < n; ++i) {
            EdgePath xe = seq[i].isFinite() ? seq[i].finite()->edges : realize(seq[i], targetDepth);
            Index a = 0;
            while (a < xe.size() && a < targetDepth && xe[a] == lim[a]) ++a;
            agree[i] = a;
        }
        // N(M): last index with agreement below M; it must leave the last quarter untouched
        const Index tailStart = n - std::min<Index>(n, std::max<Index>(2, n / 4));
        Index settled = 0;
        Index reached = 0;
        for (Index m = 1; m <= targetDepth; ++m) {
            std::optional<Index> last;
            for (Index i = 0; i < n; ++i)
                if (agree[i] < m) last = i;
            if (last && *last >= tailStart) break;
            reached = m;
            settled = last ? *last + 1 : 0;
        }
        rep.agreementReached = reached;
        rep.settledFrom = settled;
        rep.converges = reached == targetDepth;
        rep.note = "agreement depth " + std::to_string(reached) + " of " + std::to_string(targetDepth);
        return rep;
    }

    rep.caseUsed = 'b';
    const Ultrapath& x = *limit.finite();
    const std::size_t k = x.edges.size();
    EdgeSet eps = g.epsilon(x.terminal);
    std::vector<bool> ok(n);
    std::vector<std::optional<EdgeId>> cont(n);
    for (Index i = 0; i < n; ++i) {
        const auto& s = seq[i];
        if (s.isFinite() && *s.finite() == x) {
            ok[i] = true;
            continue;
        }
        EdgePath xe = s.isFinite() ? s.finite()->edges : realize(s, k + 1);
        if (xe.size() <= k || !std::equal(x.edges.begin(), x.edges.end(), xe.begin())) continue;
        if (!eps.contains(xe[k])) continue;
        ok[i] = true;
        cont[i] = xe[k];
    }
    Index settled = n;
    while (settled > 0 && ok[settled - 1]) --settled;
    rep.settledFrom = settled;
    if (settled > n / 2) {
        rep.note = "structural condition fails at index " + std::to_string(settled - 1);
        return rep;
    }
    std::set<std::string> early;
    for (Index i = 0; i < n / 2; ++i)
        if (cont[i]) early.insert(cont[i]->str());
    for (Index i = n - n / 4; i < n; ++i)
        if (cont[i] && early.count(cont[i]->str())) {
            rep.note = "continuation edge " + cont[i]->str() + " is never escaped";
            return rep;
        }
    rep.converges = true;
    rep.note = "every early continuation edge escaped";
    return rep;
}

}  // namespace ultrashift

#endif  // ULTRASHIFT_METRIC_HPP

#ifndef ULTRASHIFT_EMITTERS_HPP
#define ULTRASHIFT_EMITTERS_HPP

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "ultrashift/bitstream.hpp"
#include "ultrashift/ultragraph.hpp"

namespace ultrashift {

/// A minimal infinite emitter with how it was built: a singleton, or the
/// intersection of the ranges of `ranges`.
struct EmitterTrace {
    VertexSet set;
    bool singleton = false;
    std::vector<EdgeId> ranges;

    /// Singleton of cardinality one, or infinite and equal to the recorded intersection.
    bool satisfiesDichotomy(const Ultragraph& g) const {
        auto card = set.cardinality();
        if (singleton) return !card.infinite && card.count == 1;
        if (!card.infinite || ranges.empty()) return false;
        VertexSet meet = g.range(ranges.front());
        for (std::size_t i = 1; i < ranges.size(); ++i) meet = meet.intersect(g.range(ranges[i]));
        return meet == set;
    }
};

struct MinimalEmitterResult {
    std::vector<EmitterTrace> emitters;
    bool complete = true;
    std::vector<std::string> notes;
};

struct EmitterSearchOptions {
    Index depthBound = 3;
    Index sampleBound = 8;     // k-dependent infinite ranges: how many k to sample
    bool includeAmbient = true;  // R itself is a candidate (R in G^0)
};

namespace detail {

struct PoolEntry {
    VertexSet value;
    EdgeId rep;
};

/// Distinct infinite range values. Clauses whose value varies with k are sampled.
inline std::vector<PoolEntry> infiniteRangePool(const Ultragraph& g, Index sampleBound, bool& complete,
                                                std::vector<std::string>& notes) {
    std::vector<PoolEntry> pool;
    auto add = [&](VertexSet v, EdgeId rep) {
        if (!v.isFinite() &&
            std::none_of(pool.begin(), pool.end(), [&](const PoolEntry& p) { return p.value == v; }))
            pool.push_back({std::move(v), std::move(rep)});
    };
    for (const auto& f : g.edgeFamilies()) {
        for (const auto& c : f.clauses) {
            bool infinitePart = std::any_of(c.atoms.begin(), c.atoms.end(), [](const RangeAtom& a) {
                return a.kind == RangeAtom::Kind::Comprehension && !a.evaluate(0).isFinite();
            });
            if (!infinitePart) continue;
            IndexSet ks = c.guard.intersect(f.domain);
            if (ks.isEmpty()) continue;
            if (c.isConstant()) {
                Index k = *ks.min();
                add(c.evaluate(k), {f.name, k});
                continue;
            }
            for (Index k : ks.membersIn(0, sampleBound)) add(c.evaluate(k), {f.name, k});
            if (!ks.isFinite() || *ks.max() >= sampleBound) {
                complete = false;
                notes.push_back("ranges of '" + f.name + "' vary with the edge index; sampled k < " +
                                std::to_string(sampleBound));
            }
        }
    }
    return pool;
}

struct Built {
    VertexSet value;
    std::vector<EdgeId> trace;
};

/// Intersections of `seeds` with up to `depth` further pool values. Returns
/// false in `stable` when the last level still produced new sets.
inline std::vector<Built> intersectionClosure(std::vector<Built> seeds, const std::vector<PoolEntry>& pool,
                                              Index depth, bool& stable) {
    std::vector<Built> all;
    auto known = [&](const VertexSet& v) {
        return std::any_of(all.begin(), all.end(), [&](const Built& b) { return b.value == v; });
    };
    std::vector<Built> frontier;
    for (auto& s : seeds) {
        if (s.value.isEmpty() || known(s.value)) continue;
        all.push_back(s);
        frontier.push_back(s);
    }
    stable = true;
    for (Index d = 0; d < depth && !frontier.empty(); ++d) {
        std::vector<Built> next;
        for (const auto& b : frontier) {
            for (const auto& p : pool) {
                VertexSet v = b.value.intersect(p.value);
                if (v.isEmpty() || known(v)) continue;
                Built nb{v, b.trace};
                nb.trace.push_back(p.rep);
                all.push_back(nb);
                next.push_back(std::move(nb));
            }
        }
        frontier = std::move(next);
    }
    if (!frontier.empty()) {
        // one more round tells whether anything new would appear
        for (const auto& b : frontier)
            for (const auto& p : pool) {
                VertexSet v = b.value.intersect(p.value);
                if (!v.isEmpty() && !known(v)) stable = false;
            }
    }
    return all;
}

}  // namespace detail

/// Vertices w with infinitely many outgoing edges.
inline VertexSet singletonInfiniteEmitters(const Ultragraph& g) {
    VertexSet out;
    for (const auto& f : g.edgeFamilies())
        if (f.source.isConstant() && !f.domain.isFinite())
            out = out.unite(VertexSet::singleton({f.sourceFamily, f.source(0)}));
    return out;
}

/**
 * Minimal infinite emitters contained in R, searched among singletons and
 * intersections of R with at most depthBound infinite ranges.
 */
inline MinimalEmitterResult minimalInfiniteEmitters(const Ultragraph& g, const VertexSet& R,
                                                    const EmitterSearchOptions& opt = {}) {
    MinimalEmitterResult res;
    auto pool = detail::infiniteRangePool(g, opt.sampleBound, res.complete, res.notes);

    std::vector<EmitterTrace> candidates;
    for (const auto& w : singletonInfiniteEmitters(g).intersect(R).members())
        candidates.push_back({VertexSet::singleton(w), true, {}});

    std::vector<detail::Built> seeds;
    if (opt.includeAmbient) seeds.push_back({R, {}});
    for (const auto& p : pool) seeds.push_back({R.intersect(p.value), {p.rep}});
    bool stable = true;
    auto built = detail::intersectionClosure(seeds, pool, opt.depthBound > 0 ? opt.depthBound - 1 : 0, stable);
    if (!stable) {
        res.complete = false;
        res.notes.push_back("intersection depth " + std::to_string(opt.depthBound) + " exhausted");
    }

    // pure range intersections, used to certify traces
    std::vector<detail::Built> poolSeeds;
    for (const auto& p : pool) poolSeeds.push_back({p.value, {p.rep}});
    bool poolStable = true;
    auto rangeMeets = detail::intersectionClosure(poolSeeds, pool, opt.depthBound > 0 ? opt.depthBound - 1 : 0,
                                                  poolStable);

    for (const auto& b : built) {
        if (!g.isInfiniteEmitter(b.value)) continue;
        if (std::any_of(candidates.begin(), candidates.end(),
                        [&](const EmitterTrace& c) { return c.set == b.value; }))
            continue;
        EmitterTrace t{b.value, false, {}};
        if (b.value.cardinality() == Cardinality::finite(1)) {
            t.singleton = true;
        } else {
            for (const auto& m : rangeMeets)
                if (m.value == b.value) {
                    t.ranges = m.trace;
                    break;
                }
        }
        candidates.push_back(std::move(t));
    }

    for (const auto& c : candidates) {
        bool minimal = std::none_of(candidates.begin(), candidates.end(), [&](const EmitterTrace& o) {
            return !(o.set == c.set) && o.set.isSubsetOf(c.set);
        });
        if (minimal) res.emitters.push_back(c);
    }
    std::sort(res.emitters.begin(), res.emitters.end(), [](const EmitterTrace& a, const EmitterTrace& b) {
        return a.set.serialize() < b.set.serialize();
    });
    return res;
}

/// M_alpha for a nonempty edge path (R = r(last edge)); for the empty path all of G^0.
inline MinimalEmitterResult minimalEmittersForPath(const Ultragraph& g, const std::vector<EdgeId>& alpha,
                                                   EmitterSearchOptions opt = {}) {
    if (alpha.empty()) {
        opt.includeAmbient = false;
        auto res = minimalInfiniteEmitters(g, g.allVertices(), opt);
        return res;
    }
    return minimalInfiniteEmitters(g, g.range(alpha.back()), opt);
}

/// Yes/No when decided; Unknown when the bounded search could not rule out a smaller emitter.
inline Tri isMinimalInfiniteEmitter(const Ultragraph& g, const VertexSet& A, const EmitterSearchOptions& opt = {}) {
    if (A.isEmpty() || !g.isInfiniteEmitter(A)) return Tri::No;
    auto res = minimalInfiniteEmitters(g, A, opt);
    bool found = std::any_of(res.emitters.begin(), res.emitters.end(),
                             [&](const EmitterTrace& t) { return t.set == A; });
    if (!found) return Tri::No;
    return res.complete ? Tri::Yes : Tri::Unknown;
}

}  // namespace ultrashift

#endif  // ULTRASHIFT_EMITTERS_HPP

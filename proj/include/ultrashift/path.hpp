#ifndef ULTRASHIFT_PATH_HPP
#define ULTRASHIFT_PATH_HPP

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ultrashift/bitstream.hpp"
#include "ultrashift/ultragraph.hpp"

namespace ultrashift {

using EdgePath = std::vector<EdgeId>;

inline std::string edgePathStr(const EdgePath& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += '.';
        s += p[i].str();
    }
    return s;
}

/// (alpha, A); length zero means A in G^0.
struct Ultrapath {
    EdgePath edges;
    VertexSet terminal;

    std::size_t length() const { return edges.size(); }

    std::string serialize() const {
        if (edges.empty()) return terminal.serialize();
        return edgePathStr(edges) + "@" + terminal.serialize();
    }

    friend bool operator==(const Ultrapath&, const Ultrapath&) = default;
};

struct PeriodicPath {
    EdgePath prefix;
    EdgePath cycle;
    friend bool operator==(const PeriodicPath&, const PeriodicPath&) = default;
};

/// prefix, then family[start], family[start+1], ...
struct TailPath {
    EdgePath prefix;
    std::string family;
    Index start = 0;
    friend bool operator==(const TailPath&, const TailPath&) = default;
};

/**
 * Blocks over two closed paths at `base`. In plain mode bit 0 -> c1 and
 * bit 1 -> c2; in balanced mode bit 0 -> c1 c2 and bit 1 -> c2 c1, so all
 * blocks have the same length. `skip` edges have been dropped by the shift.
 */
struct CodedPath {
    VertexId base;
    EdgePath c1;
    EdgePath c2;
    Bitstream bits;
    bool balanced = false;
    Index skip = 0;

    bool aligned() const { return balanced || c1.size() == c2.size(); }
    Index blockLength(bool bit) const {
        if (balanced) return c1.size() + c2.size();
        return bit ? c2.size() : c1.size();
    }

    void appendBlock(EdgePath& out, bool bit) const {
        const EdgePath& first = bit ? c2 : c1;
        out.insert(out.end(), first.begin(), first.end());
        if (balanced) {
            const EdgePath& second = bit ? c1 : c2;
            out.insert(out.end(), second.begin(), second.end());
        }
    }

    /// Edges 1..n after the skip.
    EdgePath realize(Index n) const {
        Index need = n + skip;
        Index minBlock = std::max<Index>(1, balanced ? c1.size() + c2.size() : std::min(c1.size(), c2.size()));
        auto b = bits.realize(need / minBlock + 2);
        EdgePath raw;
        raw.reserve(need + c1.size() + c2.size());
        for (std::size_t t = 0; raw.size() < need && t < b.size(); ++t) appendBlock(raw, b[t]);
        return EdgePath(raw.begin() + static_cast<std::ptrdiff_t>(skip),
                        raw.begin() + static_cast<std::ptrdiff_t>(need));
    }

    EdgeId at(Index i) const {
        if (aligned()) {
            Index len = blockLength(false);
            Index pos = i - 1 + skip;
            bool bit = bits.at(pos / len + 1);
            Index off = pos % len;
            const EdgePath& first = bit ? c2 : c1;
            if (off < first.size()) return first[off];
            return (bit ? c1 : c2)[off - first.size()];
        }
        return realize(i).back();
    }
};

/// A point of X: an infinite path presentation or an element (alpha, A) of X_fin.
struct ShiftPoint {
    using Node = std::variant<PeriodicPath, TailPath, CodedPath, Ultrapath>;
    Node node;

    bool isFinite() const { return std::holds_alternative<Ultrapath>(node); }
    const Ultrapath* finite() const { return std::get_if<Ultrapath>(&node); }

    std::string kind() const {
        switch (node.index()) {
            case 0: return "periodic";
            case 1: return "tail";
            case 2: return "coded";
            default: return "finite";
        }
    }
};

inline EdgePath periodicRealize(const PeriodicPath& p, Index n) {
    EdgePath out;
    out.reserve(n);
    for (Index i = 0; i < n; ++i)
        out.push_back(i < p.prefix.size() ? p.prefix[i] : p.cycle[(i - p.prefix.size()) % p.cycle.size()]);
    return out;
}

/// Edges 1..n (fewer for a finite point shorter than n).
inline EdgePath realize(const ShiftPoint& x, Index n) {
    return std::visit(
        [&](const auto& p) -> EdgePath {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, PeriodicPath>) {
                return periodicRealize(p, n);
            } else if constexpr (std::is_same_v<T, TailPath>) {
                EdgePath out;
                out.reserve(n);
                for (Index i = 0; i < n; ++i)
                    out.push_back(i < p.prefix.size() ? p.prefix[i]
                                                      : EdgeId{p.family, p.start + (i - p.prefix.size())});
                return out;
            } else if constexpr (std::is_same_v<T, CodedPath>) {
                return p.realize(n);
            } else {
                return EdgePath(p.edges.begin(), p.edges.begin() + std::min<Index>(n, p.edges.size()));
            }
        },
        x.node);
}

/// i-th edge, 1-based.
inline EdgeId entryAt(const ShiftPoint& x, Index i) {
    if (i == 0) throw std::out_of_range("entries are 1-based");
    return std::visit(
        [&](const auto& p) -> EdgeId {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, PeriodicPath>) {
                if (i <= p.prefix.size()) return p.prefix[i - 1];
                return p.cycle[(i - 1 - p.prefix.size()) % p.cycle.size()];
            } else if constexpr (std::is_same_v<T, TailPath>) {
                if (i <= p.prefix.size()) return p.prefix[i - 1];
                return {p.family, p.start + (i - 1 - p.prefix.size())};
            } else if constexpr (std::is_same_v<T, CodedPath>) {
                return p.at(i);
            } else {
                if (i > p.edges.size()) throw std::out_of_range("finite point has no entry " + std::to_string(i));
                return p.edges[i - 1];
            }
        },
        x.node);
}

inline ShiftPoint normalize(ShiftPoint x) {
    if (auto* p = std::get_if<PeriodicPath>(&x.node)) {
        normalizeEventuallyPeriodic(p->prefix, p->cycle);
    } else if (auto* t = std::get_if<TailPath>(&x.node)) {
        while (!t->prefix.empty() && t->start > 0 && t->prefix.back() == EdgeId{t->family, t->start - 1}) {
            t->prefix.pop_back();
            --t->start;
        }
    } else if (auto* c = std::get_if<CodedPath>(&x.node)) {
        if (const PeriodicBits* pb = c->bits.periodicBits()) {
            PeriodicPath out;
            for (auto b : pb->prefix) c->appendBlock(out.prefix, b);
            for (auto b : pb->cycle) c->appendBlock(out.cycle, b);
            Index drop = c->skip;
            while (drop > 0 && !out.prefix.empty()) {
                out.prefix.erase(out.prefix.begin());
                --drop;
            }
            drop %= out.cycle.size();
            std::rotate(out.cycle.begin(), out.cycle.begin() + static_cast<std::ptrdiff_t>(drop), out.cycle.end());
            normalizeEventuallyPeriodic(out.prefix, out.cycle);
            x.node = std::move(out);
        }
    }
    return x;
}

inline ShiftPoint makePeriodic(EdgePath prefix, EdgePath cycle) {
    return normalize({PeriodicPath{std::move(prefix), std::move(cycle)}});
}
inline ShiftPoint makeTail(EdgePath prefix, std::string family, Index start) {
    return normalize({TailPath{std::move(prefix), std::move(family), start}});
}
inline ShiftPoint makeCoded(VertexId base, EdgePath c1, EdgePath c2, Bitstream bits, bool balanced) {
    return normalize({CodedPath{std::move(base), std::move(c1), std::move(c2), std::move(bits), balanced, 0}});
}
inline ShiftPoint makeFinite(EdgePath edges, VertexSet terminal) {
    return {Ultrapath{std::move(edges), std::move(terminal)}};
}

/// sigma^n.
inline ShiftPoint shiftBy(const ShiftPoint& x, Index n) {
    if (n == 0) return x;
    ShiftPoint y = x;
    if (auto* p = std::get_if<PeriodicPath>(&y.node)) {
        Index fromPrefix = std::min<Index>(n, p->prefix.size());
        p->prefix.erase(p->prefix.begin(), p->prefix.begin() + static_cast<std::ptrdiff_t>(fromPrefix));
        Index rot = (n - fromPrefix) % p->cycle.size();
        std::rotate(p->cycle.begin(), p->cycle.begin() + static_cast<std::ptrdiff_t>(rot), p->cycle.end());
    } else if (auto* t = std::get_if<TailPath>(&y.node)) {
        Index fromPrefix = std::min<Index>(n, t->prefix.size());
        t->prefix.erase(t->prefix.begin(), t->prefix.begin() + static_cast<std::ptrdiff_t>(fromPrefix));
        t->start += n - fromPrefix;
    } else if (auto* c = std::get_if<CodedPath>(&y.node)) {
        c->skip += n;
    } else {
        auto& u = std::get<Ultrapath>(y.node);
        Index drop = std::min<Index>(n, u.edges.size());
        u.edges.erase(u.edges.begin(), u.edges.begin() + static_cast<std::ptrdiff_t>(drop));
    }
    return normalize(std::move(y));
}

/// sigma: drops the first edge; (g, A) and (A, A) both go to (A, A).
inline ShiftPoint shift(const ShiftPoint& x) { return shiftBy(x, 1); }

/// Equality of the points the presentations denote, where decidable.
inline Tri structuralEqual(const ShiftPoint& a, const ShiftPoint& b, Index horizon = 4096) {
    ShiftPoint x = normalize(a);
    ShiftPoint y = normalize(b);
    if (x.isFinite() != y.isFinite()) return Tri::No;
    if (x.isFinite()) return *x.finite() == *y.finite() ? Tri::Yes : Tri::No;
    if (x.node.index() != y.node.index()) {
        // tails carry infinitely many distinct edges, the other kinds finitely many
        if (std::holds_alternative<TailPath>(x.node) || std::holds_alternative<TailPath>(y.node)) return Tri::No;
        return realize(x, horizon) == realize(y, horizon) ? Tri::Unknown : Tri::No;
    }
    if (auto* p = std::get_if<PeriodicPath>(&x.node)) return *p == std::get<PeriodicPath>(y.node) ? Tri::Yes : Tri::No;
    if (auto* t = std::get_if<TailPath>(&x.node)) return *t == std::get<TailPath>(y.node) ? Tri::Yes : Tri::No;
    const auto& cx = std::get<CodedPath>(x.node);
    const auto& cy = std::get<CodedPath>(y.node);
    if (cx.base == cy.base && cx.c1 == cy.c1 && cx.c2 == cy.c2 && cx.balanced == cy.balanced &&
        cx.skip == cy.skip) {
        Tri t = bitstreamEqual(cx.bits, cy.bits);
        if (t != Tri::Unknown) return t;
    }
    return realize(x, horizon) == realize(y, horizon) ? Tri::Unknown : Tri::No;
}

/// s(x): source of the first edge (infinite or |x| >= 1).
inline VertexId sourceOf(const Ultragraph& g, const ShiftPoint& x) { return g.source(entryAt(x, 1)); }

/**
 * y is an initial segment of x. For |y| >= 1 the edges of y must prefix x and
 * the continuation source (or, at equal length, x's terminal) must lie in
 * y's terminal. For y = B in G^0: s(x) in B, or A' subset of B when x = (A', A').
 */
inline bool isInitialSegmentView(const Ultragraph& g, const Ultrapath& y, const EdgePath& xEdges, bool xInfinite,
                                 const VertexSet* xTerminal) {
    const std::size_t m = y.edges.size();
    if (xEdges.size() < m) return false;
    for (std::size_t i = 0; i < m; ++i)
        if (!(xEdges[i] == y.edges[i])) return false;
    if (xEdges.size() > m) return y.terminal.contains(g.source(xEdges[m]));
    if (xInfinite) throw std::logic_error("realized view too short for initial-segment test");
    return xTerminal->isSubsetOf(y.terminal);
}

inline bool isInitialSegment(const Ultragraph& g, const Ultrapath& y, const ShiftPoint& x) {
    if (const auto* u = x.finite()) return isInitialSegmentView(g, y, u->edges, false, &u->terminal);
    return isInitialSegmentView(g, y, realize(x, y.length() + 1), true, nullptr);
}

/// x . y per the three zero-length cases and (alpha beta, B); nullopt when undefined.
inline std::optional<Ultrapath> concat(const Ultragraph& g, const Ultrapath& x, const Ultrapath& y) {
    if (x.edges.empty() && y.edges.empty()) {
        VertexSet meet = x.terminal.intersect(y.terminal);
        if (meet.isEmpty()) return std::nullopt;
        return Ultrapath{{}, meet};
    }
    if (x.edges.empty()) {
        if (!x.terminal.contains(g.source(y.edges.front()))) return std::nullopt;
        return y;
    }
    if (y.edges.empty()) {
        VertexSet meet = x.terminal.intersect(y.terminal);
        if (meet.isEmpty()) return std::nullopt;
        return Ultrapath{x.edges, meet};
    }
    if (!x.terminal.contains(g.source(y.edges.front()))) return std::nullopt;
    Ultrapath out{x.edges, y.terminal};
    out.edges.insert(out.edges.end(), y.edges.begin(), y.edges.end());
    return out;
}

/**
 * Membership in D_{(beta,B)} (F empty) or D_{(beta,B),F}. A finite x = (beta, A)
 * of the same length belongs iff A is contained in B (F empty) or A = B.
 */
inline bool cylinderContains(const Ultragraph& g, const Ultrapath& base, const EdgeSet& F, const ShiftPoint& x) {
    if (!F.isFinite()) throw std::invalid_argument("cylinder exclusion set must be finite");
    if (!F.isSubsetOf(g.epsilon(base.terminal)))
        throw std::invalid_argument("cylinder exclusion set must lie in epsilon of the base terminal");
    const std::size_t m = base.edges.size();
    EdgePath xe = x.isFinite() ? x.finite()->edges : realize(x, m + 1);
    if (xe.size() < m) return false;
    for (std::size_t i = 0; i < m; ++i)
        if (!(xe[i] == base.edges[i])) return false;
    if (xe.size() == m) {
        const VertexSet& a = x.finite()->terminal;
        return F.isEmpty() ? a.isSubsetOf(base.terminal) : a == base.terminal;
    }
    const EdgeId& next = xe[m];
    return base.terminal.contains(g.source(next)) && !F.contains(next);
}

/// First position i (1-based) where s(e_{i+1}) is not in r(e_i), if any.
inline std::optional<std::size_t> brokenLink(const Ultragraph& g, const EdgePath& p) {
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!g.hasEdge(p[i])) return i + 1;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        if (!g.range(p[i]).contains(g.source(p[i + 1]))) return i + 1;
    return std::nullopt;
}

/// s(family[k+1]) in r(family[k]) for every k >= start, decided on the affine rules.
inline bool tailConsistent(const Ultragraph& g, const std::string& family, Index start) {
    const EdgeFamily* f = g.edgeFamily(family);
    if (!f) return false;
    IndexSet ks = IndexSet::atLeast(start);
    if (!ks.isSubsetOf(f->domain)) return false;
    Affine next{f->source.a, f->source.b + static_cast<std::int64_t>(f->source.a)};
    for (const auto& c : f->clauses) {
        IndexSet guard = c.guard.intersect(ks);
        if (guard.isEmpty()) continue;
        IndexSet good;
        for (const auto& atom : c.atoms) {
            if (atom.family != f->sourceFamily) continue;
            if (atom.kind == RangeAtom::Kind::Comprehension) {
                good = good.unite(affinePreimage(next, atom.evaluate(0), guard));
                continue;
            }
            if (atom.index == next) {
                good = good.unite(guard);
            } else if (atom.index.a != next.a) {
                // a single crossing point at most
                std::int64_t num = next.b - atom.index.b;
                std::int64_t den = static_cast<std::int64_t>(atom.index.a) - static_cast<std::int64_t>(next.a);
                if (num % den == 0 && num / den >= 0) {
                    Index k = static_cast<Index>(num / den);
                    if (guard.contains(k)) good = good.unite(IndexSet::singleton(k));
                }
            }
        }
        if (!guard.isSubsetOf(good)) return false;
    }
    return true;
}

/// Closed path based at v: s(e_1) = v in r(e_k), s(e_i) != v for i > 1, links valid.
inline bool isClosedPath(const Ultragraph& g, const VertexId& v, const EdgePath& c) {
    if (c.empty() || brokenLink(g, c)) return false;
    if (!(g.source(c.front()) == v) || !g.range(c.back()).contains(v)) return false;
    for (std::size_t i = 1; i < c.size(); ++i)
        if (g.source(c[i]) == v) return false;
    return true;
}

/// Structural validity of an infinite presentation (edge links, closed blocks).
inline std::optional<std::string> checkInfinitePath(const Ultragraph& g, const ShiftPoint& x) {
    if (const auto* p = std::get_if<PeriodicPath>(&x.node)) {
        EdgePath walk = p->prefix;
        walk.insert(walk.end(), p->cycle.begin(), p->cycle.end());
        walk.push_back(p->cycle.front());
        if (auto bad = brokenLink(g, walk)) return "edge link broken at position " + std::to_string(*bad);
        return std::nullopt;
    }
    if (const auto* t = std::get_if<TailPath>(&x.node)) {
        EdgePath walk = t->prefix;
        walk.push_back({t->family, t->start});
        if (!g.edgeFamily(t->family)) return "unknown edge family '" + t->family + "'";
        if (!g.hasEdge(walk.back())) return "tail start " + walk.back().str() + " outside its domain";
        if (auto bad = brokenLink(g, walk)) return "edge link broken at position " + std::to_string(*bad);
        if (!tailConsistent(g, t->family, t->start))
            return "family tail " + t->family + "@" + std::to_string(t->start) + " is not a path";
        return std::nullopt;
    }
    if (const auto* c = std::get_if<CodedPath>(&x.node)) {
        if (!g.hasVertex(c->base)) return "unknown base vertex " + c->base.str();
        if (!isClosedPath(g, c->base, c->c1)) return "c1 is not a closed path at " + c->base.str();
        if (!isClosedPath(g, c->base, c->c2)) return "c2 is not a closed path at " + c->base.str();
        if (c->c1 == c->c2) return "c1 and c2 must differ";
        return std::nullopt;
    }
    return "not an infinite path";
}

}  // namespace ultrashift

#endif  // ULTRASHIFT_PATH_HPP

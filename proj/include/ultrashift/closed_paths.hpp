#ifndef ULTRASHIFT_CLOSED_PATHS_HPP
#define ULTRASHIFT_CLOSED_PATHS_HPP

#include <algorithm>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "ultrashift/path.hpp"

namespace ultrashift {

/// s(e_1) = base in r(e_k), and no later edge leaves base.
struct ClosedPathWitness {
    VertexId base;
    EdgePath edges;

    std::string str() const { return edgePathStr(edges); }
    friend bool operator==(const ClosedPathWitness&, const ClosedPathWitness&) = default;
};

struct ClosedPathSearch {
    std::vector<ClosedPathWitness> witnesses;
    bool exhausted = false;
};

struct ClosedPathBounds {
    Index lengthBound = 20;
    Index indexBound = 50;
    Index nodeBudget = 2000000;
};

namespace detail {

/// Edges of a finite piece of an ultragraph with their sources and ranges.
struct EdgeTable {
    std::vector<EdgeId> edges;
    std::vector<VertexId> src;
    std::vector<VertexSet> rng;

    static EdgeTable of(const Ultragraph& g, const std::vector<EdgeId>& es) {
        EdgeTable t;
        for (const auto& e : es) {
            t.edges.push_back(e);
            t.src.push_back(g.source(e));
            t.rng.push_back(g.range(e));
        }
        return t;
    }

    static EdgeTable bounded(const Ultragraph& g, Index indexBound) {
        return of(g, g.edgesBelow(indexBound + 1));
    }

    std::size_t size() const { return edges.size(); }

    /// Successors of edge i among edges that do not leave `avoid`.
    std::vector<std::size_t> next(std::size_t i, const VertexId& avoid) const {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < edges.size(); ++j)
            if (!(src[j] == avoid) && rng[i].contains(src[j])) out.push_back(j);
        return out;
    }
};

}  // namespace detail

/**
 * Closed paths at v, shortest first, using edges with index <= indexBound and
 * length <= lengthBound. `exhausted` is true iff that space was fully searched.
 */
inline ClosedPathSearch closedPaths(const Ultragraph& g, const VertexId& v, const ClosedPathBounds& b,
                                    Index limit) {
    ClosedPathSearch res;
    auto table = detail::EdgeTable::bounded(g, b.indexBound);
    std::vector<std::vector<std::size_t>> succ(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) succ[i] = table.next(i, v);

    std::vector<std::vector<std::size_t>> level;
    for (std::size_t i = 0; i < table.size(); ++i)
        if (table.src[i] == v) level.push_back({i});
    Index nodes = 0;
    for (Index len = 1; len <= b.lengthBound && !level.empty(); ++len) {
        for (const auto& p : level) {
            if (table.rng[p.back()].contains(v)) {
                ClosedPathWitness w{v, {}};
                for (auto i : p) w.edges.push_back(table.edges[i]);
                res.witnesses.push_back(std::move(w));
                if (res.witnesses.size() >= limit) return res;
            }
        }
        if (len == b.lengthBound) break;
        std::vector<std::vector<std::size_t>> next;
        for (const auto& p : level) {
            for (auto j : succ[p.back()]) {
                if (++nodes > b.nodeBudget) return res;
                auto q = p;
                q.push_back(j);
                next.push_back(std::move(q));
            }
        }
        level = std::move(next);
    }
    // exhausted unless some walk could still be extended past lengthBound
    res.exhausted = std::none_of(level.begin(), level.end(),
                                 [&](const std::vector<std::size_t>& p) { return !succ[p.back()].empty(); });
    return res;
}

struct CpDecision {
    Tri answer = Tri::Unknown;
    std::vector<ClosedPathWitness> witnesses;  // two when Yes, one when exactly one exists
    std::string phase;                          // "no-return", "pumpable-cycle", "dag-count", "bounded"
};

/**
 * #CP(v) >= 2. Exact on finite ultragraphs: no returning walk gives No; a
 * directed cycle in the returning region gives Yes by pumping; otherwise the
 * region is acyclic and returning walks are counted.
 */
inline CpDecision cpAtLeastTwo(const Ultragraph& g, const VertexId& v, const ClosedPathBounds& bounds = {}) {
    CpDecision d;
    if (!g.isFinite()) {
        auto s = closedPaths(g, v, bounds, 2);
        d.witnesses = s.witnesses;
        d.phase = "bounded";
        if (s.witnesses.size() >= 2) d.answer = Tri::Yes;
        else d.answer = Tri::Unknown;
        return d;
    }
    auto t = detail::EdgeTable::of(g, g.allEdges().members());
    const std::size_t n = t.size();
    std::vector<std::vector<std::size_t>> succ(n);
    for (std::size_t i = 0; i < n; ++i) succ[i] = t.next(i, v);

    // forward from the edges leaving v, backward from the edges returning to v
    std::vector<char> fwd(n, 0), bwd(n, 0);
    std::deque<std::size_t> q;
    for (std::size_t i = 0; i < n; ++i)
        if (t.src[i] == v) fwd[i] = 1, q.push_back(i);
    while (!q.empty()) {
        auto i = q.front();
        q.pop_front();
        for (auto j : succ[i])
            if (!fwd[j]) fwd[j] = 1, q.push_back(j);
    }
    std::vector<std::vector<std::size_t>> pred(n);
    for (std::size_t i = 0; i < n; ++i)
        for (auto j : succ[i]) pred[j].push_back(i);
    for (std::size_t i = 0; i < n; ++i)
        if (t.rng[i].contains(v)) bwd[i] = 1, q.push_back(i);
    while (!q.empty()) {
        auto i = q.front();
        q.pop_front();
        for (auto j : pred[i])
            if (!bwd[j]) bwd[j] = 1, q.push_back(j);
    }
    std::vector<char> live(n);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
        live[i] = fwd[i] && bwd[i];
        if (live[i] && t.src[i] == v) any = true;
    }
    if (!any) {
        d.answer = Tri::No;
        d.phase = "no-return";
        return d;
    }
    auto toWitness = [&](const std::vector<std::size_t>& p) {
        ClosedPathWitness w{v, {}};
        for (auto i : p) w.edges.push_back(t.edges[i]);
        return w;
    };
    // shortest live path between edge sets via BFS
    auto bfs = [&](const std::vector<std::size_t>& from, auto isTarget,
                   bool requireStep) -> std::optional<std::vector<std::size_t>> {
        std::vector<long> parent(n, -2);
        std::deque<std::size_t> qq;
        for (auto s : from) {
            if (!requireStep && isTarget(s)) return std::vector<std::size_t>{s};
            parent[s] = -1;
            qq.push_back(s);
        }
        while (!qq.empty()) {
            auto i = qq.front();
            qq.pop_front();
            for (auto j : succ[i]) {
                if (!live[j]) continue;
                if (isTarget(j)) {
                    std::vector<std::size_t> path{j};
                    for (long c = static_cast<long>(i); c != -1; c = parent[c]) path.push_back(c);
                    std::reverse(path.begin(), path.end());
                    return path;
                }
                if (parent[j] != -2) continue;
                parent[j] = static_cast<long>(i);
                qq.push_back(j);
            }
        }
        return std::nullopt;
    };

    // a live edge on a live cycle
    std::vector<int> colour(n, 0);
    std::optional<std::size_t> onCycle;
    for (std::size_t s = 0; s < n && !onCycle; ++s) {
        if (!live[s] || colour[s]) continue;
        std::vector<std::pair<std::size_t, std::size_t>> st{{s, 0}};
        colour[s] = 1;
        while (!st.empty() && !onCycle) {
            auto& [i, k] = st.back();
            if (k < succ[i].size()) {
                auto j = succ[i][k++];
                if (!live[j]) continue;
                if (colour[j] == 1) onCycle = j;
                else if (colour[j] == 0) {
                    colour[j] = 1;
                    st.push_back({j, 0});
                }
            } else {
                colour[i] = 2;
                st.pop_back();
            }
        }
    }
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < n; ++i)
        if (live[i] && t.src[i] == v) starts.push_back(i);
    auto returns = [&](std::size_t i) { return t.rng[i].contains(v); };

    if (onCycle) {
        std::size_t a = *onCycle;
        auto head = bfs(starts, [&](std::size_t i) { return i == a; }, false);
        auto loop = bfs({a}, [&](std::size_t i) { return i == a; }, true);
        auto tail = bfs({a}, returns, false);
        std::vector<std::size_t> w1 = *head, w2 = *head;
        w2.insert(w2.end(), loop->begin() + 1, loop->end());
        w1.insert(w1.end(), tail->begin() + 1, tail->end());
        w2.insert(w2.end(), tail->begin() + 1, tail->end());
        d.answer = Tri::Yes;
        d.phase = "pumpable-cycle";
        d.witnesses = {toWitness(w1), toWitness(w2)};
        return d;
    }

    // acyclic: list returning walks until two are found
    std::vector<std::vector<std::size_t>> found;
    std::vector<std::size_t> path;
    auto dfs = [&](auto&& self, std::size_t i) -> void {
        if (found.size() >= 2) return;
        path.push_back(i);
        if (returns(i)) found.push_back(path);
        for (auto j : succ[i])
            if (live[j]) self(self, j);
        path.pop_back();
    };
    for (auto s : starts) dfs(dfs, s);
    d.phase = "dag-count";
    for (const auto& p : found) d.witnesses.push_back(toWitness(p));
    d.answer = found.size() >= 2 ? Tri::Yes : Tri::No;
    return d;
}

struct RepeatedEdgeResult {
    ClosedPathWitness witness;
    bool singletonForced = false;  // CP(s(e)) = {c} and x = gamma c^infinity
    EdgePath gamma;
};

/**
 * For an edge e occurring infinitely often in x: a closed path at s(e) cut from
 * a realized window and, when CP(s(e)) is exactly {c}, the forced form gamma c^infinity.
 */
inline RepeatedEdgeResult lemmaRepeatedEdge(const Ultragraph& g, const ShiftPoint& x, const EdgeId& e,
                                            Index window = 4096) {
    if (x.isFinite() || std::holds_alternative<TailPath>(x.node))
        throw std::invalid_argument("edge " + e.str() + " does not recur in this path");
    EdgePath w = realize(x, window);
    const VertexId v = g.source(e);
    std::optional<std::size_t> first;
    for (std::size_t i = w.size() / 2; i < w.size(); ++i)
        if (w[i] == e) {
            first = i;
            break;
        }
    if (!first) throw std::invalid_argument("edge " + e.str() + " does not recur in this path");
    std::optional<std::size_t> back;
    for (std::size_t i = *first + 1; i < w.size(); ++i)
        if (g.source(w[i]) == v) {
            back = i;
            break;
        }
    if (!back) throw std::invalid_argument("no return to " + v.str() + " inside the window");
    RepeatedEdgeResult r;
    r.witness = {v, EdgePath(w.begin() + static_cast<std::ptrdiff_t>(*first),
                             w.begin() + static_cast<std::ptrdiff_t>(*back))};
    if (!g.isFinite()) return r;
    auto cp = cpAtLeastTwo(g, v);
    if (cp.answer != Tri::No || cp.witnesses.size() != 1) return r;
    const EdgePath& c = cp.witnesses.front().edges;
    // x = gamma c c c ...: from the first visit to v onward the window repeats c
    std::optional<std::size_t> p;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (g.source(w[i]) == v) {
            p = i;
            break;
        }
    if (!p) return r;
    for (std::size_t i = *p; i < w.size(); ++i)
        if (!(w[i] == c[(i - *p) % c.size()])) return r;
    r.singletonForced = true;
    r.witness = cp.witnesses.front();
    r.gamma = EdgePath(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(*p));
    return r;
}

}  // namespace ultrashift

#endif  // ULTRASHIFT_CLOSED_PATHS_HPP

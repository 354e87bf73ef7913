#ifndef ULTRASHIFT_CHAOS_HPP
#define ULTRASHIFT_CHAOS_HPP

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "ultrashift/closed_paths.hpp"

namespace ultrashift {

namespace detail {

using Wide = __int128;

/// min and max of c*x + d over x in s (nullopt = unbounded on that side).
struct Extent {
    std::optional<Wide> lo, hi;
};

inline Extent affineExtent(Wide c, Wide d, const IndexSet& s) {
    Extent e;
    Wide first = c * static_cast<Wide>(*s.min()) + d;
    if (s.isFinite()) {
        Wide last = c * static_cast<Wide>(*s.max()) + d;
        e.lo = std::min(first, last);
        e.hi = std::max(first, last);
    } else if (c > 0) {
        e.lo = first;
    } else if (c < 0) {
        e.hi = first;
    } else {
        e.lo = e.hi = first;
    }
    return e;
}

}  // namespace detail

/// Checks level(w) > level(s(e)) for every edge e and every w in r(e), on the affine rules.
/// Returns a description of the first violation, or nullopt when the grading holds.
inline std::optional<std::string> gradingViolation(const Ultragraph& g, const Grading& levels) {
    using detail::Wide;
    for (const auto& vf : g.vertexFamilies())
        if (!levels.count(vf.name)) return "no level function for family '" + vf.name + "'";
    for (const auto& f : g.edgeFamilies()) {
        const LevelFunction& ls = levels.at(f.sourceFamily);
        // level(s(e_k)) = As*k + Bs
        Wide As = static_cast<Wide>(ls.slope) * static_cast<Wide>(f.source.a);
        Wide Bs = static_cast<Wide>(ls.slope) * static_cast<Wide>(f.source.b) + ls.offset;
        for (const auto& c : f.clauses) {
            IndexSet ks = c.guard.intersect(f.domain);
            if (ks.isEmpty()) continue;
            for (const auto& atom : c.atoms) {
                const LevelFunction& lw = levels.at(atom.family);
                if (atom.kind == RangeAtom::Kind::Singleton) {
                    Wide Aw = static_cast<Wide>(lw.slope) * static_cast<Wide>(atom.index.a);
                    Wide Bw = static_cast<Wide>(lw.slope) * static_cast<Wide>(atom.index.b) + lw.offset;
                    auto ext = detail::affineExtent(Aw - As, Bw - Bs, ks);
                    if (!ext.lo || *ext.lo <= 0)
                        return "edge family '" + f.name + "': level does not increase into " + atom.family;
                    continue;
                }
                IndexSet js = atom.evaluate(0);
                if (js.isEmpty()) continue;
                // members are atom.family[n] for n in js: level = slope*n + offset
                auto target = detail::affineExtent(lw.slope, lw.offset, js);
                auto source = detail::affineExtent(As, Bs, ks);
                if (!target.lo || !source.hi || *target.lo <= *source.hi)
                    return "edge family '" + f.name + "': level does not increase into " + atom.family;
            }
        }
    }
    return std::nullopt;
}

struct GradingSearchOptions {
    std::int64_t coefficientBound = 4;
    std::size_t maxFamilies = 3;

    friend bool operator==(const GradingSearchOptions&, const GradingSearchOptions&) = default;
};

/**
 * Searches per-family level functions c*n + d with |c|, |d| <= bound, in
 * order of total |c| + |d| and then lexicographically by family name.
 */
inline std::optional<Grading> searchGrading(const Ultragraph& g, const GradingSearchOptions& opt = {}) {
    std::vector<std::string> fams;
    for (const auto& vf : g.vertexFamilies()) fams.push_back(vf.name);
    std::sort(fams.begin(), fams.end());
    if (fams.empty() || fams.size() > opt.maxFamilies) return std::nullopt;
    std::vector<LevelFunction> choices;
    for (std::int64_t c = -opt.coefficientBound; c <= opt.coefficientBound; ++c)
        for (std::int64_t d = -opt.coefficientBound; d <= opt.coefficientBound; ++d) choices.push_back({c, d});
    auto weight = [](const LevelFunction& l) { return std::abs(l.slope) + std::abs(l.offset); };
    std::sort(choices.begin(), choices.end(), [&](const LevelFunction& a, const LevelFunction& b) {
        if (weight(a) != weight(b)) return weight(a) < weight(b);
        if (a.slope != b.slope) return a.slope < b.slope;
        return a.offset < b.offset;
    });
    // tuples of choice indices, ordered by total weight then lexicographically
    const std::size_t m = fams.size();
    std::int64_t maxWeight = 2 * opt.coefficientBound * static_cast<std::int64_t>(m);
    std::vector<std::size_t> idx(m);
    std::optional<Grading> found;
    auto recurse = [&](auto&& self, std::size_t pos, std::int64_t remaining) -> void {
        if (found) return;
        if (pos == m) {
            if (remaining != 0) return;
            Grading gr;
            for (std::size_t i = 0; i < m; ++i) gr[fams[i]] = choices[idx[i]];
            if (!gradingViolation(g, gr)) found = gr;
            return;
        }
        for (std::size_t i = 0; i < choices.size() && !found; ++i) {
            std::int64_t w = weight(choices[i]);
            if (w > remaining) continue;
            idx[pos] = i;
            self(self, pos + 1, remaining - w);
        }
    };
    for (std::int64_t total = 0; total <= maxWeight && !found; ++total) recurse(recurse, 0, total);
    return found;
}

struct ChaosBounds {
    Index lengthBound = 20;
    Index indexBound = 50;
    GradingSearchOptions grading;

    friend bool operator==(const ChaosBounds&, const ChaosBounds&) = default;
};

struct ChaosVerdict {
    enum class Kind { Chaotic, NotChaotic, Unknown };
    enum class Certificate { None, FiniteExhaustive, Grading };

    Kind kind = Kind::Unknown;
    VertexId vertex;
    ClosedPathWitness c1, c2;
    Certificate certificate = Certificate::None;
    Grading levels;
    bool gradingSupplied = false;
    ChaosBounds bounds;

    friend bool operator==(const ChaosVerdict&, const ChaosVerdict&) = default;

    std::string kindName() const {
        switch (kind) {
            case Kind::Chaotic: return "Chaotic";
            case Kind::NotChaotic: return "NotChaotic";
            default: return "Unknown";
        }
    }
    std::string certificateName() const {
        switch (certificate) {
            case Certificate::FiniteExhaustive: return "FiniteExhaustive";
            case Certificate::Grading: return "Grading";
            default: return "none";
        }
    }
};

/**
 * Li-Yorke chaos holds iff some vertex has at least two closed paths. Finite
 * ultragraphs are decided exactly; infinite ones by a grading (no closed
 * paths at all) or a bounded closed-path search, else Unknown.
 */
inline ChaosVerdict decideChaos(const Ultragraph& g, const ChaosBounds& bounds = {}) {
    ChaosVerdict v;
    v.bounds = bounds;
    ClosedPathBounds cb{bounds.lengthBound, bounds.indexBound};
    if (g.isFinite()) {
        for (const auto& w : g.allVertices().members()) {
            auto cp = cpAtLeastTwo(g, w, cb);
            if (cp.answer == Tri::Yes) {
                v.kind = ChaosVerdict::Kind::Chaotic;
                v.vertex = w;
                v.c1 = cp.witnesses[0];
                v.c2 = cp.witnesses[1];
                return v;
            }
        }
        v.kind = ChaosVerdict::Kind::NotChaotic;
        v.certificate = ChaosVerdict::Certificate::FiniteExhaustive;
        return v;
    }
    if (g.gradingHint() && !gradingViolation(g, *g.gradingHint())) {
        v.kind = ChaosVerdict::Kind::NotChaotic;
        v.certificate = ChaosVerdict::Certificate::Grading;
        v.levels = *g.gradingHint();
        v.gradingSupplied = true;
        return v;
    }
    for (const auto& vf : g.vertexFamilies()) {
        for (Index n : vf.domain.membersIn(0, bounds.indexBound + 1)) {
            VertexId w{vf.name, n};
            auto s = closedPaths(g, w, cb, 2);
            if (s.witnesses.size() >= 2) {
                v.kind = ChaosVerdict::Kind::Chaotic;
                v.vertex = w;
                v.c1 = s.witnesses[0];
                v.c2 = s.witnesses[1];
                return v;
            }
        }
    }
    if (auto gr = searchGrading(g, bounds.grading)) {
        v.kind = ChaosVerdict::Kind::NotChaotic;
        v.certificate = ChaosVerdict::Certificate::Grading;
        v.levels = *gr;
        return v;
    }
    v.kind = ChaosVerdict::Kind::Unknown;
    return v;
}

}  // namespace ultrashift

#endif  // ULTRASHIFT_CHAOS_HPP

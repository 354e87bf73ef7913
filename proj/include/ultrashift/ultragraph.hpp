#ifndef ULTRASHIFT_ULTRAGRAPH_HPP
#define ULTRASHIFT_ULTRAGRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ultrashift/affine.hpp"
#include "ultrashift/diagnostics.hpp"
#include "ultrashift/family_set.hpp"

namespace ultrashift {

class OutOfDomain : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

struct VertexFamily {
    std::string name;
    IndexSet domain = IndexSet::all();

    friend bool operator==(const VertexFamily&, const VertexFamily&) = default;
};

/// One atom of a range body: either `fam[a*k+b]` (depends on the edge index k)
/// or a comprehension `{ fam[a*j+b] : j in guard }` (independent of k).
struct RangeAtom {
    enum class Kind { Singleton, Comprehension };
    Kind kind = Kind::Singleton;
    std::string family;
    Affine index;
    IndexSet guard;          // binder domain for comprehensions
    std::string binder = "j";

    bool dependsOnEdgeIndex() const { return kind == Kind::Singleton && !index.isConstant(); }

    /// Vertex indices contributed at edge index k.
    IndexSet evaluate(Index k) const {
        if (kind == Kind::Singleton) return IndexSet::singleton(index(k));
        return affineImage(index, guard);
    }

    friend bool operator==(const RangeAtom& x, const RangeAtom& y) {
        return x.kind == y.kind && x.family == y.family && x.index == y.index &&
               (x.kind == Kind::Singleton || x.guard == y.guard);
    }
};

struct RangeClause {
    IndexSet guard;
    std::vector<RangeAtom> atoms;

    bool isConstant() const {
        return std::none_of(atoms.begin(), atoms.end(),
                            [](const RangeAtom& a) { return a.dependsOnEdgeIndex(); });
    }

    VertexSet evaluate(Index k) const {
        VertexSet out;
        for (const auto& atom : atoms) out = out.unite(VertexSet::of(atom.family, atom.evaluate(k)));
        return out;
    }

    friend bool operator==(const RangeClause&, const RangeClause&) = default;
};

struct EdgeFamily {
    std::string name;
    std::string var = "k";
    IndexSet domain = IndexSet::all();
    std::string sourceFamily;
    Affine source;
    std::vector<RangeClause> clauses;

    const RangeClause* clauseFor(Index k) const {
        for (const auto& c : clauses)
            if (c.guard.contains(k)) return &c;
        return nullptr;
    }

    friend bool operator==(const EdgeFamily& x, const EdgeFamily& y) {
        return x.name == y.name && x.domain == y.domain && x.sourceFamily == y.sourceFamily &&
               x.source == y.source && x.clauses == y.clauses;
    }
};

/// level(fam[n]) = slope*n + offset
struct LevelFunction {
    std::int64_t slope = 0;
    std::int64_t offset = 0;

    std::int64_t operator()(Index n) const { return slope * static_cast<std::int64_t>(n) + offset; }
    friend bool operator==(const LevelFunction&, const LevelFunction&) = default;
};

using Grading = std::map<std::string, LevelFunction>;

/**
 * A finitely presented ultragraph: indexed vertex families and edge families
 * whose source and range maps are affine rules in the edge index.
 */
class Ultragraph {
public:
    Ultragraph() = default;
    Ultragraph(std::vector<VertexFamily> vertices, std::vector<EdgeFamily> edges,
               std::optional<Grading> grading = std::nullopt)
        : vertexFamilies_(std::move(vertices)), edgeFamilies_(std::move(edges)),
          grading_(std::move(grading)) {}

    const std::vector<VertexFamily>& vertexFamilies() const { return vertexFamilies_; }
    const std::vector<EdgeFamily>& edgeFamilies() const { return edgeFamilies_; }
    const std::optional<Grading>& gradingHint() const { return grading_; }

    const VertexFamily* vertexFamily(const std::string& name) const {
        for (const auto& f : vertexFamilies_)
            if (f.name == name) return &f;
        return nullptr;
    }

    const EdgeFamily* edgeFamily(const std::string& name) const {
        for (const auto& f : edgeFamilies_)
            if (f.name == name) return &f;
        return nullptr;
    }

    bool hasVertex(const VertexId& v) const {
        const auto* f = vertexFamily(v.family);
        return f && f->domain.contains(v.index);
    }

    bool hasEdge(const EdgeId& e) const {
        const auto* f = edgeFamily(e.family);
        return f && f->domain.contains(e.index);
    }

    VertexId source(const EdgeId& e) const {
        const auto& f = requireEdge(e);
        return {f.sourceFamily, f.source(e.index)};
    }

    VertexSet range(const EdgeId& e) const {
        const auto& f = requireEdge(e);
        const auto* clause = f.clauseFor(e.index);
        if (!clause) throw OutOfDomain("no range clause covers " + e.str());
        return clause->evaluate(e.index);
    }

    /// All edges whose source lies in `a`.
    EdgeSet epsilon(const VertexSet& a) const {
        EdgeSet out;
        for (const auto& f : edgeFamilies_) {
            IndexSet targets = a.indicesOf(f.sourceFamily);
            if (targets.isEmpty()) continue;
            out = out.unite(EdgeSet::of(f.name, affinePreimage(f.source, targets, f.domain)));
        }
        return out;
    }

    bool isInfiniteEmitter(const VertexSet& a) const { return !epsilon(a).isFinite(); }

    bool isFinite() const {
        return std::all_of(vertexFamilies_.begin(), vertexFamilies_.end(),
                           [](const VertexFamily& f) { return f.domain.isFinite(); }) &&
               std::all_of(edgeFamilies_.begin(), edgeFamilies_.end(),
                           [](const EdgeFamily& f) { return f.domain.isFinite(); });
    }

    VertexSet allVertices() const {
        VertexSet out;
        for (const auto& f : vertexFamilies_) out = out.unite(VertexSet::of(f.name, f.domain));
        return out;
    }

    EdgeSet allEdges() const {
        EdgeSet out;
        for (const auto& f : edgeFamilies_) out = out.unite(EdgeSet::of(f.name, f.domain));
        return out;
    }

    /// Vertices with at least one outgoing edge.
    VertexSet emitters() const {
        VertexSet out;
        for (const auto& f : edgeFamilies_)
            out = out.unite(VertexSet::of(f.sourceFamily, affineImage(f.source, f.domain)));
        return out;
    }

    /// Union of all ranges.
    VertexSet rangeSupport() const {
        VertexSet out;
        for (const auto& f : edgeFamilies_) {
            for (const auto& c : f.clauses) {
                IndexSet ks = c.guard.intersect(f.domain);
                if (ks.isEmpty()) continue;
                for (const auto& atom : c.atoms) {
                    IndexSet idx = atom.kind == RangeAtom::Kind::Singleton ? affineImage(atom.index, ks)
                                                                           : atom.evaluate(0);
                    out = out.unite(VertexSet::of(atom.family, idx));
                }
            }
        }
        return out;
    }

    /// Edges listed by family with index < bound, in family order.
    std::vector<EdgeId> edgesBelow(Index bound) const {
        std::vector<EdgeId> out;
        for (const auto& f : edgeFamilies_)
            for (Index k : f.domain.membersIn(0, bound)) out.push_back({f.name, k});
        return out;
    }

    /// Structural checks. Returns an empty list when the presentation is valid.
    DiagnosticList validate() const {
        DiagnosticList out;
        auto report = [&](const char* code, std::string msg) { out.push_back({code, std::move(msg)}); };
        std::map<std::string, int> seen;
        for (const auto& f : vertexFamilies_)
            if (seen[f.name]++) report(codes::kDuplicate, "family '" + f.name + "' declared twice");
        for (const auto& f : edgeFamilies_)
            if (seen[f.name]++) report(codes::kDuplicate, "family '" + f.name + "' declared twice");
        if (!out.empty()) return out;

        for (const auto& f : edgeFamilies_) {
            const auto* sf = vertexFamily(f.sourceFamily);
            if (!sf) {
                report(codes::kUndeclared, "edge family '" + f.name + "' has undeclared source family '" +
                                               f.sourceFamily + "'");
                continue;
            }
            if (!f.domain.isEmpty() && f.source.firstValid() > *f.domain.min())
                report(codes::kDomain, "source rule of '" + f.name + "' is negative on its domain");
            else if (!affineImage(f.source, f.domain).isSubsetOf(sf->domain))
                report(codes::kDomain, "source rule of '" + f.name + "' leaves the vertex domain of '" +
                                           sf->name + "'");
            IndexSet covered;
            for (std::size_t i = 0; i < f.clauses.size(); ++i) {
                const auto& c = f.clauses[i];
                if (!c.guard.intersect(covered).isEmpty())
                    report(codes::kGuardOverlap, "range guards of '" + f.name + "' overlap");
                covered = covered.unite(c.guard);
                IndexSet ks = c.guard.intersect(f.domain);
                if (c.atoms.empty()) report(codes::kEmptyRange, "empty range body in '" + f.name + "'");
                for (const auto& atom : c.atoms) {
                    const auto* vf = vertexFamily(atom.family);
                    if (!vf) {
                        report(codes::kUndeclared, "range of '" + f.name + "' uses undeclared family '" +
                                                       atom.family + "'");
                        continue;
                    }
                    IndexSet idx;
                    if (atom.kind == RangeAtom::Kind::Singleton) {
                        if (!ks.isEmpty() && atom.index.firstValid() > *ks.min()) {
                            report(codes::kDomain, "range rule of '" + f.name + "' is negative");
                            continue;
                        }
                        idx = affineImage(atom.index, ks);
                    } else {
                        if (!atom.guard.isEmpty() && atom.index.firstValid() > *atom.guard.min()) {
                            report(codes::kDomain, "comprehension in '" + f.name + "' is negative");
                            continue;
                        }
                        idx = atom.evaluate(0);
                        if (idx.isEmpty() && !ks.isEmpty() && c.atoms.size() == 1)
                            report(codes::kEmptyRange, "range of '" + f.name + "' is empty");
                    }
                    if (!idx.isSubsetOf(vf->domain))
                        report(codes::kDomain, "range of '" + f.name + "' leaves the vertex domain of '" +
                                                   vf->name + "'");
                }
            }
            if (!f.domain.isSubsetOf(covered))
                report(codes::kGuardCover, "range guards of '" + f.name + "' do not cover its domain");
        }
        if (!out.empty()) return out;

        VertexSet sinks = allVertices().minus(emitters());
        if (!sinks.isEmpty()) {
            std::string which = sinks.serialize();
            auto listed = sinks.members();
            if (!listed.empty()) which = listed.front().str();
            report(codes::kSink, "vertex " + which + " has no outgoing edge");
        }
        return out;
    }

    friend bool operator==(const Ultragraph&, const Ultragraph&) = default;

private:
    std::vector<VertexFamily> vertexFamilies_;
    std::vector<EdgeFamily> edgeFamilies_;
    std::optional<Grading> grading_;

    const EdgeFamily& requireEdge(const EdgeId& e) const {
        const auto* f = edgeFamily(e.family);
        if (!f) throw OutOfDomain("unknown edge family '" + e.family + "'");
        if (!f->domain.contains(e.index)) throw OutOfDomain("edge " + e.str() + " outside its domain");
        return *f;
    }
};

}  // namespace ultrashift

#endif  // ULTRASHIFT_ULTRAGRAPH_HPP

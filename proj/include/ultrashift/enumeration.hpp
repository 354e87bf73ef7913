#ifndef ULTRASHIFT_ENUMERATION_HPP
#define ULTRASHIFT_ENUMERATION_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "ultrashift/emitters.hpp"
#include "ultrashift/path.hpp"

namespace ultrashift {

enum class EnumerationOrder {
    Canonical,          // serialization length, then lexicographic
    ReverseWithinLength  // serialization length, then reverse lexicographic
};

struct EnumerationOptions {
    Index anchorBound = 3;   // generators with index below this feed the G^0 closure
    Index closureDepth = 3;  // maximum number of generators combined
    EnumerationOrder order = EnumerationOrder::Canonical;
    EmitterSearchOptions emitters;
};

inline Index decimalDigits(Index n) {
    Index d = 1;
    while (n >= 10) {
        n /= 10;
        ++d;
    }
    return d;
}

/// Serialization length of the one-vertex set {fam[n]}.
inline Index singletonKeyLength(const std::string& fam, Index n) {
    return fam.size() + decimalDigits(n + 1) + decimalDigits(n) + 5;
}

/// Indices n with singletonKeyLength(fam, n) == len, as a half-open index window.
inline std::pair<Index, Index> singletonWindow(const std::string& fam, Index len) {
    Index lo = ~Index{0}, hi = 0;
    Index base = 1;
    for (Index d = 1; d <= 19; ++d, base *= 10) {
        Index first = d == 1 ? 0 : base;
        Index last = base * 10 - 1;  // d digits; n + 1 has d digits except at `last`
        if (fam.size() + 2 * d + 5 == len) {
            lo = std::min(lo, first);
            hi = std::max(hi, last);  // excludes `last`
        }
        if (fam.size() + 2 * d + 6 == len) {
            lo = std::min(lo, last);
            hi = std::max(hi, last + 1);
        }
    }
    if (lo > hi) return {0, 0};
    return {lo, hi};
}

/**
 * The fixed listing p_1, p_2, ... of the ultrapath space used by the metric.
 *
 * Length-zero elements are drawn from singletons, ranges, the union and
 * intersection closure of a finite anchor pool, and the minimal infinite
 * emitters. An element (alpha, B) with |alpha| >= 1 has B among r(alpha_last),
 * the singletons inside it and the minimal infinite emitters inside it.
 * Elements are grouped by serialization length and sorted within a group.
 */
class UltrapathEnumeration {
public:
    struct Entry {
        std::string key;
        Ultrapath path;
    };

    struct RankResult {
        enum class Status { Found, Beyond, NotEnumerated };
        Status status = Status::NotEnumerated;
        Index rank = 0;
    };

    explicit UltrapathEnumeration(const Ultragraph& g, EnumerationOptions opt = {}) : g_(g), opt_(opt) {
        minFamily_ = ~Index{0};
        for (const auto& f : g_.vertexFamilies()) minFamily_ = std::min<Index>(minFamily_, f.name.size());
        for (const auto& f : g_.edgeFamilies()) minEdgeKey_ = std::min<Index>(minEdgeKey_, f.name.size() + 3);
        buildClosure();
        auto res = minimalEmittersForPath(g_, {}, opt_.emitters);
        for (auto& t : res.emitters) extras_.push_back(t.set);
    }

    const Ultragraph& graph() const { return g_; }
    const EnumerationOptions& options() const { return opt_; }
    Index minSetKey() const { return minFamily_ + 7; }

    /// Elements with serialization length exactly L, in order.
    const std::vector<Entry>& shell(Index L) {
        auto it = shells_.find(L);
        if (it != shells_.end()) return it->second;
        std::vector<Entry> out;
        std::set<std::string> seen;
        auto add = [&](Ultrapath p) {
            std::string k = p.serialize();
            if (k.size() != L || !seen.insert(k).second) return;
            out.push_back({std::move(k), std::move(p)});
        };
        for (const auto& s : domainSets(L)) add(Ultrapath{{}, s});
        EdgePath stack;
        extendPaths(stack, 0, L, add);
        sortShell(out);
        return shells_.emplace(L, std::move(out)).first->second;
    }

    /// Number of elements with serialization length < L.
    Index countBefore(Index L) {
        Index n = 0;
        for (Index l = 1; l < L; ++l) n += shell(l).size();
        return n;
    }

    /// Number of elements with length < L, stopping early once `cap` is reached.
    Index countBeforeCapped(Index L, Index cap) {
        Index n = 0;
        for (Index l = 1; l < L && n < cap; ++l) n += shell(l).size();
        return n;
    }

    std::vector<Ultrapath> enumerate(Index n) {
        std::vector<Ultrapath> out;
        for (Index L = 1; out.size() < n; ++L) {
            if (L > kMaxKeyLength) break;
            for (const auto& e : shell(L)) {
                if (out.size() == n) break;
                out.push_back(e.path);
            }
        }
        return out;
    }

    RankResult rankOf(const Ultrapath& p, Index maxRank) { return rankOfKey(p.serialize(), maxRank); }

    RankResult rankOfKey(const std::string& key, Index maxRank) {
        Index before = countBeforeCapped(key.size(), maxRank);
        if (before >= maxRank) return {RankResult::Status::Beyond, 0};
        const auto& sh = shell(key.size());
        auto pos = position(sh, key);
        if (!pos) return {RankResult::Status::NotEnumerated, 0};
        Index rank = before + *pos + 1;
        if (rank > maxRank) return {RankResult::Status::Beyond, 0};
        return {RankResult::Status::Found, rank};
    }

    /// Preference between two keys of equal length under the configured order.
    bool precedes(const std::string& a, const std::string& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return opt_.order == EnumerationOrder::Canonical ? a < b : a > b;
    }

    /// Length-zero elements with serialization length L.
    std::vector<VertexSet> domainSets(Index L) {
        std::vector<VertexSet> out = nonSingletonDomainSets(L);
        for (const auto& f : g_.vertexFamilies()) {
            auto [lo, hi] = singletonWindow(f.name, L);
            for (Index n : f.domain.membersIn(lo, hi)) out.push_back(VertexSet::singleton({f.name, n}));
        }
        return out;
    }

    /// Length-zero elements of length L that are not singletons.
    const std::vector<VertexSet>& nonSingletonDomainSets(Index L) {
        auto it = domainNonSingletons_.find(L);
        if (it != domainNonSingletons_.end()) return it->second;
        std::vector<VertexSet> out;
        std::set<std::string> seen;
        auto add = [&](const VertexSet& s) {
            if (isSingleton(s)) return;
            std::string k = s.serialize();
            if (k.size() == L && seen.insert(k).second) out.push_back(s);
        };
        for (const auto& s : rangesOfLength(L)) add(s);
        auto c = closureByLength_.find(L);
        if (c != closureByLength_.end())
            for (const auto& s : c->second) add(s);
        for (const auto& s : extras_) add(s);
        return domainNonSingletons_.emplace(L, std::move(out)).first->second;
    }

    /// Terminals B of length len allowed after the edge e, excluding singletons.
    std::vector<VertexSet> nonSingletonTerminals(const EdgeId& e, Index len) {
        std::vector<VertexSet> out;
        const VertexSet& r = rangeOf(e);
        if (!isSingleton(r) && r.serialize().size() == len) out.push_back(r);
        for (const auto& m : extras_)
            if (!isSingleton(m) && !(m == r) && m.isSubsetOf(r) && m.serialize().size() == len) out.push_back(m);
        return out;
    }

    /// All terminals B of length len allowed after e.
    std::vector<VertexSet> terminals(const EdgeId& e, Index len) {
        std::vector<VertexSet> out = nonSingletonTerminals(e, len);
        const VertexSet& r = rangeOf(e);
        for (const auto& [fam, idx] : r.atoms()) {
            auto [lo, hi] = singletonWindow(fam, len);
            for (Index n : idx.membersIn(lo, hi)) out.push_back(VertexSet::singleton({fam, n}));
        }
        return out;
    }

    /// Is B a permitted terminal after e (or a length-zero element when e is absent)?
    bool permittedSet(const std::optional<EdgeId>& e, const VertexSet& B) {
        if (B.isEmpty()) return false;
        std::string k = B.serialize();
        if (e) {
            const VertexSet& r = rangeOf(*e);
            if (!B.isSubsetOf(r)) return false;
            if (isSingleton(B) || B == r) return true;
            return std::find(extras_.begin(), extras_.end(), B) != extras_.end();
        }
        if (isSingleton(B)) return g_.hasVertex(B.members().front());
        const auto& list = nonSingletonDomainSets(k.size());
        return std::find(list.begin(), list.end(), B) != list.end();
    }

    /// Whether p is an element of the listing (independent of its rank).
    bool contains(const Ultrapath& p) {
        if (p.edges.empty()) return permittedSet(std::nullopt, p.terminal);
        if (brokenLink(g_, p.edges)) return false;
        return permittedSet(p.edges.back(), p.terminal);
    }

    static constexpr Index kMaxKeyLength = 512;

private:
    const Ultragraph& g_;
    EnumerationOptions opt_;
    Index minFamily_ = 1;
    Index minEdgeKey_ = ~Index{0};
    std::map<Index, std::vector<VertexSet>> closureByLength_;
    std::vector<VertexSet> extras_;
    std::map<Index, std::vector<Entry>> shells_;
    std::map<Index, std::vector<VertexSet>> domainNonSingletons_;
    std::map<Index, std::vector<VertexSet>> rangesByLength_;
    std::unordered_map<std::string, VertexSet> rangeCache_;

    static bool isSingleton(const VertexSet& s) { return s.cardinality() == Cardinality::finite(1); }

    const VertexSet& rangeOf(const EdgeId& e) {
        std::string k = e.str();
        auto it = rangeCache_.find(k);
        if (it != rangeCache_.end()) return it->second;
        if (rangeCache_.size() > 200000) rangeCache_.clear();
        return rangeCache_.emplace(k, g_.range(e)).first->second;
    }

    void sortShell(std::vector<Entry>& v) const {
        if (opt_.order == EnumerationOrder::Canonical)
            std::sort(v.begin(), v.end(), [](const Entry& a, const Entry& b) { return a.key < b.key; });
        else
            std::sort(v.begin(), v.end(), [](const Entry& a, const Entry& b) { return a.key > b.key; });
    }

    std::optional<Index> position(const std::vector<Entry>& sh, const std::string& key) const {
        auto cmp = [this](const Entry& a, const std::string& k) {
            return opt_.order == EnumerationOrder::Canonical ? a.key < k : a.key > k;
        };
        auto it = std::lower_bound(sh.begin(), sh.end(), key, cmp);
        if (it == sh.end() || it->key != key) return std::nullopt;
        return static_cast<Index>(it - sh.begin());
    }

    void buildClosure() {
        std::vector<VertexSet> gens;
        auto addGen = [&](VertexSet s) {
            if (!s.isEmpty() && std::find(gens.begin(), gens.end(), s) == gens.end()) gens.push_back(std::move(s));
        };
        for (const auto& f : g_.vertexFamilies())
            for (Index n : f.domain.membersIn(0, opt_.anchorBound)) addGen(VertexSet::singleton({f.name, n}));
        for (const auto& f : g_.edgeFamilies())
            for (Index k : f.domain.membersIn(0, opt_.anchorBound)) addGen(g_.range({f.name, k}));
        std::set<std::string> seen;
        std::vector<VertexSet> level = gens;
        auto record = [&](const VertexSet& s) {
            if (s.isEmpty()) return false;
            std::string k = s.serialize();
            if (!seen.insert(k).second) return false;
            closureByLength_[k.size()].push_back(s);
            return true;
        };
        for (const auto& s : gens) record(s);
        for (Index depth = 2; depth <= opt_.closureDepth; ++depth) {
            std::vector<VertexSet> next;
            for (const auto& a : level)
                for (const auto& b : gens) {
                    VertexSet u = a.unite(b);
                    if (record(u)) next.push_back(u);
                    VertexSet m = a.intersect(b);
                    if (record(m)) next.push_back(m);
                }
            level = std::move(next);
        }
    }

    /// Lower bound on the key length of a clause value from its k-dependent members outside
    /// `absorbed`; 0 when all of them are absorbed.
    static Index dependentKeyBound(const RangeClause& c, Index k, const VertexSet& absorbed) {
        std::map<std::string, std::set<Index>> byFamily;
        for (const auto& a : c.atoms) {
            if (!a.dependsOnEdgeIndex()) continue;
            Index m = a.index(k);
            if (!absorbed.contains({a.family, m})) byFamily[a.family].insert(m);
        }
        Index best = 0;
        for (const auto& [fam, ms] : byFamily) {
            // fam ":" T ";" m1,m2,... ";" period ";" residues ";" with T > max
            Index len = fam.size() + 5 + decimalDigits(*ms.rbegin() + 1) + (ms.size() - 1);
            for (Index m : ms) len += decimalDigits(m);
            best = std::max(best, len);
        }
        return best;
    }

    /// Distinct range values r(e) with serialization length L.
    const std::vector<VertexSet>& rangesOfLength(Index L) {
        auto it = rangesByLength_.find(L);
        if (it != rangesByLength_.end()) return it->second;
        std::vector<VertexSet> out;
        std::set<std::string> seen;
        auto add = [&](const VertexSet& s) {
            std::string k = s.serialize();
            if (k.size() == L && seen.insert(k).second) out.push_back(s);
        };
        for (const auto& f : g_.edgeFamilies()) {
            for (const auto& c : f.clauses) {
                IndexSet ks = c.guard.intersect(f.domain);
                if (ks.isEmpty()) continue;
                if (c.isConstant()) {
                    add(c.evaluate(*ks.min()));
                    continue;
                }
                // any k-dependent singleton not absorbed costs at least its singleton key length
                Index absorbWindow = 0;
                VertexSet constantPart;
                for (const auto& a : c.atoms)
                    if (!a.dependsOnEdgeIndex()) constantPart = constantPart.unite(VertexSet::of(a.family, a.evaluate(0)));
                for (const auto& [fam, idx] : constantPart.atoms())
                    absorbWindow = std::max(absorbWindow, idx.threshold() + idx.period());
                absorbWindow = absorbWindow * 4 + ks.threshold() + ks.period();
                bool constantReached = false;
                // absorption by the constant part repeats with period <= absorbWindow, and the key
                // of every non-absorbed value grows with k, so a long enough dead run ends the scan
                Index deadRun = 0;
                for (auto k = ks.nextMember(0); k; k = ks.nextMember(*k + 1)) {
                    if (*k > absorbWindow) {
                        if (dependentKeyBound(c, *k, constantPart) > L) {
                            if (++deadRun > absorbWindow) break;
                            continue;
                        }
                        deadRun = 0;
                    }
                    VertexSet v = c.evaluate(*k);
                    if (v == constantPart) constantReached = true;
                    add(v);
                }
                if (!constantReached && !constantPart.isEmpty()) {
                    // beyond the loop every value either grows or collapses to the constant part
                    for (auto k = ks.nextMember(0); k && *k <= absorbWindow * 2 + 64; k = ks.nextMember(*k + 1))
                        if (c.evaluate(*k) == constantPart) {
                            add(constantPart);
                            break;
                        }
                }
            }
        }
        return rangesByLength_.emplace(L, std::move(out)).first->second;
    }

    /// Candidate next edges: all edges (stack empty) or those leaving r(last).
    EdgeSet nextEdges(const EdgePath& stack) {
        if (stack.empty()) return g_.allEdges();
        return g_.epsilon(rangeOf(stack.back()));
    }

    template <class Add>
    void extendPaths(EdgePath& stack, Index used, Index L, Add& add) {
        // used = length of the edge string so far
        Index sep = stack.empty() ? 0 : 1;
        if (used + sep + minEdgeKey_ + 1 + minSetKey() > L) return;
        Index budget = L - used - sep - 1 - minSetKey();  // room for the next edge key
        EdgeSet next = nextEdges(stack);
        for (const auto& [fam, idx] : next.atoms()) {
            if (fam.size() + 3 > budget) continue;
            Index maxDigits = budget - fam.size() - 2;
            Index hi = 1;
            for (Index d = 0; d < maxDigits && hi < (Index{1} << 60); ++d) hi *= 10;
            for (Index k : idx.membersIn(0, hi)) {
                EdgeId e{fam, k};
                Index eLen = fam.size() + 2 + decimalDigits(k);
                stack.push_back(e);
                Index pathLen = used + sep + eLen;
                for (auto& b : terminals(e, L - pathLen - 1)) add(Ultrapath{stack, std::move(b)});
                extendPaths(stack, pathLen, L, add);
                stack.pop_back();
            }
        }
    }
};

}  // namespace ultrashift

#endif  // ULTRASHIFT_ENUMERATION_HPP

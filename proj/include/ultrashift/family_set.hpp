#ifndef ULTRASHIFT_FAMILY_SET_HPP
#define ULTRASHIFT_FAMILY_SET_HPP

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ultrashift/index_set.hpp"

namespace ultrashift {

/// A member of an indexed family: a vertex u[3] or an edge e[0].
template <class Tag>
struct FamilyMember {
    std::string family;
    Index index = 0;

    std::string str() const { return family + "[" + std::to_string(index) + "]"; }

    friend auto operator<=>(const FamilyMember&, const FamilyMember&) = default;
    friend bool operator==(const FamilyMember&, const FamilyMember&) = default;
};

struct VertexTag {};
struct EdgeTag {};

using VertexId = FamilyMember<VertexTag>;
using EdgeId = FamilyMember<EdgeTag>;

struct Cardinality {
    bool infinite = false;
    Index count = 0;  // meaningful only when finite

    static Cardinality finite(Index n) { return {false, n}; }
    static Cardinality infiniteCard() { return {true, 0}; }

    friend bool operator==(const Cardinality&, const Cardinality&) = default;
};

/**
 * A set of family members stored as one canonical IndexSet per family.
 * Families with no members are never stored, so equality of the map is set
 * equality.
 */
template <class Tag>
class FamilySet {
public:
    using Member = FamilyMember<Tag>;
    using Atoms = std::map<std::string, IndexSet>;

    FamilySet() = default;

    static FamilySet of(const std::string& family, IndexSet indices) {
        FamilySet s;
        s.put(family, std::move(indices));
        return s;
    }

    static FamilySet singleton(const Member& m) { return of(m.family, IndexSet::singleton(m.index)); }

    static FamilySet fromMembers(const std::vector<Member>& members) {
        FamilySet s;
        for (const auto& m : members) s = s.unite(singleton(m));
        return s;
    }

    const Atoms& atoms() const { return atoms_; }

    /// Indices of one family (empty set when the family is absent).
    IndexSet indicesOf(const std::string& family) const {
        auto it = atoms_.find(family);
        return it == atoms_.end() ? IndexSet::empty() : it->second;
    }

    bool isEmpty() const { return atoms_.empty(); }

    bool contains(const Member& m) const {
        auto it = atoms_.find(m.family);
        return it != atoms_.end() && it->second.contains(m.index);
    }

    FamilySet unite(const FamilySet& o) const {
        FamilySet out = *this;
        for (const auto& [fam, idx] : o.atoms_) {
            auto it = out.atoms_.find(fam);
            if (it == out.atoms_.end())
                out.atoms_.emplace(fam, idx);
            else
                it->second = it->second.unite(idx);
        }
        return out;
    }

    FamilySet intersect(const FamilySet& o) const {
        FamilySet out;
        for (const auto& [fam, idx] : atoms_) {
            auto it = o.atoms_.find(fam);
            if (it != o.atoms_.end()) out.put(fam, idx.intersect(it->second));
        }
        return out;
    }

    FamilySet minus(const FamilySet& o) const {
        FamilySet out;
        for (const auto& [fam, idx] : atoms_) {
            auto it = o.atoms_.find(fam);
            out.put(fam, it == o.atoms_.end() ? idx : idx.minus(it->second));
        }
        return out;
    }

    bool isSubsetOf(const FamilySet& o) const {
        for (const auto& [fam, idx] : atoms_) {
            auto it = o.atoms_.find(fam);
            if (it == o.atoms_.end() || !idx.isSubsetOf(it->second)) return false;
        }
        return true;
    }

    bool intersects(const FamilySet& o) const { return !intersect(o).isEmpty(); }

    Cardinality cardinality() const {
        Index n = 0;
        for (const auto& [fam, idx] : atoms_) {
            if (!idx.isFinite()) return Cardinality::infiniteCard();
            n += *idx.size();
        }
        return Cardinality::finite(n);
    }

    bool isFinite() const { return !cardinality().infinite; }

    /// All members when finite, ordered by family then index.
    std::vector<Member> members() const {
        std::vector<Member> out;
        for (const auto& [fam, idx] : atoms_)
            for (Index i : idx.explicitMembers())
                if (idx.isFinite()) out.push_back({fam, i});
        return out;
    }

    /// Atoms sorted by family name, `family:T;explicit;p;residues`, joined by '/'.
    std::string serialize() const {
        std::string out;
        for (const auto& [fam, idx] : atoms_) {
            if (!out.empty()) out += "/";
            out += fam + ":" + idx.serialize();
        }
        return out;
    }

    static FamilySet deserialize(const std::string& text) {
        FamilySet s;
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t end = text.find('/', pos);
            if (end == std::string::npos) end = text.size();
            std::string atom = text.substr(pos, end - pos);
            auto colon = atom.find(':');
            if (colon == std::string::npos) throw std::invalid_argument("malformed set atom: " + atom);
            s = s.unite(of(atom.substr(0, colon), IndexSet::deserialize(atom.substr(colon + 1))));
            pos = end + 1;
        }
        return s;
    }

    friend bool operator==(const FamilySet&, const FamilySet&) = default;

private:
    Atoms atoms_;

    void put(const std::string& family, IndexSet indices) {
        if (indices.isEmpty())
            atoms_.erase(family);
        else
            atoms_[family] = std::move(indices);
    }
};

using VertexSet = FamilySet<VertexTag>;
using EdgeSet = FamilySet<EdgeTag>;

}  // namespace ultrashift

#endif  // ULTRASHIFT_FAMILY_SET_HPP

#ifndef ULTRASHIFT_INDEX_SET_HPP
#define ULTRASHIFT_INDEX_SET_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ultrashift {

using Index = std::uint64_t;

/// Thrown when an operation would need a period beyond what we are willing to
/// materialise (residue tables are stored explicitly).
class PeriodOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr Index kMaxPeriod = Index{1} << 22;

/**
 * An eventually periodic subset of the naturals.
 *
 * Members below `threshold` are listed in `explicit_`; a number n >= threshold
 * is a member iff (n mod period) is one of `residues`. Every value is kept in
 * canonical form (minimal period, then minimal threshold), so structural
 * equality is set equality.
 */
class IndexSet {
public:
    IndexSet() = default;

    static IndexSet empty() { return IndexSet{}; }

    static IndexSet all() { return fromParts(0, {}, 1, {0}); }

    static IndexSet singleton(Index n) { return fromParts(n + 1, {n}, 1, {}); }

    static IndexSet finite(std::vector<Index> members) {
        if (members.empty()) return empty();
        Index top = *std::max_element(members.begin(), members.end());
        return fromParts(top + 1, std::move(members), 1, {});
    }

    /// { n : n >= from }
    static IndexSet atLeast(Index from) {
        std::vector<Index> none;
        return fromParts(from, none, 1, {0});
    }

    /// { n : lo <= n < hi }
    static IndexSet interval(Index lo, Index hi) {
        std::vector<Index> members;
        for (Index n = lo; n < hi; ++n) members.push_back(n);
        return finite(std::move(members));
    }

    /// { n >= from : n mod period == residue }
    static IndexSet progression(Index from, Index period, Index residue) {
        if (period == 0) throw std::invalid_argument("progression period must be >= 1");
        return fromParts(from, {}, period, {residue % period});
    }

    /// Builds and canonicalises an arbitrary (threshold, explicit, period, residues) encoding.
    /// Explicit members at or above the threshold are ignored.
    static IndexSet fromParts(Index threshold, std::vector<Index> explicitMembers, Index period,
                              std::vector<Index> residues) {
        if (period == 0) throw std::invalid_argument("IndexSet period must be >= 1");
        if (period > kMaxPeriod) throw PeriodOverflow("IndexSet period exceeds limit");
        IndexSet s;
        s.threshold_ = threshold;
        s.period_ = period;
        for (Index e : explicitMembers)
            if (e < threshold) s.explicit_.push_back(e);
        for (Index r : residues) s.residues_.push_back(r % period);
        sortUnique(s.explicit_);
        sortUnique(s.residues_);
        s.canonicalize();
        return s;
    }

    Index threshold() const { return threshold_; }
    Index period() const { return period_; }
    const std::vector<Index>& explicitMembers() const { return explicit_; }
    const std::vector<Index>& residues() const { return residues_; }

    bool contains(Index n) const {
        if (n < threshold_) return std::binary_search(explicit_.begin(), explicit_.end(), n);
        return std::binary_search(residues_.begin(), residues_.end(), n % period_);
    }

    bool isEmpty() const { return explicit_.empty() && residues_.empty(); }
    bool isFinite() const { return residues_.empty(); }

    /// Number of members when finite.
    std::optional<Index> size() const {
        if (!isFinite()) return std::nullopt;
        return static_cast<Index>(explicit_.size());
    }

    std::optional<Index> min() const {
        if (!explicit_.empty()) return explicit_.front();
        if (residues_.empty()) return std::nullopt;
        return nextMember(threshold_);
    }

    std::optional<Index> max() const {
        if (!isFinite() || explicit_.empty()) return std::nullopt;
        return explicit_.back();
    }

    /// Smallest member >= from, if any.
    std::optional<Index> nextMember(Index from) const {
        if (from < threshold_) {
            auto it = std::lower_bound(explicit_.begin(), explicit_.end(), from);
            if (it != explicit_.end()) return *it;
            from = threshold_;
        }
        if (residues_.empty()) return std::nullopt;
        Index base = from - from % period_;
        Index off = from % period_;
        auto it = std::lower_bound(residues_.begin(), residues_.end(), off);
        if (it != residues_.end()) return base + *it;
        return base + period_ + residues_.front();
    }

    /// Members in [lo, hi), in increasing order.
    std::vector<Index> membersIn(Index lo, Index hi) const {
        std::vector<Index> out;
        for (auto n = nextMember(lo); n && *n < hi; n = nextMember(*n + 1)) out.push_back(*n);
        return out;
    }

    IndexSet unite(const IndexSet& o) const {
        return combine(o, [](bool a, bool b) { return a || b; });
    }
    IndexSet intersect(const IndexSet& o) const {
        return combine(o, [](bool a, bool b) { return a && b; });
    }
    IndexSet minus(const IndexSet& o) const {
        return combine(o, [](bool a, bool b) { return a && !b; });
    }
    IndexSet complement() const { return all().minus(*this); }

    bool isSubsetOf(const IndexSet& o) const {
        for (Index e : explicit_)
            if (!o.contains(e)) return false;
        if (residues_.empty()) return true;
        Index span = std::lcm(period_, o.period_);
        Index end = std::max(threshold_, o.threshold_) + span;
        for (auto n = nextMember(threshold_); n && *n < end; n = nextMember(*n + 1))
            if (!o.contains(*n)) return false;
        return true;
    }

    /// True iff the complement is infinite; avoids materialising the complement.
    bool isCoInfinite() const { return residues_.size() < period_; }

    /// `T;explicit;p;residues`, comma-separated lists, decimal.
    std::string serialize() const {
        std::string out = std::to_string(threshold_) + ";";
        appendList(out, explicit_);
        out += ";" + std::to_string(period_) + ";";
        appendList(out, residues_);
        return out;
    }

    /// Inverse of serialize(); the result is re-canonicalised.
    static IndexSet deserialize(const std::string& text) {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : text) {
            if (c == ';') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        parts.push_back(cur);
        if (parts.size() != 4) throw std::invalid_argument("malformed IndexSet: " + text);
        return fromParts(std::stoull(parts[0]), parseList(parts[1]), std::stoull(parts[2]),
                         parseList(parts[3]));
    }

    friend bool operator==(const IndexSet&, const IndexSet&) = default;

private:
    Index threshold_ = 0;
    std::vector<Index> explicit_;
    Index period_ = 1;
    std::vector<Index> residues_;

    static void sortUnique(std::vector<Index>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    static void appendList(std::string& out, const std::vector<Index>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(v[i]);
        }
    }

    static std::vector<Index> parseList(const std::string& s) {
        std::vector<Index> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) out.push_back(std::stoull(item));
        return out;
    }

    bool periodicRule(Index n) const {
        return std::binary_search(residues_.begin(), residues_.end(), n % period_);
    }

    void canonicalize() {
        // minimal period: the smallest divisor d of p such that the residue set is d-periodic
        for (Index d = 1; d < period_; ++d) {
            if (period_ % d != 0) continue;
            bool ok = true;
            for (Index r : residues_) {
                if (!std::binary_search(residues_.begin(), residues_.end(), (r + d) % period_)) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                std::vector<Index> reduced;
                for (Index r : residues_)
                    if (r < d) reduced.push_back(r);
                residues_ = std::move(reduced);
                period_ = d;
                break;
            }
        }
        // minimal threshold
        while (threshold_ > 0) {
            Index n = threshold_ - 1;
            bool listed = !explicit_.empty() && explicit_.back() == n;
            if (listed != periodicRule(n)) break;
            if (listed) explicit_.pop_back();
            threshold_ = n;
        }
    }

    template <class Op>
    IndexSet combine(const IndexSet& o, Op op) const {
        Index l = std::lcm(period_, o.period_);
        if (l > kMaxPeriod) throw PeriodOverflow("lcm of periods exceeds limit");
        Index t = std::max(threshold_, o.threshold_);
        std::vector<Index> ex;
        for (Index n = 0; n < t; ++n)
            if (op(contains(n), o.contains(n))) ex.push_back(n);
        std::vector<Index> res;
        for (Index r = 0; r < l; ++r)
            if (op(periodicRule(r), o.periodicRule(r))) res.push_back(r);
        return fromParts(t, std::move(ex), l, std::move(res));
    }
};

}  // namespace ultrashift

#endif  // ULTRASHIFT_INDEX_SET_HPP

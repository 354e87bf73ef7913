#ifndef ULTRASHIFT_AFFINE_HPP
#define ULTRASHIFT_AFFINE_HPP

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "ultrashift/index_set.hpp"

namespace ultrashift {

/// k -> a*k + b with a >= 0. The offset may be negative as long as every
/// evaluated point stays in the naturals.
struct Affine {
    Index a = 0;
    std::int64_t b = 0;

    static Affine constant(Index c) { return {0, static_cast<std::int64_t>(c)}; }
    static Affine identity() { return {1, 0}; }

    bool isConstant() const { return a == 0; }

    Index operator()(Index k) const {
        std::int64_t v = static_cast<std::int64_t>(a * k) + b;
        if (v < 0) throw std::out_of_range("affine rule evaluates to a negative index");
        return static_cast<Index>(v);
    }

    /// Smallest k such that a*k + b >= 0 (only meaningful when a > 0 or b >= 0).
    Index firstValid() const {
        if (b >= 0) return 0;
        if (a == 0) return ~Index{0};
        Index need = static_cast<Index>(-b);
        return (need + a - 1) / a;
    }

    std::string str(const std::string& var) const {
        std::string out;
        if (a != 0) {
            out = (a == 1 ? "" : std::to_string(a) + "*") + var;
            if (b > 0) out += "+" + std::to_string(b);
            if (b < 0) out += "-" + std::to_string(-b);
            return out;
        }
        return std::to_string(b);
    }

    friend bool operator==(const Affine&, const Affine&) = default;
};

/// (x + y) mod m for non-negative x and signed y.
inline Index modp(Index x, std::int64_t y, Index m) {
    std::int64_t mm = static_cast<std::int64_t>(m);
    std::int64_t v = (static_cast<std::int64_t>(x % m) + y % mm) % mm;
    return static_cast<Index>(v < 0 ? v + mm : v);
}

/// { k in domain : rule(k) in target }, computed exactly.
inline IndexSet affinePreimage(const Affine& rule, const IndexSet& target, const IndexSet& domain) {
    if (rule.a == 0) {
        if (rule.b < 0) return IndexSet::empty();
        return target.contains(static_cast<Index>(rule.b)) ? domain : IndexSet::empty();
    }
    const Index a = rule.a;
    const std::int64_t b = rule.b;
    Index start = rule.firstValid();
    // beyond kT every rule(k) is at or past the target threshold
    Index kT = start;
    std::int64_t T = static_cast<std::int64_t>(target.threshold());
    if (T - b > 0) kT = std::max<Index>(kT, (static_cast<Index>(T - b) + a - 1) / a);
    std::vector<Index> ex;
    for (Index k = start; k < kT; ++k)
        if (target.contains(rule(k))) ex.push_back(k);
    const Index p = target.period();
    std::vector<Index> res;
    for (Index r = 0; r < p; ++r) {
        // rule(k) mod p depends only on k mod p
        if (std::binary_search(target.residues().begin(), target.residues().end(), modp(a * r, b, p)))
            res.push_back(r);
    }
    IndexSet pre = IndexSet::fromParts(kT, std::move(ex), p, std::move(res));
    return pre.intersect(domain);
}

/// { rule(j) : j in source }, computed exactly. Requires rule(j) >= 0 on source.
inline IndexSet affineImage(const Affine& rule, const IndexSet& source) {
    if (source.isEmpty()) return IndexSet::empty();
    if (rule.a == 0) return IndexSet::singleton(rule(0));
    std::vector<Index> ex;
    for (Index j : source.explicitMembers()) ex.push_back(rule(j));
    if (source.isFinite()) return IndexSet::finite(std::move(ex));
    const Index a = rule.a;
    const Index p = source.period();
    // the canonical threshold may sit below the first valid k
    Index start = std::max(source.threshold(), rule.firstValid());
    for (Index j : source.membersIn(source.threshold(), start)) ex.push_back(rule(j));
    Index T = rule(start);
    std::vector<Index> res;
    for (Index r : source.residues()) res.push_back(modp(a * r, rule.b, a * p));
    return IndexSet::fromParts(T, std::move(ex), a * p, std::move(res));
}

}  // namespace ultrashift

#endif  // ULTRASHIFT_AFFINE_HPP

#ifndef ULTRASHIFT_BITSTREAM_HPP
#define ULTRASHIFT_BITSTREAM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ultrashift/index_set.hpp"

namespace ultrashift {

enum class Tri { No, Yes, Unknown };

inline const char* triName(Tri t) {
    switch (t) {
        case Tri::No: return "no";
        case Tri::Yes: return "yes";
        default: return "unknown";
    }
}

/// Canonical (prefix, cycle) form of an eventually periodic sequence:
/// primitive cycle, shortest prefix.
template <class T>
void normalizeEventuallyPeriodic(std::vector<T>& prefix, std::vector<T>& cycle) {
    if (cycle.empty()) throw std::invalid_argument("eventually periodic sequence needs a nonempty cycle");
    const std::size_t n = cycle.size();
    for (std::size_t d = 1; d < n; ++d) {
        if (n % d) continue;
        bool periodic = true;
        for (std::size_t i = d; i < n && periodic; ++i) periodic = cycle[i] == cycle[i - d];
        if (periodic) {
            cycle.resize(d);
            break;
        }
    }
    while (!prefix.empty() && prefix.back() == cycle.back()) {
        prefix.pop_back();
        std::rotate(cycle.begin(), cycle.end() - 1, cycle.end());
    }
}

/// Per position: does the joint tail of two eventually periodic sequences
/// disagree somewhere in one joint period? Also reports the last prefix
/// disagreement index bound.
template <class T>
struct JointPeriodic {
    Index start = 0;   // 0-based position from which both are periodic
    Index period = 1;  // lcm of the cycle lengths
    std::vector<Index> tailDisagreements;  // offsets in [0, period)
    bool everDiffer = false;

    template <class AtA, class AtB>
    static JointPeriodic analyze(std::size_t prefixA, std::size_t cycleA, std::size_t prefixB,
                                 std::size_t cycleB, AtA atA, AtB atB) {
        JointPeriodic jp;
        jp.start = std::max(prefixA, prefixB);
        jp.period = std::lcm<Index>(cycleA, cycleB);
        for (Index i = 0; i < jp.start + jp.period; ++i) {
            bool diff = !(atA(i) == atB(i));
            if (diff) jp.everDiffer = true;
            if (diff && i >= jp.start) jp.tailDisagreements.push_back(i - jp.start);
        }
        return jp;
    }
};

/// Eventually periodic bit sequence; positions are 1-based.
struct PeriodicBits {
    std::vector<std::uint8_t> prefix;
    std::vector<std::uint8_t> cycle{0};

    static PeriodicBits make(std::vector<std::uint8_t> p, std::vector<std::uint8_t> c) {
        PeriodicBits b{std::move(p), std::move(c)};
        normalizeEventuallyPeriodic(b.prefix, b.cycle);
        return b;
    }

    static PeriodicBits constant(bool bit) { return make({}, {static_cast<std::uint8_t>(bit)}); }

    bool at(Index i) const {
        if (i == 0) throw std::out_of_range("bit positions are 1-based");
        if (i <= prefix.size()) return prefix[i - 1];
        return cycle[(i - 1 - prefix.size()) % cycle.size()];
    }

    bool isEventuallyConstant() const { return cycle.size() == 1; }

    PeriodicBits complement() const {
        PeriodicBits out = *this;
        for (auto& b : out.prefix) b ^= 1;
        for (auto& b : out.cycle) b ^= 1;
        return out;
    }

    /// `P~C` with P possibly empty.
    std::string str() const {
        std::string s;
        for (auto b : prefix) s += b ? '1' : '0';
        s += '~';
        for (auto b : cycle) s += b ? '1' : '0';
        return s;
    }

    friend bool operator==(const PeriodicBits&, const PeriodicBits&) = default;
};

/// a_n = sum_{i=1}^n (i+1), so a_1 = 2 and a_n = a_{n-1} + n + 1.
inline Index indexSetI(Index n) {
    if (n == 0) throw std::invalid_argument("a_n is defined for n >= 1");
    return n * (n + 3) / 2;
}

/// k with a_k = i, if i is in I.
inline std::optional<Index> indexInI(Index i) {
    if (i < 2) return std::nullopt;
    // a_k = k(k+3)/2 is increasing; start from the floating estimate and correct
    Index k = static_cast<Index>((std::sqrt(8.0 * static_cast<double>(i) + 9.0) - 3.0) / 2.0);
    if (k == 0) k = 1;
    while (k > 1 && indexSetI(k) > i) --k;
    while (indexSetI(k) < i) ++k;
    if (indexSetI(k) == i) return k;
    return std::nullopt;
}

/**
 * A strictly increasing infinite J = {j_1 < j_2 < ...}: explicit head, then
 * either j_n = n + shift or j_n in {2n-1, 2n} chosen by a selector bit
 * (0 -> 2n-1, 1 -> 2n).
 */
struct JPresentation {
    enum class Tail { Shift, Selector };

    std::vector<Index> head;
    Tail tail = Tail::Shift;
    std::int64_t shift = 0;
    PeriodicBits selector;

    static JPresentation naturals() { return {}; }

    static JPresentation shifted(std::vector<Index> head, std::int64_t shift) {
        JPresentation j;
        j.head = std::move(head);
        j.shift = shift;
        return j;
    }

    static JPresentation selected(std::vector<Index> head, PeriodicBits sel) {
        JPresentation j;
        j.head = std::move(head);
        j.tail = Tail::Selector;
        j.selector = std::move(sel);
        return j;
    }

    /// j_n, n >= 1.
    Index at(Index n) const {
        if (n == 0) throw std::out_of_range("J is indexed from 1");
        if (n <= head.size()) return head[n - 1];
        if (tail == Tail::Shift) {
            std::int64_t v = static_cast<std::int64_t>(n) + shift;
            if (v < 1) throw std::out_of_range("J tail rule produced a non-positive element");
            return static_cast<Index>(v);
        }
        return selector.at(n) ? 2 * n : 2 * n - 1;
    }

    /// Throws unless strictly increasing and positive.
    void validate() const {
        Index m = head.size();
        for (Index n = 1; n <= m + 1; ++n) {
            Index v = at(n);
            if (v == 0) throw std::invalid_argument("J elements must be positive");
            if (n > 1 && at(n - 1) >= v) throw std::invalid_argument("J must be strictly increasing");
        }
    }

    /// True iff every j_n lies in {2n-1, 2n}.
    bool inP() const {
        if (tail != Tail::Selector) {
            // n + shift in {2n-1, 2n} for all large n is impossible
            return false;
        }
        for (Index n = 1; n <= head.size(); ++n)
            if (head[n - 1] != 2 * n - 1 && head[n - 1] != 2 * n) return false;
        return true;
    }

    /// Position past which both presentations follow their tail rule in lockstep.
    Index comparisonHorizon(const JPresentation& o) const {
        Index h = std::max(head.size(), o.head.size());
        h += selector.prefix.size() + o.selector.prefix.size();
        h += 2 * std::lcm<Index>(selector.cycle.size(), o.selector.cycle.size());
        auto mag = [](std::int64_t v) { return static_cast<Index>(v < 0 ? -v : v); };
        return h + mag(shift) + mag(o.shift) + 4;
    }

    std::string str() const {
        std::string s;
        for (std::size_t i = 0; i < head.size(); ++i) s += std::to_string(head[i]) + ",";
        if (tail == Tail::Shift) return s + "shift:" + std::to_string(shift);
        return s + "sel:" + selector.str();
    }

    friend bool operator==(const JPresentation& a, const JPresentation& b) {
        Index h = a.comparisonHorizon(b);
        for (Index n = 1; n <= h; ++n)
            if (a.at(n) != b.at(n)) return false;
        return true;
    }
};

/// i_{k,n} = sum_{i=1}^n (n - i + 1) j_i: length of the first n groups of f(J).
inline Index fGroupPrefixLength(const JPresentation& j, Index n) {
    Index total = 0;
    for (Index i = 1; i <= n; ++i) total += (n - i + 1) * j.at(i);
    return total;
}

/// First `count` bits of f(J): alternating 0/1 blocks, starting with 0, with
/// lengths j_1; j_1, j_2; j_1, j_2, j_3; ...
inline std::vector<std::uint8_t> realizeF(const JPresentation& j, Index count) {
    std::vector<std::uint8_t> out;
    out.reserve(count);
    std::uint8_t colour = 0;
    for (Index group = 1; out.size() < count; ++group) {
        for (Index i = 1; i <= group && out.size() < count; ++i) {
            Index len = j.at(i);
            for (Index t = 0; t < len && out.size() < count; ++t) out.push_back(colour);
            colour ^= 1;
        }
    }
    return out;
}

/**
 * Pure index -> bit function. Kinds: explicit eventually periodic bits,
 * f(J), and the merge beta^gamma that overwrites alpha at the positions a_k.
 */
class Bitstream {
public:
    struct Periodic {
        PeriodicBits bits;
    };
    struct FCode {
        JPresentation j;
    };
    struct Merged {
        PeriodicBits alpha;
        std::shared_ptr<const Bitstream> gamma;
    };
    using Node = std::variant<Periodic, FCode, Merged>;

    Bitstream() : node_(Periodic{}) {}
    explicit Bitstream(Node n) : node_(std::move(n)) {}

    static Bitstream periodic(PeriodicBits b) { return Bitstream(Periodic{std::move(b)}); }
    static Bitstream fcode(JPresentation j) {
        j.validate();
        return Bitstream(FCode{std::move(j)});
    }
    static Bitstream merged(PeriodicBits alpha, Bitstream gamma) {
        return Bitstream(Merged{std::move(alpha), std::make_shared<const Bitstream>(std::move(gamma))});
    }

    const Node& node() const { return node_; }
    bool isPeriodic() const { return std::holds_alternative<Periodic>(node_); }
    const PeriodicBits* periodicBits() const {
        const auto* p = std::get_if<Periodic>(&node_);
        return p ? &p->bits : nullptr;
    }

    /// Bit at 1-based position i.
    bool at(Index i) const {
        if (i == 0) throw std::out_of_range("bit positions are 1-based");
        if (const auto* p = std::get_if<Periodic>(&node_)) return p->bits.at(i);
        if (const auto* f = std::get_if<FCode>(&node_)) {
            Index pos = 0;
            bool colour = false;
            for (Index group = 1;; ++group) {
                for (Index k = 1; k <= group; ++k) {
                    pos += f->j.at(k);
                    if (pos >= i) return colour;
                    colour = !colour;
                }
            }
        }
        const auto& m = std::get<Merged>(node_);
        if (auto k = indexInI(i)) return m.gamma->at(*k);
        return m.alpha.at(i);
    }

    /// Bits 1..count.
    std::vector<std::uint8_t> realize(Index count) const {
        if (const auto* f = std::get_if<FCode>(&node_)) return realizeF(f->j, count);
        std::vector<std::uint8_t> out(count);
        if (const auto* m = std::get_if<Merged>(&node_)) {
            Index kMax = 0;
            while (indexSetI(kMax + 1) <= count) ++kMax;
            auto g = m->gamma->realize(kMax);
            Index k = 1;
            for (Index i = 1; i <= count; ++i) {
                if (k <= kMax && indexSetI(k) == i) {
                    out[i - 1] = g[k - 1];
                    ++k;
                } else {
                    out[i - 1] = m->alpha.at(i);
                }
            }
            return out;
        }
        for (Index i = 1; i <= count; ++i) out[i - 1] = at(i);
        return out;
    }

    std::string str() const {
        if (const auto* p = std::get_if<Periodic>(&node_)) return p->bits.str();
        if (const auto* f = std::get_if<FCode>(&node_)) return "f(" + f->j.str() + ")";
        const auto& m = std::get<Merged>(node_);
        return "beta(" + m.alpha.str() + ";" + m.gamma->str() + ")";
    }

private:
    Node node_;
};

/// beta^gamma: alpha off I, gamma_k at a_k.
inline Bitstream betaEncode(const PeriodicBits& alpha, const Bitstream& gamma) {
    return Bitstream::merged(alpha, gamma);
}

inline Bitstream fBitstream(const JPresentation& j) { return Bitstream::fcode(j); }

/// q_k = p(a_k) as an eventually periodic sequence in k.
inline PeriodicBits sampleAtI(const PeriodicBits& p) {
    // a_k mod m is periodic in k with period dividing 2m, once a_k passes the prefix
    Index m = p.cycle.size();
    Index start = 0;
    while (indexSetI(start + 1) <= p.prefix.size()) ++start;
    std::vector<std::uint8_t> pre, cyc;
    for (Index k = 1; k <= start; ++k) pre.push_back(p.at(indexSetI(k)));
    for (Index k = start + 1; k <= start + 2 * m; ++k) cyc.push_back(p.at(indexSetI(k)));
    return PeriodicBits::make(std::move(pre), std::move(cyc));
}

/// Tail facts about a pair of bit sequences. Empty optionals mean the pair
/// falls outside the kinds we can decide exactly.
struct BitPairFacts {
    std::optional<bool> differInfinitelyOften;
    std::optional<bool> unboundedAgreementRuns;
};

inline BitPairFacts periodicPairFacts(const PeriodicBits& a, const PeriodicBits& b) {
    auto jp = JointPeriodic<bool>::analyze(a.prefix.size(), a.cycle.size(), b.prefix.size(), b.cycle.size(),
                                           [&](Index i) { return a.at(i + 1); },
                                           [&](Index i) { return b.at(i + 1); });
    bool dio = !jp.tailDisagreements.empty();
    return {dio, !dio};
}

inline BitPairFacts bitPairFacts(const Bitstream& x, const Bitstream& y);

namespace detail {

inline BitPairFacts periodicVsFCode(const PeriodicBits& p) {
    // f(J) is not eventually periodic, and it has arbitrarily long runs of both colours
    BitPairFacts f;
    f.differInfinitelyOften = true;
    if (p.isEventuallyConstant()) f.unboundedAgreementRuns = true;
    return f;
}

inline BitPairFacts periodicVsMerged(const PeriodicBits& p, const Bitstream::Merged& m) {
    auto jp = JointPeriodic<bool>::analyze(p.prefix.size(), p.cycle.size(), m.alpha.prefix.size(),
                                           m.alpha.cycle.size(), [&](Index i) { return p.at(i + 1); },
                                           [&](Index i) { return m.alpha.at(i + 1); });
    // I has gaps of every length, so a disagreeing residue class meets N - I infinitely often
    if (!jp.tailDisagreements.empty()) return {true, false};
    BitPairFacts inner = bitPairFacts(Bitstream::periodic(sampleAtI(p)), *m.gamma);
    return {inner.differInfinitelyOften, true};
}

}  // namespace detail

inline BitPairFacts bitPairFacts(const Bitstream& x, const Bitstream& y) {
    using P = Bitstream::Periodic;
    using F = Bitstream::FCode;
    using M = Bitstream::Merged;
    const auto& a = x.node();
    const auto& b = y.node();
    if (auto* pa = std::get_if<P>(&a)) {
        if (auto* pb = std::get_if<P>(&b)) return periodicPairFacts(pa->bits, pb->bits);
        if (std::holds_alternative<F>(b)) return detail::periodicVsFCode(pa->bits);
        return detail::periodicVsMerged(pa->bits, std::get<M>(b));
    }
    if (std::holds_alternative<P>(b)) return bitPairFacts(y, x);
    if (auto* fa = std::get_if<F>(&a)) {
        if (auto* fb = std::get_if<F>(&b)) {
            // distinct J give f-codes differing infinitely often
            if (fa->j == fb->j) return {false, true};
            return {true, std::nullopt};
        }
        return {};
    }
    if (std::holds_alternative<F>(b)) return {};
    const auto& ma = std::get<M>(a);
    const auto& mb = std::get<M>(b);
    auto jp = JointPeriodic<bool>::analyze(ma.alpha.prefix.size(), ma.alpha.cycle.size(),
                                           mb.alpha.prefix.size(), mb.alpha.cycle.size(),
                                           [&](Index i) { return ma.alpha.at(i + 1); },
                                           [&](Index i) { return mb.alpha.at(i + 1); });
    if (!jp.tailDisagreements.empty()) return {true, false};
    // alphas agree eventually: the gaps between consecutive a_k give agreement runs of every length
    BitPairFacts inner = bitPairFacts(*ma.gamma, *mb.gamma);
    return {inner.differInfinitelyOften, true};
}

/// Exact equality where decidable.
inline Tri bitstreamEqual(const Bitstream& x, const Bitstream& y, Index horizon = 4096) {
    using P = Bitstream::Periodic;
    using F = Bitstream::FCode;
    using M = Bitstream::Merged;
    const auto& a = x.node();
    const auto& b = y.node();
    if (auto* pa = std::get_if<P>(&a))
        if (auto* pb = std::get_if<P>(&b)) return pa->bits == pb->bits ? Tri::Yes : Tri::No;
    if (auto* fa = std::get_if<F>(&a))
        if (auto* fb = std::get_if<F>(&b)) return fa->j == fb->j ? Tri::Yes : Tri::No;
    if (auto* ma = std::get_if<M>(&a)) {
        if (auto* mb = std::get_if<M>(&b)) {
            Tri g = bitstreamEqual(*ma->gamma, *mb->gamma, horizon);
            if (g == Tri::No) return Tri::No;
            // alphas only matter off I
            auto jp = JointPeriodic<bool>::analyze(
                ma->alpha.prefix.size(), ma->alpha.cycle.size(), mb->alpha.prefix.size(),
                mb->alpha.cycle.size(), [&](Index i) { return ma->alpha.at(i + 1); },
                [&](Index i) { return mb->alpha.at(i + 1); });
            if (!jp.tailDisagreements.empty()) return Tri::No;
            for (Index i = 1; i <= jp.start; ++i)
                if (ma->alpha.at(i) != mb->alpha.at(i) && !indexInI(i)) return Tri::No;
            return g;
        }
    }
    auto ra = x.realize(horizon);
    auto rb = y.realize(horizon);
    return ra == rb ? Tri::Unknown : Tri::No;
}

/// Block agreement check for (J1, J2, n) against realized f-prefixes.
struct BlockAgreementResult {
    Index i1n = 0;                // i_{1,n}
    Index i2n = 0;                // i_{2,n}
    bool headsAgree = false;      // j^1_i = j^2_i for all i <= n
    bool agreeOnI1n = false;      // f(J1), f(J2) agree on the first i_{1,n} bits
    bool agreeOnMax = false;      // ... on the first max(i_{1,n}, i_{2,n}) bits
    std::optional<Index> firstDisagreement;  // 1-based, within the realized window
    bool literalHolds() const { return agreeOnI1n == headsAgree; }
    bool symmetricHolds() const { return agreeOnMax == headsAgree; }
};

inline BlockAgreementResult blockAgreementLength(const JPresentation& j1, const JPresentation& j2, Index n) {
    if (n == 0) throw std::invalid_argument("n must be >= 1");
    BlockAgreementResult r;
    r.i1n = fGroupPrefixLength(j1, n);
    r.i2n = fGroupPrefixLength(j2, n);
    r.headsAgree = true;
    for (Index i = 1; i <= n; ++i) r.headsAgree = r.headsAgree && j1.at(i) == j2.at(i);
    Index window = std::max(r.i1n, r.i2n) + 1;
    auto f1 = realizeF(j1, window);
    auto f2 = realizeF(j2, window);
    for (Index i = 0; i < window; ++i) {
        if (f1[i] != f2[i]) {
            r.firstDisagreement = i + 1;
            break;
        }
    }
    auto agreeUpTo = [&](Index len) { return !r.firstDisagreement || *r.firstDisagreement > len; };
    r.agreeOnI1n = agreeUpTo(r.i1n);
    r.agreeOnMax = agreeUpTo(std::max(r.i1n, r.i2n));
    return r;
}

/// First index where two J presentations differ, if within `horizon`.
inline std::optional<Index> firstJDifference(const JPresentation& a, const JPresentation& b) {
    Index h = a.comparisonHorizon(b);
    for (Index n = 1; n <= h; ++n)
        if (a.at(n) != b.at(n)) return n;
    return std::nullopt;
}

}  // namespace ultrashift

#endif  // ULTRASHIFT_BITSTREAM_HPP

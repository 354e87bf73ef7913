#ifndef ULTRASHIFT_SCRAMBLED_HPP
#define ULTRASHIFT_SCRAMBLED_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ultrashift/certify.hpp"
#include "ultrashift/chaos.hpp"

namespace ultrashift {

enum class SampleFamily { SPrime, SDoublePrime };

inline const char* sampleFamilyName(SampleFamily f) { return f == SampleFamily::SPrime ? "sprime" : "sdoubleprime"; }

struct ScrambledSample {
    SampleFamily family = SampleFamily::SPrime;
    std::vector<JPresentation> js;
    std::vector<ShiftPoint> points;
    struct PairResult {
        std::size_t i = 0, j = 0;
        PairCertificate certificate;
    };
    std::vector<PairResult> pairs;

    bool allScrambled() const {
        for (const auto& p : pairs)
            if (!p.certificate.scrambled) return false;
        return true;
    }
};

/// The coded point beta^{f(J)} over the closed paths of a Chaotic verdict, with alpha = 0^infinity.
inline ShiftPoint codedPointFor(const ChaosVerdict& v, const JPresentation& j) {
    if (v.kind != ChaosVerdict::Kind::Chaotic) throw std::invalid_argument("verdict is not Chaotic");
    return makeCoded(v.vertex, v.c1.edges, v.c2.edges, betaEncode(PeriodicBits::constant(false), fBitstream(j)),
                     true);
}

namespace detail {

inline JPresentation randomShiftJ(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> len(0, 4), gap(1, 3), extra(0, 3);
    std::vector<Index> head;
    Index last = 0;
    for (int n = len(rng); n > 0; --n) {
        last += static_cast<Index>(gap(rng));
        head.push_back(last);
    }
    // n + shift must exceed the head from n = |head| + 1 on
    std::int64_t shift = static_cast<std::int64_t>(last) - static_cast<std::int64_t>(head.size()) + extra(rng);
    if (head.empty()) shift = extra(rng);
    return JPresentation::shifted(std::move(head), shift);
}

inline PeriodicBits randomSelector(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> plen(0, 6), clen(1, 4), bit(0, 1);
    std::vector<std::uint8_t> p(static_cast<std::size_t>(plen(rng))), c(static_cast<std::size_t>(clen(rng)));
    for (auto& b : p) b = static_cast<std::uint8_t>(bit(rng));
    for (auto& b : c) b = static_cast<std::uint8_t>(bit(rng));
    return PeriodicBits::make(std::move(p), std::move(c));
}

}  // namespace detail

/// `count` pairwise distinct J, seeded. SDoublePrime draws J in P through selectors.
inline std::vector<JPresentation> sampleJs(SampleFamily family, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<JPresentation> out;
    std::size_t attempts = 0;
    while (out.size() < count) {
        if (++attempts > 100000) throw std::runtime_error("could not draw distinct J");
        JPresentation j = family == SampleFamily::SPrime ? detail::randomShiftJ(rng)
                                                         : JPresentation::selected({}, detail::randomSelector(rng));
        j.validate();
        bool fresh = true;
        for (const auto& o : out)
            if (o == j) fresh = false;
        if (fresh) out.push_back(std::move(j));
    }
    return out;
}

/**
 * Points beta^{f(J_t)} for distinct J_t, every pair certified. Blocks use the
 * balanced encoding (0 -> c1 c2, 1 -> c2 c1) so block positions align.
 */
inline ScrambledSample scrambledSetSample(const ChaosVerdict& v, SampleFamily family, std::size_t count,
                                          std::uint64_t seed = 1) {
    ScrambledSample s;
    s.family = family;
    s.js = sampleJs(family, count, seed);
    for (const auto& j : s.js) s.points.push_back(codedPointFor(v, j));
    for (std::size_t i = 0; i < s.points.size(); ++i)
        for (std::size_t k = i + 1; k < s.points.size(); ++k)
            s.pairs.push_back({i, k, certifyPairInfInf(s.points[i], s.points[k])});
    return s;
}

/// J_n = {j_1, ..., j_n, j'_{n+1}, ...}: with j'_m = j_m + 1 (SPrime) or 2m-1 and 2m swapped (SDoublePrime).
inline JPresentation nonIsolationWitness(const JPresentation& j, Index n, SampleFamily family) {
    if (family == SampleFamily::SPrime) {
        if (j.tail != JPresentation::Tail::Shift) throw std::invalid_argument("S' witnesses need a shift tail");
        std::vector<Index> head;
        for (Index m = 1; m <= std::max<Index>(n, j.head.size()); ++m) head.push_back(m <= n ? j.at(m) : j.at(m) + 1);
        return JPresentation::shifted(std::move(head), j.shift + 1);
    }
    if (j.tail != JPresentation::Tail::Selector || !j.head.empty())
        throw std::invalid_argument("S'' witnesses need a pure selector");
    const PeriodicBits& sel = j.selector;
    std::vector<std::uint8_t> prefix;
    for (Index m = 1; m <= n; ++m) prefix.push_back(sel.at(m));
    for (Index m = n + 1; m <= sel.prefix.size(); ++m) prefix.push_back(!sel.at(m));
    std::vector<std::uint8_t> cycle;
    Index start = std::max<Index>(n, sel.prefix.size()) + 1;
    for (Index m = start; m < start + sel.cycle.size(); ++m) cycle.push_back(!sel.at(m));
    return JPresentation::selected({}, PeriodicBits::make(std::move(prefix), std::move(cycle)));
}

}  // namespace ultrashift

#endif  // ULTRASHIFT_SCRAMBLED_HPP

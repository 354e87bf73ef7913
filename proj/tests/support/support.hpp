#ifndef ULTRASHIFT_TEST_SUPPORT_HPP
#define ULTRASHIFT_TEST_SUPPORT_HPP

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ultrashift/ultrashift.hpp"

namespace support {

using namespace ultrashift;

inline std::string readFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string fixturePath(const std::string& name) { return std::string(ULTRASHIFT_FIXTURES) + "/" + name; }

inline Ultragraph fixture(const std::string& name) {
    auto p = parseUltragraph(readFile(fixturePath(name)));
    if (!p.ok()) throw std::runtime_error(name + ": " + p.diagnostics.front().str());
    return *p;
}

inline ShiftPoint spec(const Ultragraph& g, const std::string& text) {
    auto p = parsePathSpec(text, g);
    if (!p.ok()) throw std::runtime_error(text + ": " + p.diagnostics.front().str());
    return *p;
}

/// A finite ultragraph as plain adjacency data: vertices 0..n-1, edge i from
/// src[i] to the vertex set rng[i].
struct FiniteGraph {
    int n = 0;
    std::vector<int> src;
    std::vector<std::vector<bool>> rng;

    std::size_t edges() const { return src.size(); }

    std::string text() const {
        std::ostringstream os;
        os << "vertexfamily v(n) { domain n < " << n << "; }\n";
        for (std::size_t i = 0; i < src.size(); ++i) {
            os << "edgefamily e" << i << "(k) { domain k == 0; source v[" << src[i] << "]; range { ";
            bool first = true;
            for (int w = 0; w < n; ++w)
                if (rng[i][static_cast<std::size_t>(w)]) {
                    os << (first ? "" : ", ") << "v[" << w << "]";
                    first = false;
                }
            os << " }; }\n";
        }
        return os.str();
    }

    Ultragraph graph() const {
        auto p = parseUltragraph(text());
        if (!p.ok()) throw std::runtime_error("generated graph rejected: " + p.diagnostics.front().str());
        return *p;
    }
};

/// Random finite ultragraph with at most maxVertices vertices and maxEdges edges; every vertex emits.
inline FiniteGraph randomFiniteGraph(std::mt19937_64& rng, int maxVertices = 6, int maxEdges = 12,
                                     double rangeDensity = 0.3) {
    FiniteGraph g;
    g.n = std::uniform_int_distribution<int>(1, maxVertices)(rng);
    int m = std::uniform_int_distribution<int>(g.n, std::max(g.n, maxEdges))(rng);
    std::bernoulli_distribution in(rangeDensity);
    std::uniform_int_distribution<int> vertex(0, g.n - 1);
    for (int i = 0; i < m; ++i) {
        g.src.push_back(i < g.n ? i : vertex(rng));
        std::vector<bool> r(static_cast<std::size_t>(g.n));
        bool any = false;
        for (int w = 0; w < g.n; ++w) any |= (r[static_cast<std::size_t>(w)] = in(rng));
        if (!any) r[static_cast<std::size_t>(vertex(rng))] = true;
        g.rng.push_back(r);
    }
    return g;
}

/**
 * Number of closed paths at v, saturated at 2, by counting walks e_1..e_k with
 * s(e_1) = v, s(e_{i+1}) in r(e_i), s(e_i) != v for i > 1 and v in r(e_k).
 * Lengths up to 3m + 3 suffice: without a cycle away from v every closed path
 * is edge-simple, and with one, head + loop + tail already gives two.
 */
inline int closedPathCountCapped(const FiniteGraph& g, int v) {
    const std::size_t m = g.edges();
    std::vector<int> ways(m, 0);
    for (std::size_t i = 0; i < m; ++i) ways[i] = g.src[i] == v ? 1 : 0;
    int total = 0;
    for (std::size_t len = 1; len <= 3 * m + 3; ++len) {
        for (std::size_t i = 0; i < m; ++i)
            if (g.rng[i][static_cast<std::size_t>(v)]) total = std::min(2, total + ways[i]);
        if (total >= 2) return 2;
        std::vector<int> next(m, 0);
        for (std::size_t i = 0; i < m; ++i) {
            if (!ways[i]) continue;
            for (std::size_t j = 0; j < m; ++j)
                if (g.src[j] != v && g.rng[i][static_cast<std::size_t>(g.src[j])]) next[j] = std::min(2, next[j] + ways[i]);
        }
        ways = std::move(next);
    }
    return total;
}

inline bool oracleChaotic(const FiniteGraph& g) {
    for (int v = 0; v < g.n; ++v)
        if (closedPathCountCapped(g, v) >= 2) return true;
    return false;
}

/// Checks the closed-path conditions directly on adjacency data.
inline bool isClosedPathOracle(const FiniteGraph& g, int v, const std::vector<int>& edges) {
    if (edges.empty() || g.src[static_cast<std::size_t>(edges.front())] != v) return false;
    for (std::size_t i = 1; i < edges.size(); ++i) {
        int s = g.src[static_cast<std::size_t>(edges[i])];
        if (s == v || !g.rng[static_cast<std::size_t>(edges[i - 1])][static_cast<std::size_t>(s)]) return false;
    }
    return g.rng[static_cast<std::size_t>(edges.back())][static_cast<std::size_t>(v)];
}

inline std::vector<int> edgeNumbers(const EdgePath& p) {
    std::vector<int> out;
    for (const auto& e : p) out.push_back(std::stoi(e.family.substr(1)));
    return out;
}

/// f(J) realized from the block definition: group m lists blocks of lengths
/// j_1..j_m; consecutive blocks alternate 0 and 1, starting with 0.
inline std::string fPrefixOracle(const std::vector<Index>& j, std::size_t count) {
    std::string out;
    char bit = '0';
    for (std::size_t m = 1; out.size() < count && m <= j.size(); ++m)
        for (std::size_t i = 0; i < m && out.size() < count; ++i) {
            for (Index r = 0; r < j[i] && out.size() < count; ++r) out += bit;
            bit = bit == '0' ? '1' : '0';
        }
    return out;
}

/// a_n from the recurrence a_1 = 2, a_n = a_{n-1} + n + 1.
inline Index aOracle(Index n) {
    Index a = 2;
    for (Index k = 2; k <= n; ++k) a += k + 1;
    return a;
}

}  // namespace support

#endif  // ULTRASHIFT_TEST_SUPPORT_HPP

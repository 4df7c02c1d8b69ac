// Slow, obviously-correct reference implementations used by the unit and
// acceptance tests. Nothing here shares code with the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lexnet/corpus.hpp"
#include "lexnet/graph.hpp"
#include "lexnet/netstats.hpp"

namespace oracle {

using AdjMatrix = std::vector<std::vector<bool>>;

inline AdjMatrix adjacency(const lexnet::UndirectedGraph& g) {
    const auto n = g.node_count();
    AdjMatrix a(n, std::vector<bool>(n, false));
    for (auto [u, v] : g.edges()) a[u][v] = a[v][u] = true;
    return a;
}

inline std::vector<std::size_t> degrees(const AdjMatrix& a) {
    std::vector<std::size_t> d(a.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) d[i] += a[i][j];
    return d;
}

/// Mean local clustering by explicit triangle enumeration; nodes with
/// degree < 2 contribute 0.
inline double average_clustering(const AdjMatrix& a) {
    const auto n = a.size();
    if (n == 0) return 0.0;
    const auto d = degrees(a);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] < 2) continue;
        std::size_t t = 0;
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k)
                if (a[i][j] && a[i][k] && a[j][k]) ++t;
        sum += 2.0 * static_cast<double>(t) / (static_cast<double>(d[i]) * static_cast<double>(d[i] - 1));
    }
    return sum / static_cast<double>(n);
}

/// Pearson correlation over the 2E oriented (deg u, deg v) edge-end pairs.
/// Returns NaN when undefined.
inline double assortativity(const AdjMatrix& a) {
    const auto d = degrees(a);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if (a[i][j]) {
                xs.push_back(static_cast<double>(d[i]));
                ys.push_back(static_cast<double>(d[j]));
            }
    if (xs.empty()) return std::nan("");
    const double m = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= m;
    my /= m;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nan("");
    return sxy / std::sqrt(sxx * syy);
}

/// G(n, p) with its own generator, node words "v0".."v{n-1}".
inline lexnet::UndirectedGraph random_graph(std::size_t n, double p, std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::bernoulli_distribution coin(p);
    std::vector<std::string> words;
    for (std::size_t i = 0; i < n; ++i) words.push_back("v" + std::to_string(i));
    std::vector<lexnet::Edge> edges;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            if (coin(gen)) edges.emplace_back(i, j);
    return lexnet::UndirectedGraph::from_edges(std::move(words), std::move(edges));
}

/// Union of per-text cliques over every pair of token positions, as word pairs.
inline std::set<std::pair<std::string, std::string>> wcn_edges(const std::vector<std::vector<std::string>>& texts,
                                                               const std::set<std::string>& vocab) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& t : texts)
        for (std::size_t i = 0; i < t.size(); ++i)
            for (std::size_t j = 0; j < t.size(); ++j) {
                if (t[i] == t[j] || !vocab.count(t[i]) || !vocab.count(t[j])) continue;
                out.insert(std::minmax(t[i], t[j]));
            }
    return out;
}

inline std::set<std::pair<std::string, std::string>> word_edges(const lexnet::UndirectedGraph& g) {
    std::set<std::pair<std::string, std::string>> out;
    for (auto [u, v] : g.edges()) out.insert(std::minmax(g.word(u), g.word(v)));
    return out;
}

/// Random toy corpus: `texts` texts of 1..12 tokens over an alphabet of `types` words.
inline std::vector<std::vector<std::string>> random_texts(std::size_t texts, std::size_t types, std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::uniform_int_distribution<std::size_t> len(1, 12), word(0, types - 1);
    std::vector<std::vector<std::string>> out(texts);
    for (auto& t : out) {
        const auto l = len(gen);
        for (std::size_t i = 0; i < l; ++i) t.push_back("w" + std::to_string(word(gen)));
    }
    return out;
}

inline lexnet::Corpus make_corpus(const std::vector<std::vector<std::string>>& texts) {
    std::vector<lexnet::TokenizedText> out;
    for (std::size_t i = 0; i < texts.size(); ++i) out.push_back({std::to_string(i), texts[i]});
    return lexnet::Corpus("toy", std::move(out));
}

/// Normalized p(k) proportional to k^-gamma over k = lo..hi.
inline std::vector<lexnet::DegreePoint> power_law_points(double gamma, int lo, int hi) {
    std::vector<lexnet::DegreePoint> pts;
    double z = 0.0;
    for (int k = lo; k <= hi; ++k) z += std::pow(k, -gamma);
    for (int k = lo; k <= hi; ++k) pts.push_back({double(k), std::pow(k, -gamma) / z});
    return pts;
}

/// Continuous broken power law: slope -g1 up to kx, -g2 after, k = 1..hi.
inline std::vector<lexnet::DegreePoint> two_regime_points(double g1, double g2, double kx, int hi) {
    std::vector<lexnet::DegreePoint> pts;
    for (int k = 1; k <= hi; ++k) {
        const double lp = k <= kx ? -g1 * std::log(k) : -g1 * std::log(kx) - g2 * (std::log(k) - std::log(kx));
        pts.push_back({double(k), std::exp(lp)});
    }
    double z = 0.0;
    for (const auto& p : pts) z += p.p;
    for (auto& p : pts) p.p /= z;
    return pts;
}

}  // namespace oracle

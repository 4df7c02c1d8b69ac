#include "lexnet/generators.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "lexnet/error.hpp"
#include "lexnet/rng.hpp"

namespace lexnet {

namespace {

std::vector<std::string> numbered_words(std::size_t n) {
    std::vector<std::string> words;
    words.reserve(n);
    for (std::size_t i = 0; i < n; ++i) words.push_back("n" + std::to_string(i));
    return words;
}

}  // namespace

UndirectedGraph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("edge probability must lie in [0, 1]");
    Rng rng(seed);
    std::vector<Edge> edges;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
            if (rng.uniform01() < p) edges.emplace_back(u, v);
        }
    }
    return UndirectedGraph::from_sorted_unique_edges(numbered_words(n), edges);
}

UndirectedGraph barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed) {
    if (m < 1 || m >= n) throw InvalidArgument("barabasi_albert needs 1 <= m < n");
    Rng rng(seed);
    std::vector<Edge> edges;
    edges.reserve(n * m);
    // every edge end, so a uniform draw is a degree-proportional node draw
    std::vector<NodeId> ends;
    ends.reserve(2 * n * m);

    for (NodeId v = 0; v < m; ++v) {
        edges.emplace_back(v, static_cast<NodeId>(m));
        ends.push_back(v);
        ends.push_back(static_cast<NodeId>(m));
    }
    std::vector<NodeId> targets;
    for (auto v = static_cast<NodeId>(m + 1); v < n; ++v) {
        targets.clear();
        while (targets.size() < m) {
            const NodeId t = ends[rng.uniform_index(ends.size())];
            if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
        }
        for (NodeId t : targets) {
            edges.emplace_back(t, v);
            ends.push_back(t);
            ends.push_back(v);
        }
    }
    return UndirectedGraph::from_edges(numbered_words(n), std::move(edges));
}

}  // namespace lexnet

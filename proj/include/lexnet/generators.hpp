#pragma once

#include <cstddef>
#include <cstdint>

#include "lexnet/graph.hpp"

namespace lexnet {

/// G(n, p): each of the n(n-1)/2 pairs is linked independently with probability p.
/// Nodes are named "n0", "n1", ...
UndirectedGraph erdos_renyi(std::size_t n, double p, std::uint64_t seed);

/// Preferential attachment. Node m joins the m seed nodes; every later node
/// attaches to m distinct existing nodes chosen proportionally to degree.
UndirectedGraph barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed);

}  // namespace lexnet

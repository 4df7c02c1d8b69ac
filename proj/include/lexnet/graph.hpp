#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexnet/corpus.hpp"
#include "lexnet/embedding.hpp"

namespace lexnet {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Simple undirected unweighted graph over words.
///
/// Adjacency is stored in CSR form: each node's neighbours are a sorted id
/// array, so the structure has no self-loops or parallel edges by
/// construction and stays compact at tens of millions of edges.
class UndirectedGraph {
public:
    UndirectedGraph() = default;

    /// Builds from an edge list. Pairs may appear in either orientation and
    /// more than once; duplicates collapse and are counted in *duplicates.
    /// Self-loops and out-of-range ids throw InvalidArgument.
    static UndirectedGraph from_edges(std::vector<std::string> words, std::vector<Edge> edges,
                                      std::size_t* duplicates = nullptr);

    /// As from_edges, for edges already normalised to u < v, sorted and unique.
    static UndirectedGraph from_sorted_unique_edges(std::vector<std::string> words,
                                                    std::span<const Edge> edges);

    std::size_t node_count() const noexcept { return words_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }

    std::span<const NodeId> neighbors(NodeId v) const {
        return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
    }
    std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
    bool has_edge(NodeId u, NodeId v) const;

    const std::string& word(NodeId v) const { return words_.at(v); }
    const std::vector<std::string>& words() const noexcept { return words_; }
    std::optional<NodeId> find(std::string_view word) const;

    /// Edges with u < v in lexicographic (u, v) order.
    std::vector<Edge> edges() const;

    /// Verifies symmetry, absence of self-loops and parallel edges, and
    /// edge_count == sum(degree) / 2. Throws Error on violation.
    void check_invariants() const;

    bool operator==(const UndirectedGraph& other) const {
        return words_ == other.words_ && offsets_ == other.offsets_ && targets_ == other.targets_;
    }

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, NodeId> index_;
    std::vector<std::size_t> offsets_{0};
    std::vector<NodeId> targets_;
    std::size_t edge_count_ = 0;
};

struct CooccurrenceOptions {
    /// 0 links every pair of types in a text. k > 0 is an extension that only
    /// links tokens at most k positions apart.
    std::size_t window = 0;
    /// Caps the distinct in-vocabulary types considered per text (first seen
    /// wins); 0 means unlimited.
    std::size_t max_unique_tokens = 0;
    unsigned threads = 1;
};

/// Word co-occurrence network. Nodes are vocabulary words that occur in at
/// least one text, numbered in vocabulary order; every pair of distinct
/// in-vocabulary types sharing a text is linked.
UndirectedGraph build_wcn(const Corpus& corpus, const Vocabulary& vocab,
                          const CooccurrenceOptions& options = {});

/// Linear-interpolation percentile (rank = p/100 * (n-1)) of `values`,
/// which are reordered in place. percentile must lie in [0, 100].
double percentile_of(std::span<double> values, double percentile);

struct SimilarityThreshold {
    double value = 0.0;
    double percentile = 99.0;
    std::size_t sample_size = 0;  ///< pairs in the population the value was taken from
    std::uint64_t seed = 0;
    bool exhaustive = false;
};

/// Percentile of cosine similarity over `sample_size` uniformly drawn
/// unordered pairs (with replacement, never a word with itself).
SimilarityThreshold estimate_similarity_threshold(const EmbeddingMatrix& m, const Vocabulary& subset,
                                                  double percentile, std::size_t sample_size,
                                                  std::uint64_t seed);

/// Same percentile over every unordered pair of the subset.
SimilarityThreshold exhaustive_similarity_threshold(const EmbeddingMatrix& m, const Vocabulary& subset,
                                                    double percentile);

struct SimilarityOptions {
    std::size_t block_size = 1024;
    unsigned threads = 1;
};

/// Word similarity network: every subset word is a node and (u, v) is an edge
/// iff cosine(u, v) > threshold.value. Exhaustive over pairs, in blocks.
UndirectedGraph build_wsn(const EmbeddingMatrix& m, const Vocabulary& subset,
                          const SimilarityThreshold& threshold, const SimilarityOptions& options = {});

std::vector<std::size_t> degree_sequence(const UndirectedGraph& g);

struct GraphLoadStats {
    std::size_t duplicate_edges = 0;
};

/// Text format: "N E" header, N lines "id word", a "#edges" line, then E lines "u v".
void save_graph(const UndirectedGraph& g, const std::filesystem::path& path);
UndirectedGraph load_graph(const std::filesystem::path& path, GraphLoadStats* stats = nullptr);

}  // namespace lexnet

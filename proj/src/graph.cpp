#include "lexnet/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <thread>

#include "io_util.hpp"
#include "lexnet/error.hpp"
#include "lexnet/rng.hpp"

namespace lexnet {

namespace {

using PackedEdge = std::uint64_t;

PackedEdge pack(NodeId u, NodeId v) {
    if (u > v) std::swap(u, v);
    return (static_cast<PackedEdge>(u) << 32) | v;
}

Edge unpack(PackedEdge e) { return {static_cast<NodeId>(e >> 32), static_cast<NodeId>(e & 0xFFFFFFFFu)}; }

void sort_unique(std::vector<PackedEdge>& edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

std::unordered_map<std::string, NodeId> make_index(const std::vector<std::string>& words) {
    std::unordered_map<std::string, NodeId> index;
    index.reserve(words.size());
    for (NodeId v = 0; v < words.size(); ++v) {
        if (!index.emplace(words[v], v).second) {
            throw InvalidArgument("duplicate node word '" + words[v] + "'");
        }
    }
    return index;
}

}  // namespace

UndirectedGraph UndirectedGraph::from_sorted_unique_edges(std::vector<std::string> words,
                                                          std::span<const Edge> edges) {
    UndirectedGraph g;
    const std::size_t n = words.size();
    g.index_ = make_index(words);
    g.words_ = std::move(words);
    g.offsets_.assign(n + 1, 0);
    for (const auto& [u, v] : edges) {
        if (u >= v || v >= n) throw InvalidArgument("edge list is not normalised");
        ++g.offsets_[u + 1];
        ++g.offsets_[v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.targets_.resize(g.offsets_[n]);

    // Visiting edges in (u, v) order fills each row in ascending order: the
    // entries w < x of row x arrive as (w, x) sorted by w, before any (x, y).
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [u, v] : edges) {
        g.targets_[cursor[u]++] = v;
        g.targets_[cursor[v]++] = u;
    }
    g.edge_count_ = edges.size();
    return g;
}

UndirectedGraph UndirectedGraph::from_edges(std::vector<std::string> words, std::vector<Edge> edges,
                                            std::size_t* duplicates) {
    const std::size_t n = words.size();
    std::vector<PackedEdge> packed;
    packed.reserve(edges.size());
    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n) throw InvalidArgument("edge references unknown node id");
        if (u == v) throw InvalidArgument("self-loop on node " + std::to_string(u));
        packed.push_back(pack(u, v));
    }
    edges.clear();
    edges.shrink_to_fit();
    const std::size_t before = packed.size();
    sort_unique(packed);
    if (duplicates) *duplicates = before - packed.size();

    std::vector<Edge> normalised;
    normalised.reserve(packed.size());
    for (auto e : packed) normalised.push_back(unpack(e));
    return from_sorted_unique_edges(std::move(words), normalised);
}

bool UndirectedGraph::has_edge(NodeId u, NodeId v) const {
    if (u >= node_count() || v >= node_count()) return false;
    auto row = neighbors(u);
    return std::binary_search(row.begin(), row.end(), v);
}

std::optional<NodeId> UndirectedGraph::find(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<Edge> UndirectedGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (NodeId u = 0; u < node_count(); ++u) {
        for (NodeId v : neighbors(u)) {
            if (u < v) out.emplace_back(u, v);
        }
    }
    return out;
}

void UndirectedGraph::check_invariants() const {
    const std::size_t n = node_count();
    if (offsets_.size() != n + 1 || offsets_.back() != targets_.size()) {
        throw Error("graph invariant violated: adjacency offsets inconsistent");
    }
    for (NodeId u = 0; u < n; ++u) {
        auto row = neighbors(u);
        for (std::size_t i = 0; i < row.size(); ++i) {
            const NodeId v = row[i];
            if (v >= n) throw Error("graph invariant violated: neighbour id out of range");
            if (v == u) throw Error("graph invariant violated: self-loop on " + std::to_string(u));
            if (i > 0 && row[i - 1] >= v) throw Error("graph invariant violated: adjacency not a sorted set");
            if (!has_edge(v, u)) throw Error("graph invariant violated: asymmetric edge");
        }
    }
    if (targets_.size() != 2 * edge_count_) {
        throw Error("graph invariant violated: edge_count != sum(degree) / 2");
    }
}

// ---------------------------------------------------------------------------

namespace {

// Collects packed edges, periodically compacting duplicates so that memory
// tracks the number of distinct edges rather than the number of emitted pairs.
class EdgeCollector {
public:
    void add(NodeId u, NodeId v) {
        edges_.push_back(pack(u, v));
        if (edges_.size() >= next_compaction_) {
            sort_unique(edges_);
            next_compaction_ = std::max<std::size_t>(1 << 20, 2 * edges_.size());
        }
    }

    std::vector<PackedEdge> take() {
        sort_unique(edges_);
        return std::move(edges_);
    }

private:
    std::vector<PackedEdge> edges_;
    std::size_t next_compaction_ = 1 << 20;
};

void cooccurrence_edges(const std::vector<std::vector<NodeId>>& encoded, std::size_t begin,
                        std::size_t end, std::size_t node_count, const CooccurrenceOptions& options,
                        EdgeCollector& out) {
    std::vector<NodeId> types;
    std::vector<std::size_t> seen_in(node_count, static_cast<std::size_t>(-1));
    for (std::size_t t = begin; t < end; ++t) {
        const auto& ids = encoded[t];
        if (options.window == 0) {
            types.clear();
            for (NodeId id : ids) {
                if (seen_in[id] == t) continue;
                if (options.max_unique_tokens && types.size() >= options.max_unique_tokens) break;
                seen_in[id] = t;
                types.push_back(id);
            }
            for (std::size_t i = 0; i < types.size(); ++i) {
                for (std::size_t j = i + 1; j < types.size(); ++j) out.add(types[i], types[j]);
            }
        } else {
            for (std::size_t i = 0; i < ids.size(); ++i) {
                const std::size_t hi = std::min(ids.size(), i + options.window + 1);
                for (std::size_t j = i + 1; j < hi; ++j) {
                    if (ids[i] != ids[j]) out.add(ids[i], ids[j]);
                }
            }
        }
    }
}

}  // namespace

UndirectedGraph build_wcn(const Corpus& corpus, const Vocabulary& vocab, const CooccurrenceOptions& options) {
    if (corpus.empty()) throw InvalidArgument("empty corpus");
    if (vocab.empty()) throw InvalidArgument("empty vocabulary");

    // vocabulary ids present in the corpus, then node ids in vocabulary order
    std::vector<std::vector<WordId>> by_vocab;
    by_vocab.reserve(corpus.size());
    std::vector<char> present(vocab.size(), 0);
    for (const auto& text : corpus.texts()) {
        std::vector<WordId> ids;
        ids.reserve(text.tokens.size());
        for (const auto& token : text.tokens) {
            if (auto id = vocab.find(token)) {
                ids.push_back(*id);
                present[*id] = 1;
            }
        }
        by_vocab.push_back(std::move(ids));
    }
    std::vector<NodeId> node_of(vocab.size(), 0);
    std::vector<std::string> words;
    for (WordId id = 0; id < vocab.size(); ++id) {
        if (!present[id]) continue;
        node_of[id] = static_cast<NodeId>(words.size());
        words.push_back(vocab.word(id));
    }
    std::vector<std::vector<NodeId>> encoded(by_vocab.size());
    for (std::size_t t = 0; t < by_vocab.size(); ++t) {
        encoded[t].reserve(by_vocab[t].size());
        for (WordId id : by_vocab[t]) encoded[t].push_back(node_of[id]);
    }
    by_vocab.clear();

    const unsigned threads =
        std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(encoded.size())));
    std::vector<PackedEdge> packed;
    if (threads == 1) {
        EdgeCollector collector;
        cooccurrence_edges(encoded, 0, encoded.size(), words.size(), options, collector);
        packed = collector.take();
    } else {
        std::vector<EdgeCollector> collectors(threads);
        {
            std::vector<std::jthread> workers;
            const std::size_t chunk = (encoded.size() + threads - 1) / threads;
            for (unsigned w = 0; w < threads; ++w) {
                const std::size_t begin = std::min(encoded.size(), w * chunk);
                const std::size_t end = std::min(encoded.size(), begin + chunk);
                workers.emplace_back([&, w, begin, end] {
                    cooccurrence_edges(encoded, begin, end, words.size(), options, collectors[w]);
                });
            }
        }
        for (auto& c : collectors) {
            auto part = c.take();
            packed.insert(packed.end(), part.begin(), part.end());
        }
        sort_unique(packed);
    }

    std::vector<Edge> edges;
    edges.reserve(packed.size());
    for (auto e : packed) edges.push_back(unpack(e));
    packed = {};
    auto g = UndirectedGraph::from_sorted_unique_edges(std::move(words), edges);
    g.check_invariants();
    return g;
}

// ---------------------------------------------------------------------------

double percentile_of(std::span<double> values, double percentile) {
    if (values.empty()) throw InvalidArgument("percentile of an empty population");
    if (!(percentile >= 0.0 && percentile <= 100.0)) throw InvalidArgument("percentile must lie in [0, 100]");
    const double rank = percentile / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const double frac = rank - static_cast<double>(lo);
    std::nth_element(values.begin(), values.begin() + lo, values.end());
    const double a = values[lo];
    if (frac == 0.0 || lo + 1 >= values.size()) return a;
    const double b = *std::min_element(values.begin() + lo + 1, values.end());
    return a + frac * (b - a);
}

namespace {

/// Unit-normalised copies of the subset's input vectors, row-major.
class UnitVectors {
public:
    UnitVectors(const EmbeddingMatrix& m, const Vocabulary& subset) : dim_(m.dim()) {
        data_.resize(subset.size() * dim_);
        for (WordId id = 0; id < subset.size(); ++id) {
            auto row = m.find(subset.word(id));
            if (!row) throw InvalidArgument("word '" + subset.word(id) + "' has no embedding");
            auto v = m.input(*row);
            double norm = 0.0;
            for (float x : v) norm += static_cast<double>(x) * x;
            norm = std::sqrt(norm);
            if (norm == 0.0) {
                throw UndefinedValue("undefined similarity: zero vector for word '" + subset.word(id) + "'");
            }
            double* dst = data_.data() + id * dim_;
            for (std::size_t i = 0; i < dim_; ++i) dst[i] = v[i] / norm;
        }
    }

    double similarity(std::size_t a, std::size_t b) const {
        const double* x = data_.data() + a * dim_;
        const double* y = data_.data() + b * dim_;
        double s = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) s += x[i] * y[i];
        return std::clamp(s, -1.0, 1.0);
    }

private:
    std::size_t dim_;
    std::vector<double> data_;
};

void check_percentile(double percentile) {
    if (!(percentile > 0.0 && percentile < 100.0)) throw InvalidArgument("percentile must lie in (0, 100)");
}

}  // namespace

SimilarityThreshold estimate_similarity_threshold(const EmbeddingMatrix& m, const Vocabulary& subset,
                                                  double percentile, std::size_t sample_size,
                                                  std::uint64_t seed) {
    check_percentile(percentile);
    if (subset.size() < 2) throw InvalidArgument("threshold estimation needs at least 2 words");
    if (sample_size < 1000) throw InvalidArgument("sample_size must be >= 1000");
    const UnitVectors units(m, subset);
    const std::uint64_t n = subset.size();

    Rng rng(seed);
    std::vector<double> sims(sample_size);
    for (auto& s : sims) {
        const auto i = rng.uniform_index(n);
        auto j = rng.uniform_index(n - 1);
        if (j >= i) ++j;
        s = units.similarity(i, j);
    }
    return {percentile_of(sims, percentile), percentile, sample_size, seed, false};
}

SimilarityThreshold exhaustive_similarity_threshold(const EmbeddingMatrix& m, const Vocabulary& subset,
                                                    double percentile) {
    check_percentile(percentile);
    if (subset.size() < 2) throw InvalidArgument("threshold estimation needs at least 2 words");
    const UnitVectors units(m, subset);
    const std::size_t n = subset.size();
    const std::size_t pairs = n * (n - 1) / 2;

    // Two passes keep memory independent of the pair count: a fine histogram
    // locates the bins holding the two order statistics, then only values in
    // those bins are materialised and sorted.
    constexpr std::size_t kBins = std::size_t{1} << 20;
    auto bin_of = [](double s) {
        const auto b = static_cast<std::size_t>((s + 1.0) * 0.5 * static_cast<double>(kBins));
        return std::min(b, kBins - 1);
    };
    std::vector<std::uint64_t> hist(kBins, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) ++hist[bin_of(units.similarity(i, j))];
    }

    const double rank = percentile / 100.0 * static_cast<double>(pairs - 1);
    const auto lo_rank = static_cast<std::uint64_t>(std::floor(rank));
    const auto hi_rank = std::min<std::uint64_t>(lo_rank + 1, pairs - 1);
    std::uint64_t before = 0;
    std::size_t lo_bin = 0;
    while (before + hist[lo_bin] <= lo_rank) before += hist[lo_bin++];
    std::uint64_t through = before;
    std::size_t hi_bin = lo_bin;
    while (through + hist[hi_bin] <= hi_rank) through += hist[hi_bin++];

    std::vector<double> window;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = units.similarity(i, j);
            const auto b = bin_of(s);
            if (b >= lo_bin && b <= hi_bin) window.push_back(s);
        }
    }
    std::sort(window.begin(), window.end());
    const double a = window[lo_rank - before];
    const double b = window[hi_rank - before];
    const double frac = rank - static_cast<double>(lo_rank);
    return {a + frac * (b - a), percentile, pairs, 0, true};
}

UndirectedGraph build_wsn(const EmbeddingMatrix& m, const Vocabulary& subset,
                          const SimilarityThreshold& threshold, const SimilarityOptions& options) {
    // values below -1 are accepted: they request the complete graph
    if (std::isnan(threshold.value) || threshold.value > 1.0) {
        throw InvalidArgument("similarity threshold must not exceed 1");
    }
    if (subset.empty()) throw InvalidArgument("empty vocabulary");
    const UnitVectors units(m, subset);
    const std::size_t n = subset.size();
    const std::size_t block = std::max<std::size_t>(1, options.block_size);
    const std::size_t blocks = (n + block - 1) / block;
    const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(blocks)));

    // Row block r goes to worker r % threads; each worker emits edges for its
    // rows in (u, v) order, so concatenating by row block keeps global order.
    std::vector<std::vector<Edge>> per_block(blocks);
    auto work = [&](unsigned w) {
        for (std::size_t rb = w; rb < blocks; rb += threads) {
            auto& out = per_block[rb];
            const std::size_t r0 = rb * block;
            const std::size_t r1 = std::min(n, r0 + block);
            for (std::size_t i = r0; i < r1; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) {
                    if (units.similarity(i, j) > threshold.value) {
                        out.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
                    }
                }
            }
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < threads; ++w) workers.emplace_back(work, w);
    }

    std::size_t total = 0;
    for (const auto& part : per_block) total += part.size();
    std::vector<Edge> edges;
    edges.reserve(total);
    for (auto& part : per_block) {
        edges.insert(edges.end(), part.begin(), part.end());
        part = {};
    }
    auto g = UndirectedGraph::from_sorted_unique_edges(subset.words(), edges);
    g.check_invariants();
    return g;
}

std::vector<std::size_t> degree_sequence(const UndirectedGraph& g) {
    std::vector<std::size_t> degrees(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v) degrees[v] = g.degree(v);
    return degrees;
}

// ---------------------------------------------------------------------------

void save_graph(const UndirectedGraph& g, const std::filesystem::path& path) {
    auto out = detail::open_output(path);
    out << g.node_count() << ' ' << g.edge_count() << '\n';
    for (NodeId v = 0; v < g.node_count(); ++v) out << v << ' ' << g.word(v) << '\n';
    out << "#edges\n";
    for (NodeId u = 0; u < g.node_count(); ++u) {
        for (NodeId v : g.neighbors(u)) {
            if (u < v) out << u << ' ' << v << '\n';
        }
    }
    detail::finish_output(out, path);
}

namespace {

bool parse_uint(std::string_view text, std::uint64_t& value) {
    if (text.empty()) return false;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc{} && p == text.data() + text.size();
}

}  // namespace

UndirectedGraph load_graph(const std::filesystem::path& path, GraphLoadStats* stats) {
    auto in = detail::open_input(path);
    const auto source = path.string();
    std::string line;
    std::size_t line_no = 1;

    if (!detail::read_line(in, line)) throw ParseError(source, 1, "missing header \"N E\"");
    std::uint64_t n = 0;
    std::uint64_t e = 0;
    {
        const auto space = line.find(' ');
        if (space == std::string::npos || !parse_uint(std::string_view(line).substr(0, space), n) ||
            !parse_uint(std::string_view(line).substr(space + 1), e)) {
            throw ParseError(source, 1, "expected header \"N E\"");
        }
    }
    if (n > std::uint64_t{0xFFFFFFFFu}) throw ParseError(source, 1, "too many nodes");

    std::vector<std::string> words;
    words.reserve(n);
    while (words.size() < n) {
        if (!detail::read_line(in, line)) throw ParseError(source, line_no + 1, "unexpected end of node table");
        ++line_no;
        const auto space = line.find(' ');
        std::uint64_t id = 0;
        if (space == std::string::npos || space + 1 == line.size() ||
            !parse_uint(std::string_view(line).substr(0, space), id)) {
            throw ParseError(source, line_no, "expected \"id word\"");
        }
        if (id != words.size()) throw ParseError(source, line_no, "node ids must be contiguous starting at 0");
        words.push_back(line.substr(space + 1));
    }
    ++line_no;
    if (!detail::read_line(in, line) || line != "#edges") throw ParseError(source, line_no, "expected \"#edges\"");

    std::vector<Edge> edges;
    edges.reserve(e);
    while (detail::read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto space = line.find(' ');
        std::uint64_t u = 0;
        std::uint64_t v = 0;
        if (space == std::string::npos || !parse_uint(std::string_view(line).substr(0, space), u) ||
            !parse_uint(std::string_view(line).substr(space + 1), v)) {
            throw ParseError(source, line_no, "expected \"u v\"");
        }
        if (u >= n || v >= n) throw ParseError(source, line_no, "edge references unknown node id");
        if (u == v) throw ParseError(source, line_no, "self-loop on node " + std::to_string(u));
        edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
    if (edges.size() != e) {
        throw ParseError(source, line_no, "header declares " + std::to_string(e) + " edges, found " +
                                              std::to_string(edges.size()));
    }
    std::size_t duplicates = 0;
    UndirectedGraph g;
    try {
        g = UndirectedGraph::from_edges(std::move(words), std::move(edges), &duplicates);
    } catch (const InvalidArgument& err) {
        throw ParseError(source, line_no, err.what());
    }
    if (stats) stats->duplicate_edges = duplicates;
    return g;
}

}  // namespace lexnet

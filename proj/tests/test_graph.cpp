#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "lexnet/error.hpp"
#include "lexnet/graph.hpp"
#include "oracles.hpp"

using namespace lexnet;

namespace {

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("lexnet_test_" + name);
}

Vocabulary vocab_of(const Corpus& c) { return build_vocabulary(c, 0); }

std::set<std::string> word_set(const Vocabulary& v) { return {v.words().begin(), v.words().end()}; }

/// Embedding rows whose Gram matrix is `gram`, via Cholesky.
EmbeddingMatrix from_gram(const std::vector<std::vector<double>>& gram, const std::vector<std::string>& words) {
    const std::size_t n = gram.size();
    std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double s = gram[i][j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
            l[i][j] = i == j ? std::sqrt(s) : s / l[j][j];
        }
    EmbeddingMatrix m(words, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m.input(i)[j] = static_cast<float>(l[i][j]);
    return m;
}

Vocabulary uniform_vocab(const std::vector<std::string>& words) {
    std::vector<std::pair<std::string, std::uint64_t>> e;
    for (const auto& w : words) e.emplace_back(w, 10);
    return Vocabulary::from_entries(e, 0);
}

EmbeddingMatrix random_embeddings(std::size_t n, std::size_t dim, std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<float> normal;
    std::vector<std::string> words;
    for (std::size_t i = 0; i < n; ++i) words.push_back("w" + std::to_string(i));
    EmbeddingMatrix m(words, dim);
    for (auto& x : m.input_data()) x = normal(gen);
    return m;
}

}  // namespace

TEST_CASE("from_edges normalizes and deduplicates") {
    std::size_t dup = 0;
    const auto g = UndirectedGraph::from_edges({"a", "b", "c"}, {{1, 0}, {0, 1}, {2, 1}}, &dup);
    CHECK(g.edge_count() == 2);
    CHECK(dup == 1);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(1, 0));
    CHECK_FALSE(g.has_edge(0, 2));
    CHECK_NOTHROW(g.check_invariants());
    CHECK_THROWS_AS(UndirectedGraph::from_edges({"a"}, {{0, 0}}), InvalidArgument);
    CHECK_THROWS_AS(UndirectedGraph::from_edges({"a"}, {{0, 1}}), InvalidArgument);
}

TEST_CASE("wcn of a single text is the clique over its types") {
    const auto c = oracle::make_corpus({{"a", "b", "a", "c"}});
    const auto g = build_wcn(c, vocab_of(c));
    CHECK(g.node_count() == 3);
    CHECK(oracle::word_edges(g) == std::set<std::pair<std::string, std::string>>{{"a", "b"}, {"a", "c"}, {"b", "c"}});
}

TEST_CASE("wcn only links words sharing a text") {
    const auto c = oracle::make_corpus({{"a", "b"}, {"b", "c"}});
    const auto g = build_wcn(c, vocab_of(c));
    CHECK(g.edge_count() == 2);
    CHECK_FALSE(g.has_edge(*g.find("a"), *g.find("c")));
}

TEST_CASE("a word alone in its text is an isolated node") {
    const auto c = oracle::make_corpus({{"a"}, {"b", "c"}});
    const auto g = build_wcn(c, vocab_of(c));
    CHECK(g.node_count() == 3);
    CHECK(g.degree(*g.find("a")) == 0);
}

TEST_CASE("wcn matches the brute-force clique union") {
    for (std::uint32_t seed = 1; seed <= 25; ++seed) {
        const auto texts = oracle::random_texts(300, 60, seed);
        const auto corpus = oracle::make_corpus(texts);
        const auto vocab = build_vocabulary(corpus, 3);
        const auto expected = oracle::wcn_edges(texts, word_set(vocab));
        for (unsigned threads : {1u, 4u}) {
            const auto g = build_wcn(corpus, vocab, {.window = 0, .max_unique_tokens = 0, .threads = threads});
            g.check_invariants();
            CHECK(oracle::word_edges(g) == expected);
            // degree bounded by the number of distinct co-occurring types
            for (NodeId v = 0; v < g.node_count(); ++v) {
                std::set<std::string> partners;
                for (const auto& [a, b] : expected) {
                    if (a == g.word(v)) partners.insert(b);
                    if (b == g.word(v)) partners.insert(a);
                }
                CHECK(g.degree(v) <= partners.size());
            }
        }
    }
}

TEST_CASE("wcn window extension links tokens within the window only") {
    const auto c = oracle::make_corpus({{"a", "b", "c", "d"}});
    CooccurrenceOptions opts;
    opts.window = 1;
    const auto g = build_wcn(c, vocab_of(c), opts);
    CHECK(oracle::word_edges(g) == std::set<std::pair<std::string, std::string>>{{"a", "b"}, {"b", "c"}, {"c", "d"}});
}

TEST_CASE("max_unique_tokens keeps the first types of each text") {
    const auto c = oracle::make_corpus({{"a", "b", "a", "c", "d"}, {"a", "e"}});
    CooccurrenceOptions opts;
    opts.max_unique_tokens = 3;
    const auto g = build_wcn(c, vocab_of(c), opts);
    CHECK(oracle::word_edges(g) ==
          std::set<std::pair<std::string, std::string>>{{"a", "b"}, {"a", "c"}, {"b", "c"}, {"a", "e"}});
    CHECK(g.degree(*g.find("d")) == 0);
}

TEST_CASE("percentile uses linear interpolation") {
    std::vector<double> v = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    CHECK(percentile_of(v, 50) == doctest::Approx(0.35).epsilon(1e-12));
    std::vector<double> w = {4, 1, 3, 2};
    CHECK(percentile_of(w, 0) == 1);
    CHECK(percentile_of(w, 100) == 4);
    CHECK(percentile_of(w, 25) == doctest::Approx(1.75));
    CHECK_THROWS_AS(percentile_of(w, 101), InvalidArgument);
}

TEST_CASE("exhaustive threshold over a known population") {
    const std::vector<std::vector<double>> gram = {
        {1.0, 0.1, 0.2, 0.3}, {0.1, 1.0, 0.4, 0.5}, {0.2, 0.4, 1.0, 0.6}, {0.3, 0.5, 0.6, 1.0}};
    const std::vector<std::string> words = {"a", "b", "c", "d"};
    const auto m = from_gram(gram, words);
    const auto t = exhaustive_similarity_threshold(m, uniform_vocab(words), 50);
    CHECK(t.value == doctest::Approx(0.35).epsilon(1e-6));
    CHECK(t.exhaustive);
    CHECK(t.sample_size == 6);
}

TEST_CASE("identical vectors give threshold 1 at any percentile") {
    std::vector<std::string> words = {"a", "b", "c", "d", "e"};
    EmbeddingMatrix m(words, 3);
    for (std::size_t i = 0; i < words.size(); ++i) {
        m.input(i)[0] = 1.0f;
        m.input(i)[1] = 2.0f;
        m.input(i)[2] = -0.5f;
    }
    for (double p : {1.0, 50.0, 99.0}) {
        CHECK(exhaustive_similarity_threshold(m, uniform_vocab(words), p).value == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(estimate_similarity_threshold(m, uniform_vocab(words), p, 1000, 3).value ==
              doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("sampled threshold leaves about one percent of pairs above it") {
    const auto m = random_embeddings(800, 12, 4);
    const auto vocab = uniform_vocab(m.words());
    const auto t = estimate_similarity_threshold(m, vocab, 99, 200000, 9);
    CHECK(t.sample_size == 200000);
    CHECK_FALSE(t.exhaustive);
    const auto g = build_wsn(m, vocab, t);
    const double pairs = 800.0 * 799.0 / 2.0;
    CHECK(std::abs(g.edge_count() / pairs - 0.01) < 0.002);
    CHECK(estimate_similarity_threshold(m, vocab, 99, 200000, 9).value == t.value);
    CHECK_THROWS_AS(estimate_similarity_threshold(m, vocab, 99, 999, 9), InvalidArgument);
}

TEST_CASE("exhaustive threshold agrees with a sorted enumeration") {
    const auto m = random_embeddings(120, 6, 2);
    const auto vocab = uniform_vocab(m.words());
    std::vector<double> sims;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j) sims.push_back(cosine_similarity(m.input(i), m.input(j)));
    for (double p : {10.0, 50.0, 99.0}) {
        auto copy = sims;
        CHECK(exhaustive_similarity_threshold(m, vocab, p).value == doctest::Approx(percentile_of(copy, p)).epsilon(1e-9));
    }
}

TEST_CASE("wsn thresholding") {
    // sims (a,b) = (b,c) = 0.7, (a,c) = 0.1; the 0.9/0.9/0.1 triple has no real embedding
    const std::vector<std::vector<double>> feasible = {{1.0, 0.7, 0.1}, {0.7, 1.0, 0.7}, {0.1, 0.7, 1.0}};
    const std::vector<std::string> words = {"a", "b", "c"};
    const auto m = from_gram(feasible, words);
    const auto vocab = uniform_vocab(words);

    SimilarityThreshold t;
    t.value = 0.5;
    const auto path = build_wsn(m, vocab, t);
    CHECK(path.edge_count() == 2);
    CHECK_FALSE(path.has_edge(*path.find("a"), *path.find("c")));

    t.value = 1.0;
    CHECK(build_wsn(m, vocab, t).edge_count() == 0);
    t.value = -1.0 - 1e-9;
    CHECK(build_wsn(m, vocab, t).edge_count() == 3);
    t.value = 1.5;
    CHECK_THROWS_AS(build_wsn(m, vocab, t), InvalidArgument);
}

TEST_CASE("wsn edge count is monotone in the threshold and thread independent") {
    const auto m = random_embeddings(300, 8, 6);
    const auto vocab = uniform_vocab(m.words());
    std::size_t previous = SIZE_MAX;
    for (double value : {-0.2, 0.3, 0.6}) {
        SimilarityThreshold t;
        t.value = value;
        const auto g = build_wsn(m, vocab, t, {.block_size = 37, .threads = 1});
        g.check_invariants();
        CHECK(g.edge_count() <= previous);
        previous = g.edge_count();
        CHECK(g == build_wsn(m, vocab, t, {.block_size = 64, .threads = 4}));
        // brute-force check of every pair
        for (NodeId i = 0; i < g.node_count(); ++i)
            for (NodeId j = i + 1; j < g.node_count(); ++j)
                CHECK(g.has_edge(i, j) == (cosine_similarity(m.input(i), m.input(j)) > value));
    }
}

TEST_CASE("wsn nodes come from the subset only") {
    const auto m = random_embeddings(50, 4, 1);
    const auto subset = sample_vocabulary(uniform_vocab(m.words()), 0.2, 3);
    SimilarityThreshold t;
    t.value = 0.0;
    const auto g = build_wsn(m, subset, t);
    CHECK(g.node_count() == 10);
    for (const auto& w : g.words()) CHECK(subset.contains(w));
}

TEST_CASE("degree sequences") {
    const auto tri = UndirectedGraph::from_edges({"a", "b", "c"}, {{0, 1}, {1, 2}, {0, 2}});
    CHECK(degree_sequence(tri) == std::vector<std::size_t>{2, 2, 2});
    const auto star = UndirectedGraph::from_edges({"h", "x", "y", "z"}, {{0, 1}, {0, 2}, {0, 3}});
    CHECK(degree_sequence(star) == std::vector<std::size_t>{3, 1, 1, 1});
    const auto empty = UndirectedGraph::from_edges({"a", "b"}, {});
    CHECK(degree_sequence(empty) == std::vector<std::size_t>{0, 0});
}

TEST_CASE("graph file round trip") {
    const auto tri = UndirectedGraph::from_edges({"貓", "狗", "鳥"}, {{0, 1}, {1, 2}, {0, 2}});
    const auto path = temp_path("tri.graph");
    save_graph(tri, path);
    CHECK(load_graph(path) == tri);
    std::filesystem::remove(path);
}

TEST_CASE("graph files with self-loops are rejected, duplicates collapse") {
    const auto path = temp_path("bad.graph");
    {
        std::ofstream out(path);
        out << "4 1\n0 a\n1 b\n2 c\n3 d\n#edges\n3 3\n";
    }
    CHECK_THROWS_AS(load_graph(path), ParseError);
    {
        std::ofstream out(path);
        out << "3 3\n0 a\n1 b\n2 c\n#edges\n0 1\n1 0\n1 2\n";
    }
    GraphLoadStats stats;
    const auto g = load_graph(path, &stats);
    CHECK(g.edge_count() == 2);
    CHECK(stats.duplicate_edges == 1);
    std::filesystem::remove(path);
}

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "lexnet/embedding.hpp"
#include "lexnet/error.hpp"
#include "oracles.hpp"

using namespace lexnet;

namespace {

using Vec = std::vector<double>;

double loss(const Vec& c, const Vec& o, const std::vector<Vec>& negs) {
    std::vector<std::span<const double>> spans(negs.begin(), negs.end());
    return sgns_pair_loss(c, o, spans);
}

SgnsGradient gradient(const Vec& c, const Vec& o, const std::vector<Vec>& negs) {
    std::vector<std::span<const double>> spans(negs.begin(), negs.end());
    return sgns_pair_gradient(c, o, spans);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Vec random_vec(std::mt19937& gen, std::size_t dim) {
    std::normal_distribution<double> n(0.0, 0.7);
    Vec v(dim);
    for (auto& x : v) x = n(gen);
    return v;
}

double rel_error(double a, double b) { return std::abs(a - b) / std::max({1e-8, std::abs(a), std::abs(b)}); }

Corpus topic_corpus() {
    std::mt19937 gen(3);
    const std::vector<std::string> a = {"a", "b", "c"}, x = {"x", "y", "z"};
    std::uniform_int_distribution<int> pick(0, 2), len(4, 8);
    std::vector<std::vector<std::string>> texts;
    for (int i = 0; i < 1000; ++i) {
        const auto& topic = i % 2 == 0 ? a : x;
        std::vector<std::string> t;
        for (int n = len(gen); n > 0; --n) t.push_back(topic[pick(gen)]);
        texts.push_back(t);
    }
    return oracle::make_corpus(texts);
}

TrainingConfig small_config() {
    TrainingConfig cfg;
    cfg.dim = 16;
    cfg.window = 5;
    cfg.epochs = 3;
    cfg.seed = 42;
    return cfg;
}

}  // namespace

TEST_CASE("pair loss at zero vectors") {
    const Vec z(4, 0.0);
    CHECK(loss(z, z, {z}) == doctest::Approx(-2.0 * std::log(0.5)).epsilon(1e-12));
    CHECK(loss(z, z, {z}) == doctest::Approx(1.386294).epsilon(1e-6));
}

TEST_CASE("pair loss with a unit vector and no negatives") {
    const Vec e1 = {1, 0, 0};
    CHECK(loss(e1, e1, {}) == doctest::Approx(-std::log(sigmoid(1.0))).epsilon(1e-14));
    CHECK(loss(e1, e1, {}) == doctest::Approx(0.313262).epsilon(1e-6));
}

TEST_CASE("pair loss decreases as center and context align") {
    // varying the context leaves center . negative fixed
    const Vec center = {1.0, 0.0}, n = {0.2, -0.1};
    double previous = INFINITY;
    for (double s = -3; s <= 3; s += 0.25) {
        const double l = loss(center, {s, 0.3}, {n});
        CHECK(l < previous);
        previous = l;
    }
}

TEST_CASE("gradient of zero vectors is zero") {
    const Vec z(3, 0.0);
    const auto g = gradient(z, z, {z, z});
    for (double v : g.center) CHECK(v == 0.0);
    for (double v : g.context) CHECK(v == 0.0);
    for (const auto& n : g.negatives)
        for (double v : n) CHECK(v == 0.0);
}

TEST_CASE("gradient matches the closed form") {
    std::mt19937 gen(5);
    const auto c = random_vec(gen, 6), o = random_vec(gen, 6), n1 = random_vec(gen, 6), n2 = random_vec(gen, 6);
    const auto g = gradient(c, o, {n1, n2});
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double expect =
            (sigmoid(dot(c, o)) - 1.0) * o[i] + sigmoid(dot(c, n1)) * n1[i] + sigmoid(dot(c, n2)) * n2[i];
        CHECK(g.center[i] == doctest::Approx(expect).epsilon(1e-12));
        CHECK(g.context[i] == doctest::Approx((sigmoid(dot(c, o)) - 1.0) * c[i]).epsilon(1e-12));
        CHECK(g.negatives[0][i] == doctest::Approx(sigmoid(dot(c, n1)) * c[i]).epsilon(1e-12));
    }
}

TEST_CASE("gradient agrees with central finite differences") {
    std::mt19937 gen(17);
    const double h = 1e-5;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t dim = 1 + trial % 8;
        const int k = trial % 4;
        auto c = random_vec(gen, dim), o = random_vec(gen, dim);
        std::vector<Vec> negs;
        for (int i = 0; i < k; ++i) negs.push_back(random_vec(gen, dim));
        const auto g = gradient(c, o, negs);

        auto probe = [&](Vec& v, std::size_t i) {
            const double saved = v[i];
            v[i] = saved + h;
            const double up = loss(c, o, negs);
            v[i] = saved - h;
            const double down = loss(c, o, negs);
            v[i] = saved;
            return (up - down) / (2 * h);
        };
        for (std::size_t i = 0; i < dim; ++i) {
            CHECK(rel_error(g.center[i], probe(c, i)) < 1e-4);
            CHECK(rel_error(g.context[i], probe(o, i)) < 1e-4);
            for (int j = 0; j < k; ++j) CHECK(rel_error(g.negatives[j][i], probe(negs[j], i)) < 1e-4);
        }
    }
}

TEST_CASE("noise weights follow count^0.75") {
    const auto v = Vocabulary::from_entries({{"a", 100}, {"b", 30}, {"c", 7}}, 0);
    const NoiseDistribution noise(v);
    CHECK(noise.weight(0) / noise.weight(1) == doctest::Approx(std::pow(100.0 / 30.0, 0.75)).epsilon(1e-9));
    CHECK(noise.weight(1) / noise.weight(2) == doctest::Approx(std::pow(30.0 / 7.0, 0.75)).epsilon(1e-9));
    double total = 0;
    for (double w : noise.weights()) total += w;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("noise sampling frequencies track the weights") {
    const auto v = Vocabulary::from_entries({{"a", 100}, {"b", 30}, {"c", 7}}, 0);
    const NoiseDistribution noise(v);
    Rng rng(8);
    std::vector<int> hits(3, 0);
    const int draws = 200000;
    for (int i = 0; i < draws; ++i) ++hits[noise.sample(rng)];
    for (int i = 0; i < 3; ++i) {
        const double p = noise.weight(i);
        CHECK(std::abs(hits[i] - draws * p) < 4.0 * std::sqrt(draws * p * (1 - p)));
    }
}

TEST_CASE("cosine similarity identities") {
    const Vec v = {1.5, -2.0, 0.25}, e1 = {1, 0, 0}, e2 = {0, 1, 0};
    Vec neg = v;
    for (auto& x : neg) x = -x;
    CHECK(cosine_similarity(v, v) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cosine_similarity(e1, e2) == 0.0);
    CHECK(cosine_similarity(v, neg) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK_THROWS_WITH_AS(cosine_similarity(Vec{0, 0, 0}, v), doctest::Contains("undefined similarity"),
                         UndefinedValue);
    CHECK_THROWS_AS(cosine_similarity(Vec{1, 2}, v), InvalidArgument);
}

TEST_CASE("cosine similarity is symmetric and scale invariant") {
    std::mt19937 gen(23);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = random_vec(gen, 7), b = random_vec(gen, 7);
        Vec sa = a, sb = b;
        const double alpha = scale(gen), beta = scale(gen);
        for (auto& x : sa) x *= alpha;
        for (auto& x : sb) x *= beta;
        CHECK(std::abs(cosine_similarity(a, b) - cosine_similarity(b, a)) < 1e-12);
        CHECK(std::abs(cosine_similarity(sa, sb) - cosine_similarity(a, b)) < 1e-9);
    }
}

TEST_CASE("training config validation") {
    TrainingConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.dim = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.initial_lr = -1;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("zero epochs leaves the initialization untouched") {
    const auto corpus = topic_corpus();
    const auto vocab = build_vocabulary(corpus, 0);
    auto cfg = small_config();
    cfg.epochs = 0;
    const auto m = train_sgns(corpus, vocab, cfg);
    const float bound = 0.5f / static_cast<float>(cfg.dim);
    for (float x : m.input_data()) CHECK(std::abs(x) <= bound);
    for (float x : m.output_data()) CHECK(x == 0.0f);
    CHECK(m == train_sgns(corpus, vocab, cfg));
}

TEST_CASE("single-threaded training is bit-identical across runs") {
    const auto corpus = topic_corpus();
    const auto vocab = build_vocabulary(corpus, 0);
    const auto cfg = small_config();
    CHECK(train_sgns(corpus, vocab, cfg) == train_sgns(corpus, vocab, cfg));
    auto other = cfg;
    other.seed = 43;
    CHECK_FALSE(train_sgns(corpus, vocab, cfg) == train_sgns(corpus, vocab, other));
}

TEST_CASE("training separates two disjoint topics") {
    const auto corpus = topic_corpus();
    const auto vocab = build_vocabulary(corpus, 0);
    for (unsigned threads : {1u, 4u}) {
        auto cfg = small_config();
        cfg.threads = threads;
        std::vector<EpochStats> log;
        const auto m = train_sgns(corpus, vocab, cfg, &log);
        auto sim = [&](const char* a, const char* b) {
            return cosine_similarity(std::span<const double>(m.vector_of(a)), std::span<const double>(m.vector_of(b)));
        };
        const double within = (sim("a", "b") + sim("a", "c") + sim("b", "c") + sim("x", "y") + sim("x", "z") + sim("y", "z")) / 6;
        double cross = 0;
        for (const char* p : {"a", "b", "c"})
            for (const char* q : {"x", "y", "z"}) cross += sim(p, q) / 9;
        CHECK(within > cross + 0.2);

        // first three epochs: loss non-increasing, one rise of < 5% tolerated
        REQUIRE(log.size() == 3);
        int rises = 0;
        for (std::size_t i = 1; i < log.size(); ++i) {
            if (log[i].mean_loss > log[i - 1].mean_loss) {
                ++rises;
                CHECK(log[i].mean_loss < 1.05 * log[i - 1].mean_loss);
            }
        }
        CHECK(rises <= 1);
    }
}

TEST_CASE("embedding file round trip preserves similarities") {
    const auto corpus = topic_corpus();
    const auto vocab = build_vocabulary(corpus, 0);
    const auto m = train_sgns(corpus, vocab, small_config());
    const auto path = std::filesystem::temp_directory_path() / "lexnet_test_embeddings.txt";
    save_embeddings(m, path);
    const auto back = load_embeddings(path);
    REQUIRE(back.size() == m.size());
    REQUIRE(back.dim() == m.dim());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            CHECK(std::abs(cosine_similarity(m.input(i), m.input(j)) - cosine_similarity(back.input(i), back.input(j))) < 1e-6);
    std::filesystem::remove(path);
}

TEST_CASE("embedding files are validated") {
    const auto path = std::filesystem::temp_directory_path() / "lexnet_test_bad_embeddings.txt";
    {
        std::ofstream out(path);
        out << "3 2\na 1 2\nb 3 4\n";
    }
    CHECK_THROWS_AS(load_embeddings(path), ParseError);
    {
        std::ofstream out(path);
        out << "1 3\na 1 2\n";
    }
    CHECK_THROWS_AS(load_embeddings(path), ParseError);
    std::filesystem::remove(path);

    CHECK_THROWS_WITH(save_embeddings(EmbeddingMatrix{}, path), doctest::Contains("no vectors"));
}

#include "lexnet/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "io_util.hpp"
#include "lexnet/error.hpp"

namespace lexnet {

void TrainingConfig::validate() const {
    if (window < 1) throw InvalidArgument("window must be >= 1");
    if (dim < 1) throw InvalidArgument("dim must be >= 1");
    if (negatives < 1) throw InvalidArgument("negatives must be >= 1");
    if (epochs < 0) throw InvalidArgument("epochs must be >= 0");
    if (!(initial_lr > 0.0) || !std::isfinite(initial_lr)) throw InvalidArgument("initial_lr must be positive");
    if (subsample_threshold < 0.0) throw InvalidArgument("subsample_threshold must be >= 0");
    if (threads < 1) throw InvalidArgument("threads must be >= 1");
}

NoiseDistribution::NoiseDistribution(const Vocabulary& vocab, double power) {
    if (vocab.empty()) throw InvalidArgument("empty vocabulary");
    weights_.resize(vocab.size());
    double total = 0.0;
    for (WordId id = 0; id < vocab.size(); ++id) {
        weights_[id] = std::pow(static_cast<double>(vocab.count(id)), power);
        total += weights_[id];
    }
    if (!(total > 0.0)) throw InvalidArgument("noise distribution has zero mass");
    cumulative_.resize(weights_.size());
    double running = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        weights_[i] /= total;
        running += weights_[i];
        cumulative_[i] = running;
    }
    cumulative_.back() = 1.0;
}

WordId NoiseDistribution::sample(Rng& rng) const {
    const double u = rng.uniform01();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<WordId>(it - cumulative_.begin());
}

// ---------------------------------------------------------------------------

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// -ln s(x), computed without overflow for large |x|
double neg_log_sigmoid(double x) { return std::log1p(std::exp(-std::abs(x))) + std::max(-x, 0.0); }

void check_dims(std::span<const double> center, std::span<const double> context,
                std::span<const std::span<const double>> negatives) {
    if (context.size() != center.size()) throw InvalidArgument("dimension mismatch: context vector");
    for (const auto& n : negatives) {
        if (n.size() != center.size()) throw InvalidArgument("dimension mismatch: negative vector");
    }
}

}  // namespace

double sgns_pair_loss(std::span<const double> center, std::span<const double> context,
                      std::span<const std::span<const double>> negatives) {
    check_dims(center, context, negatives);
    double loss = neg_log_sigmoid(dot(center, context));
    for (const auto& n : negatives) loss += neg_log_sigmoid(-dot(center, n));
    return loss;
}

SgnsGradient sgns_pair_gradient(std::span<const double> center, std::span<const double> context,
                                std::span<const std::span<const double>> negatives) {
    check_dims(center, context, negatives);
    const std::size_t dim = center.size();
    SgnsGradient g;
    g.center.assign(dim, 0.0);
    g.context.resize(dim);

    const double pos = sigmoid(dot(center, context)) - 1.0;
    for (std::size_t i = 0; i < dim; ++i) {
        g.center[i] += pos * context[i];
        g.context[i] = pos * center[i];
    }
    g.negatives.reserve(negatives.size());
    for (const auto& n : negatives) {
        const double s = sigmoid(dot(center, n));
        std::vector<double> gn(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            g.center[i] += s * n[i];
            gn[i] = s * center[i];
        }
        g.negatives.push_back(std::move(gn));
    }
    return g;
}

// ---------------------------------------------------------------------------

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> words, std::size_t dim)
    : words_(std::move(words)), dim_(dim), input_(words_.size() * dim, 0.0f),
      output_(words_.size() * dim, 0.0f) {
    if (dim == 0) throw InvalidArgument("embedding dimension must be positive");
    index_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (!index_.emplace(words_[i], i).second) {
            throw InvalidArgument("duplicate embedding word '" + words_[i] + "'");
        }
    }
}

std::optional<std::size_t> EmbeddingMatrix::find(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<double> EmbeddingMatrix::vector_of(std::string_view word) const {
    auto row = find(word);
    if (!row) throw InvalidArgument("word '" + std::string(word) + "' has no embedding");
    auto v = input(*row);
    return {v.begin(), v.end()};
}

// ---------------------------------------------------------------------------

namespace {

template <bool Shared>
float load(const float& x) {
    if constexpr (Shared) {
        return std::atomic_ref<float>(const_cast<float&>(x)).load(std::memory_order_relaxed);
    } else {
        return x;
    }
}

template <bool Shared>
void store(float& x, float v) {
    if constexpr (Shared) {
        std::atomic_ref<float>(x).store(v, std::memory_order_relaxed);
    } else {
        x = v;
    }
}

struct LossAccumulator {
    double sum = 0.0;
    std::uint64_t pairs = 0;
};

/// Per-worker training state. Shared selects relaxed atomic access to the
/// parameter arrays so concurrent workers may race on them (lost updates are
/// tolerated, torn reads are not possible).
template <bool Shared>
class SgnsWorker {
public:
    SgnsWorker(EmbeddingMatrix& m, const NoiseDistribution& noise, const TrainingConfig& config,
               Rng rng, bool track_loss)
        : m_(m), noise_(noise), config_(config), rng_(rng), track_loss_(track_loss),
          center_grad_(m.dim()) {}

    Rng& rng() { return rng_; }

    void train_pair(WordId center, WordId context, float lr, LossAccumulator& acc) {
        const std::size_t dim = m_.dim();
        float* c = m_.input(center).data();
        std::fill(center_grad_.begin(), center_grad_.end(), 0.0f);

        double loss = 0.0;
        auto step = [&](WordId target, float label) {
            float* o = m_.output(target).data();
            double score = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                score += static_cast<double>(load<Shared>(c[i])) * load<Shared>(o[i]);
            }
            if (track_loss_) loss += neg_log_sigmoid(label > 0.5f ? score : -score);
            const auto g = static_cast<float>((label - sigmoid(score)) * lr);
            for (std::size_t i = 0; i < dim; ++i) {
                const float oi = load<Shared>(o[i]);
                center_grad_[i] += g * oi;
                store<Shared>(o[i], oi + g * load<Shared>(c[i]));
            }
        };

        step(context, 1.0f);
        if (noise_.size() > 1) {
            for (int k = 0; k < config_.negatives; ++k) {
                WordId neg = noise_.sample(rng_);
                while (neg == context) neg = noise_.sample(rng_);
                step(neg, 0.0f);
            }
        }
        for (std::size_t i = 0; i < dim; ++i) store<Shared>(c[i], load<Shared>(c[i]) + center_grad_[i]);

        if (track_loss_) {
            acc.sum += loss;
            ++acc.pairs;
        }
    }

private:
    EmbeddingMatrix& m_;
    const NoiseDistribution& noise_;
    const TrainingConfig& config_;
    Rng rng_;
    bool track_loss_;
    std::vector<float> center_grad_;
};

using EncodedText = std::vector<std::int64_t>;  // -1 marks an out-of-vocabulary position

struct Schedule {
    double initial_lr;
    double total_work;

    float lr(std::uint64_t processed) const {
        const double progress = std::min(1.0, static_cast<double>(processed) / total_work);
        return static_cast<float>(initial_lr * (1.0 - 0.99 * progress));
    }
};

/// One pass of one worker over texts[begin, end).
template <bool Shared, typename Progress>
void run_pass(SgnsWorker<Shared>& worker, const std::vector<EncodedText>& texts, std::size_t begin,
              std::size_t end, const TrainingConfig& config, const std::vector<double>& keep_prob,
              const Schedule& schedule, Progress& progress, LossAccumulator& acc) {
    const auto window = static_cast<std::ptrdiff_t>(config.window);
    for (std::size_t t = begin; t < end; ++t) {
        const auto& ids = texts[t];
        const auto n = static_cast<std::ptrdiff_t>(ids.size());
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            if (ids[i] < 0) continue;
            const std::uint64_t done = progress.fetch_add(1);
            if (!keep_prob.empty() && worker.rng().uniform01() >= keep_prob[ids[i]]) continue;
            const float lr = schedule.lr(done);
            const auto lo = std::max<std::ptrdiff_t>(0, i - window);
            const auto hi = std::min<std::ptrdiff_t>(n - 1, i + window);
            for (std::ptrdiff_t j = lo; j <= hi; ++j) {
                if (j == i || ids[j] < 0) continue;
                worker.train_pair(static_cast<WordId>(ids[i]), static_cast<WordId>(ids[j]), lr, acc);
            }
        }
    }
}

struct SequentialCounter {
    std::uint64_t value = 0;
    std::uint64_t fetch_add(std::uint64_t d) {
        const auto old = value;
        value += d;
        return old;
    }
};

}  // namespace

EmbeddingMatrix train_sgns(const Corpus& corpus, const Vocabulary& vocab, const TrainingConfig& config,
                           std::vector<EpochStats>* log) {
    config.validate();
    if (corpus.empty()) throw InvalidArgument("empty corpus");
    if (vocab.empty()) throw InvalidArgument("empty vocabulary");

    std::vector<EncodedText> texts;
    texts.reserve(corpus.size());
    std::uint64_t in_vocab = 0;
    for (const auto& text : corpus.texts()) {
        EncodedText ids;
        ids.reserve(text.tokens.size());
        for (const auto& token : text.tokens) {
            auto id = vocab.find(token);
            ids.push_back(id ? static_cast<std::int64_t>(*id) : -1);
            if (id) ++in_vocab;
        }
        texts.push_back(std::move(ids));
    }
    if (in_vocab == 0) throw InvalidArgument("empty effective corpus: no token is in the vocabulary");

    const auto dim = static_cast<std::size_t>(config.dim);
    EmbeddingMatrix m(vocab.words(), dim);
    {
        Rng init(config.seed);
        const double half = 0.5 / static_cast<double>(dim);
        for (float& x : m.input_data()) x = static_cast<float>(init.uniform(-half, half));
    }
    if (log) log->assign(static_cast<std::size_t>(config.epochs), EpochStats{});
    if (config.epochs == 0) return m;

    std::vector<double> keep_prob;
    if (config.subsample_threshold > 0.0) {
        const double total = static_cast<double>(vocab.total_count());
        keep_prob.resize(vocab.size());
        for (WordId id = 0; id < vocab.size(); ++id) {
            const double ratio = config.subsample_threshold * total / static_cast<double>(vocab.count(id));
            keep_prob[id] = std::min(1.0, std::sqrt(ratio) + ratio);
        }
    }

    const NoiseDistribution noise(vocab);
    const Schedule schedule{config.initial_lr,
                            static_cast<double>(in_vocab) * static_cast<double>(config.epochs)};
    const bool track_loss = log != nullptr;
    const auto epochs = static_cast<std::size_t>(config.epochs);
    const unsigned threads = std::min<unsigned>(config.threads, static_cast<unsigned>(texts.size()));

    auto record = [&](std::size_t epoch, const LossAccumulator& acc) {
        if (!log) return;
        auto& stats = (*log)[epoch];
        stats.mean_loss = (stats.mean_loss * static_cast<double>(stats.pairs) + acc.sum) /
                          static_cast<double>(std::max<std::uint64_t>(1, stats.pairs + acc.pairs));
        stats.pairs += acc.pairs;
    };

    if (threads <= 1) {
        SgnsWorker<false> worker(m, noise, config, Rng::derive(config.seed, 0), track_loss);
        SequentialCounter progress;
        for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
            LossAccumulator acc;
            run_pass(worker, texts, 0, texts.size(), config, keep_prob, schedule, progress, acc);
            record(epoch, acc);
        }
        return m;
    }

    std::atomic<std::uint64_t> progress{0};
    std::vector<std::vector<LossAccumulator>> losses(threads, std::vector<LossAccumulator>(epochs));
    {
        std::vector<std::jthread> workers;
        const std::size_t chunk = (texts.size() + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            const std::size_t begin = std::min(texts.size(), w * chunk);
            const std::size_t end = std::min(texts.size(), begin + chunk);
            workers.emplace_back([&, w, begin, end] {
                SgnsWorker<true> worker(m, noise, config, Rng::derive(config.seed, w), track_loss);
                for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
                    run_pass(worker, texts, begin, end, config, keep_prob, schedule, progress,
                             losses[w][epoch]);
                }
            });
        }
    }
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        for (unsigned w = 0; w < threads; ++w) record(epoch, losses[w][epoch]);
    }
    return m;
}

// ---------------------------------------------------------------------------

namespace {

template <typename T>
double cosine_impl(std::span<const T> a, std::span<const T> b) {
    if (a.size() != b.size()) throw InvalidArgument("dimension mismatch");
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a[i];
        const double y = b[i];
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    if (aa == 0.0 || bb == 0.0) throw UndefinedValue("undefined similarity: zero vector");
    return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

}  // namespace

double cosine_similarity(std::span<const double> a, std::span<const double> b) { return cosine_impl(a, b); }
double cosine_similarity(std::span<const float> a, std::span<const float> b) { return cosine_impl(a, b); }

// ---------------------------------------------------------------------------

void save_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path) {
    if (m.size() == 0) throw InvalidArgument("no vectors");
    auto out = detail::open_output(path);
    out << m.size() << ' ' << m.dim() << '\n';
    char buf[64];
    for (std::size_t row = 0; row < m.size(); ++row) {
        out << m.word(row);
        for (float x : m.input(row)) {
            const int n = std::snprintf(buf, sizeof buf, " %.9g", static_cast<double>(x));
            out.write(buf, n);
        }
        out << '\n';
    }
    detail::finish_output(out, path);
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    const auto source = path.string();
    std::string line;
    if (!detail::read_line(in, line)) throw ParseError(source, 1, "no vectors");

    std::size_t rows = 0;
    std::size_t dim = 0;
    {
        std::istringstream header(line);
        std::string extra;
        if (!(header >> rows >> dim) || (header >> extra)) {
            throw ParseError(source, 1, "expected header \"V dim\"");
        }
    }
    if (rows == 0) throw ParseError(source, 1, "no vectors");
    if (dim == 0) throw ParseError(source, 1, "dimension must be positive");

    std::vector<std::string> words;
    std::vector<float> values;
    words.reserve(rows);
    values.reserve(rows * dim);
    std::size_t line_no = 1;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (words.size() == rows) throw ParseError(source, line_no, "more rows than declared in header");
        const auto space = line.find(' ');
        if (space == std::string::npos || space == 0) throw ParseError(source, line_no, "expected \"word v1 ... v_dim\"");
        words.push_back(line.substr(0, space));

        const char* p = line.data() + space;
        const char* end = line.data() + line.size();
        std::size_t got = 0;
        while (p < end) {
            while (p < end && *p == ' ') ++p;
            if (p == end) break;
            float x = 0.0f;
            auto [next, ec] = std::from_chars(p, end, x);
            if (ec != std::errc{} || (next < end && *next != ' ') || !std::isfinite(x)) {
                throw ParseError(source, line_no, "invalid number");
            }
            values.push_back(x);
            ++got;
            p = next;
        }
        if (got != dim) {
            throw ParseError(source, line_no, "expected " + std::to_string(dim) + " values, found " +
                                                  std::to_string(got));
        }
    }
    if (words.size() != rows) {
        throw ParseError(source, line_no, "header declares " + std::to_string(rows) + " rows, found " +
                                              std::to_string(words.size()));
    }
    EmbeddingMatrix m;
    try {
        m = EmbeddingMatrix(std::move(words), dim);
    } catch (const InvalidArgument& e) {
        throw ParseError(source, line_no, e.what());
    }
    std::copy(values.begin(), values.end(), m.input_data().begin());
    return m;
}

}  // namespace lexnet

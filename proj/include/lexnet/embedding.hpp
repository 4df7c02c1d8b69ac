#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexnet/corpus.hpp"
#include "lexnet/rng.hpp"

namespace lexnet {

/// Skip-gram with negative sampling hyper-parameters.
struct TrainingConfig {
    int window = 10;           ///< context tokens on each side
    int dim = 500;
    int negatives = 5;
    int epochs = 5;
    double initial_lr = 0.025; ///< decays linearly to initial_lr / 100
    std::uint64_t seed = 1;
    /// Frequent-word subsampling threshold (word2vec's `sample`); 0 disables it.
    double subsample_threshold = 0.0;
    /// 1 = deterministic sequential training; >1 = lock-free concurrent updates.
    unsigned threads = 1;

    /// Throws InvalidArgument naming the first out-of-domain field.
    void validate() const;
};

/// Unigram noise distribution with weights proportional to count^power.
class NoiseDistribution {
public:
    explicit NoiseDistribution(const Vocabulary& vocab, double power = 0.75);

    std::size_t size() const noexcept { return weights_.size(); }
    double weight(WordId id) const { return weights_.at(id); }
    const std::vector<double>& weights() const noexcept { return weights_; }

    WordId sample(Rng& rng) const;

private:
    std::vector<double> weights_;
    std::vector<double> cumulative_;
};

/// -ln s(c.x) - sum_n ln s(-c.n), with s the logistic function.
double sgns_pair_loss(std::span<const double> center, std::span<const double> context,
                      std::span<const std::span<const double>> negatives);

struct SgnsGradient {
    std::vector<double> center;
    std::vector<double> context;
    std::vector<std::vector<double>> negatives;
};

/// Analytic partial derivatives of sgns_pair_loss with respect to every input vector.
SgnsGradient sgns_pair_gradient(std::span<const double> center, std::span<const double> context,
                                std::span<const std::span<const double>> negatives);

/// Input (published) and output (context) vectors, one row per word.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;
    EmbeddingMatrix(std::vector<std::string> words, std::size_t dim);

    std::size_t size() const noexcept { return words_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    const std::vector<std::string>& words() const noexcept { return words_; }
    const std::string& word(std::size_t row) const { return words_.at(row); }
    std::optional<std::size_t> find(std::string_view word) const;

    std::span<const float> input(std::size_t row) const { return {input_.data() + row * dim_, dim_}; }
    std::span<float> input(std::size_t row) { return {input_.data() + row * dim_, dim_}; }
    std::span<const float> output(std::size_t row) const { return {output_.data() + row * dim_, dim_}; }
    std::span<float> output(std::size_t row) { return {output_.data() + row * dim_, dim_}; }

    std::span<const float> input_data() const noexcept { return input_; }
    std::span<float> input_data() noexcept { return input_; }
    std::span<const float> output_data() const noexcept { return output_; }
    std::span<float> output_data() noexcept { return output_; }

    /// Input vector of `word` widened to double; throws if the word is absent.
    std::vector<double> vector_of(std::string_view word) const;

    bool operator==(const EmbeddingMatrix& other) const {
        return dim_ == other.dim_ && words_ == other.words_ && input_ == other.input_ &&
               output_ == other.output_;
    }

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t dim_ = 0;
    std::vector<float> input_;
    std::vector<float> output_;
};

struct EpochStats {
    double mean_loss = 0.0;   ///< average sgns_pair_loss over the epoch's pairs
    std::uint64_t pairs = 0;
};

/// Trains SGNS vectors for every vocabulary word.
///
/// Windows span the original token sequence of each text; out-of-vocabulary
/// tokens are skipped but still occupy positions. Input vectors start uniform
/// in (-0.5/dim, 0.5/dim), output vectors at zero. With threads == 1 the result
/// is a pure function of (corpus, vocab, config).
EmbeddingMatrix train_sgns(const Corpus& corpus, const Vocabulary& vocab,
                           const TrainingConfig& config, std::vector<EpochStats>* log = nullptr);

double cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_similarity(std::span<const float> a, std::span<const float> b);

/// Text format: "V dim" header, then "word v1 ... v_dim" with 9 significant digits.
/// Only input vectors are stored; loaded output vectors are zero.
void save_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path);
EmbeddingMatrix load_embeddings(const std::filesystem::path& path);

}  // namespace lexnet

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lexnet {

/// Inclusive range of Unicode code points.
struct CodepointRange {
    char32_t first;
    char32_t last;
};

/// Character rules applied to raw text before it becomes tokens.
///
/// Digits map to '0', Latin letters are lower-cased, characters inside one of
/// the ideograph ranges pass through, and everything else is removed.
/// Fullwidth digits and letters (U+FF10..U+FF5A) are folded to their ASCII
/// forms before the rules apply.
struct NormalizationConfig {
    std::vector<CodepointRange> ideograph_ranges{{0x4E00, 0x9FFF}};

    /// When set, whitespace runs collapse to one ASCII space and the result is
    /// trimmed. Token normalization always clears it.
    bool keep_whitespace = true;

    /// Base block plus extension A, compatibility ideographs and extensions B-F.
    static NormalizationConfig with_extension_blocks();
};

std::string normalize_text(std::string_view raw, const NormalizationConfig& rules = {});

/// normalize_text with whitespace treated as a removable character.
std::string normalize_token(std::string_view raw, const NormalizationConfig& rules = {});

/// One co-occurrence unit (a post, a comment, a sentence).
struct TokenizedText {
    std::string source_id;
    std::vector<std::string> tokens;
};

class Corpus {
public:
    Corpus() = default;
    Corpus(std::string label, std::vector<TokenizedText> texts, std::size_t dropped_texts = 0);

    const std::string& label() const noexcept { return label_; }
    const std::vector<TokenizedText>& texts() const noexcept { return texts_; }
    std::size_t size() const noexcept { return texts_.size(); }
    bool empty() const noexcept { return texts_.empty(); }

    /// Records that were discarded because every token normalized to empty.
    std::size_t dropped_texts() const noexcept { return dropped_texts_; }
    std::size_t token_count() const noexcept;

private:
    std::string label_;
    std::vector<TokenizedText> texts_;
    std::size_t dropped_texts_ = 0;
};

enum class CorpusFormat { PretokenizedLines, TokenJsonLines };

CorpusFormat parse_corpus_format(std::string_view name);
std::string_view to_string(CorpusFormat format);

using Tokenizer = std::function<std::vector<std::string>(std::string_view)>;

/// Splits on ASCII whitespace; the only tokenizer bundled with the library.
std::vector<std::string> whitespace_tokenize(std::string_view line);

struct IngestOptions {
    NormalizationConfig normalization{};
    /// Used for pretokenized-lines only; token-json-lines carries its own tokens.
    Tokenizer tokenizer = whitespace_tokenize;
    std::string label;
};

Corpus ingest_corpus(const std::filesystem::path& path, CorpusFormat format,
                     const IngestOptions& options = {});
Corpus ingest_corpus(std::istream& in, CorpusFormat format, const IngestOptions& options,
                     const std::string& source_name);

/// Concatenates corpora in order; the label of the first is kept unless given.
Corpus concat(std::vector<Corpus> parts, std::string label = {});

/// Writes token-json-lines, one {"id", "tokens"} object per text.
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

using WordId = std::uint32_t;

/// Word <-> dense id map with token-level occurrence counts.
///
/// Ids follow descending count, ties broken by byte-wise word order.
class Vocabulary {
public:
    Vocabulary() = default;

    /// Builds from (word, count) entries, dropping words with count <= min_count.
    /// Entry order is preserved; duplicate words are rejected.
    static Vocabulary from_entries(std::vector<std::pair<std::string, std::uint64_t>> entries,
                                   std::uint64_t min_count);

    std::size_t size() const noexcept { return words_.size(); }
    bool empty() const noexcept { return words_.empty(); }
    const std::string& word(WordId id) const { return words_.at(id); }
    std::uint64_t count(WordId id) const { return counts_.at(id); }
    std::optional<WordId> find(std::string_view word) const;
    bool contains(std::string_view word) const { return find(word).has_value(); }
    std::uint64_t min_count() const noexcept { return min_count_; }
    std::uint64_t total_count() const noexcept;

    const std::vector<std::string>& words() const noexcept { return words_; }
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

private:
    std::vector<std::string> words_;
    std::vector<std::uint64_t> counts_;
    std::unordered_map<std::string, WordId> index_;
    std::uint64_t min_count_ = 0;
};

/// Words with total token count strictly greater than min_count.
Vocabulary build_vocabulary(const Corpus& corpus, std::uint64_t min_count = 3,
                            unsigned threads = 1);

/// Uniform subset of round(fraction * V) words drawn without replacement.
/// Surviving words keep their relative order and are re-numbered 0..V'-1.
Vocabulary sample_vocabulary(const Vocabulary& vocab, double fraction, std::uint64_t seed);

/// TSV with header "word\tid\tcount".
void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path);
Vocabulary load_vocabulary(const std::filesystem::path& path, std::uint64_t min_count = 0);

}  // namespace lexnet

#include "lexnet/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <thread>

#include "json.hpp"

#include "io_util.hpp"
#include "lexnet/error.hpp"
#include "lexnet/rng.hpp"

namespace lexnet {

namespace {

// Decodes one UTF-8 sequence starting at s[i]. Returns the code point and
// advances i; invalid or truncated sequences yield U+FFFD and consume one byte.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + len > s.size()) {
        ++i;
        return 0xFFFD;
    }
    for (int k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    // reject overlong forms and surrogates
    static constexpr char32_t min_for_len[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++i;
        return 0xFFFD;
    }
    i += len;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_whitespace(char32_t cp) {
    switch (cp) {
        case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
        case 0x00A0: case 0x3000:
            return true;
        default:
            return false;
    }
}

bool in_ranges(char32_t cp, const std::vector<CodepointRange>& ranges) {
    return std::any_of(ranges.begin(), ranges.end(),
                       [cp](const CodepointRange& r) { return cp >= r.first && cp <= r.last; });
}

std::string normalize_impl(std::string_view raw, const NormalizationConfig& rules,
                           bool keep_whitespace) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    std::size_t i = 0;
    while (i < raw.size()) {
        char32_t cp = decode_utf8(raw, i);
        if (cp >= 0xFF10 && cp <= 0xFF5A) cp -= 0xFEE0;  // fullwidth -> ASCII

        if (is_whitespace(cp)) {
            if (keep_whitespace && !out.empty()) pending_space = true;
            continue;
        }
        char32_t mapped = 0;
        if (cp >= U'0' && cp <= U'9') {
            mapped = U'0';
        } else if (cp >= U'A' && cp <= U'Z') {
            mapped = cp + (U'a' - U'A');
        } else if ((cp >= U'a' && cp <= U'z') || in_ranges(cp, rules.ideograph_ranges)) {
            mapped = cp;
        } else {
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        append_utf8(out, mapped);
    }
    return out;
}

}  // namespace

NormalizationConfig NormalizationConfig::with_extension_blocks() {
    NormalizationConfig config;
    config.ideograph_ranges = {
        {0x4E00, 0x9FFF},   // base block
        {0x3400, 0x4DBF},   // extension A
        {0xF900, 0xFAFF},   // compatibility ideographs
        {0x20000, 0x2EBEF}, // extensions B-F
    };
    return config;
}

std::string normalize_text(std::string_view raw, const NormalizationConfig& rules) {
    return normalize_impl(raw, rules, rules.keep_whitespace);
}

std::string normalize_token(std::string_view raw, const NormalizationConfig& rules) {
    return normalize_impl(raw, rules, false);
}

// ---------------------------------------------------------------------------

Corpus::Corpus(std::string label, std::vector<TokenizedText> texts, std::size_t dropped_texts)
    : label_(std::move(label)), texts_(std::move(texts)), dropped_texts_(dropped_texts) {
    for (const auto& text : texts_) {
        for (const auto& token : text.tokens) {
            if (token.empty()) throw InvalidArgument("corpus text " + text.source_id + " has an empty token");
        }
    }
}

std::size_t Corpus::token_count() const noexcept {
    std::size_t n = 0;
    for (const auto& text : texts_) n += text.tokens.size();
    return n;
}

CorpusFormat parse_corpus_format(std::string_view name) {
    if (name == "pretokenized-lines") return CorpusFormat::PretokenizedLines;
    if (name == "token-json-lines") return CorpusFormat::TokenJsonLines;
    throw InvalidArgument("unknown corpus format '" + std::string(name) +
                          "' (expected pretokenized-lines or token-json-lines)");
}

std::string_view to_string(CorpusFormat format) {
    return format == CorpusFormat::PretokenizedLines ? "pretokenized-lines" : "token-json-lines";
}

std::vector<std::string> whitespace_tokenize(std::string_view line) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) tokens.emplace_back(line.substr(start, i - start));
    }
    return tokens;
}

Corpus ingest_corpus(std::istream& in, CorpusFormat format, const IngestOptions& options,
                     const std::string& source_name) {
    std::vector<TokenizedText> texts;
    std::size_t dropped = 0;
    std::size_t records = 0;
    std::string line;
    std::size_t line_no = 0;

    while (detail::read_line(in, line)) {
        ++line_no;
        TokenizedText text;
        std::vector<std::string> raw_tokens;

        if (format == CorpusFormat::PretokenizedLines) {
            text.source_id = std::to_string(line_no);
            raw_tokens = options.tokenizer(line);
        } else {
            if (line.find_first_not_of(" \t") == std::string::npos) continue;
            nlohmann::json record;
            try {
                record = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                throw ParseError(source_name, line_no, std::string("invalid JSON: ") + e.what());
            }
            if (!record.is_object()) throw ParseError(source_name, line_no, "record is not a JSON object");
            if (auto it = record.find("id"); it != record.end()) {
                if (!it->is_string()) throw ParseError(source_name, line_no, "\"id\" must be a string");
                text.source_id = it->get<std::string>();
            } else {
                text.source_id = std::to_string(line_no);
            }
            auto tokens_it = record.find("tokens");
            if (tokens_it == record.end() || !tokens_it->is_array()) {
                throw ParseError(source_name, line_no, "\"tokens\" must be an array of strings");
            }
            for (const auto& token : *tokens_it) {
                if (!token.is_string()) throw ParseError(source_name, line_no, "non-string token");
                raw_tokens.push_back(token.get<std::string>());
            }
        }
        ++records;

        for (const auto& raw : raw_tokens) {
            auto token = normalize_token(raw, options.normalization);
            if (!token.empty()) text.tokens.push_back(std::move(token));
        }
        if (text.tokens.empty()) {
            ++dropped;
            continue;
        }
        texts.push_back(std::move(text));
    }
    if (in.bad()) throw IoError("read failed: " + source_name);
    if (records == 0 || texts.empty()) throw InvalidArgument("empty corpus: " + source_name);
    return Corpus(options.label, std::move(texts), dropped);
}

Corpus ingest_corpus(const std::filesystem::path& path, CorpusFormat format,
                     const IngestOptions& options) {
    auto in = detail::open_input(path);
    return ingest_corpus(in, format, options, path.string());
}

Corpus concat(std::vector<Corpus> parts, std::string label) {
    if (parts.empty()) throw InvalidArgument("empty corpus");
    if (label.empty()) label = parts.front().label();
    std::vector<TokenizedText> texts;
    std::size_t dropped = 0;
    for (auto& part : parts) {
        dropped += part.dropped_texts();
        const auto& part_texts = part.texts();
        texts.insert(texts.end(), part_texts.begin(), part_texts.end());
    }
    return Corpus(std::move(label), std::move(texts), dropped);
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    auto out = detail::open_output(path);
    for (const auto& text : corpus.texts()) {
        nlohmann::json record{{"id", text.source_id}, {"tokens", text.tokens}};
        out << record.dump() << '\n';
    }
    detail::finish_output(out, path);
}

// ---------------------------------------------------------------------------

Vocabulary Vocabulary::from_entries(std::vector<std::pair<std::string, std::uint64_t>> entries,
                                    std::uint64_t min_count) {
    Vocabulary vocab;
    vocab.min_count_ = min_count;
    for (auto& [word, count] : entries) {
        if (count <= min_count) continue;
        if (word.empty()) throw InvalidArgument("vocabulary word must be non-empty");
        const auto id = static_cast<WordId>(vocab.words_.size());
        if (!vocab.index_.emplace(word, id).second) {
            throw InvalidArgument("duplicate vocabulary word '" + word + "'");
        }
        vocab.words_.push_back(std::move(word));
        vocab.counts_.push_back(count);
    }
    return vocab;
}

std::optional<WordId> Vocabulary::find(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::uint64_t Vocabulary::total_count() const noexcept {
    return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

namespace {

using CountMap = std::unordered_map<std::string, std::uint64_t>;

void tally(const std::vector<TokenizedText>& texts, std::size_t begin, std::size_t end, CountMap& counts) {
    for (std::size_t t = begin; t < end; ++t) {
        for (const auto& token : texts[t].tokens) ++counts[token];
    }
}

}  // namespace

Vocabulary build_vocabulary(const Corpus& corpus, std::uint64_t min_count, unsigned threads) {
    if (corpus.empty()) throw InvalidArgument("empty corpus");
    const auto& texts = corpus.texts();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(texts.size())));

    CountMap counts;
    if (threads == 1) {
        tally(texts, 0, texts.size(), counts);
    } else {
        std::vector<CountMap> partial(threads);
        std::vector<std::jthread> workers;
        const std::size_t chunk = (texts.size() + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            const std::size_t begin = std::min(texts.size(), w * chunk);
            const std::size_t end = std::min(texts.size(), begin + chunk);
            workers.emplace_back([&, w, begin, end] { tally(texts, begin, end, partial[w]); });
        }
        workers.clear();
        for (auto& part : partial) {
            for (auto& [word, n] : part) counts[word] += n;
        }
    }

    std::vector<std::pair<std::string, std::uint64_t>> entries(counts.begin(), counts.end());
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    auto vocab = Vocabulary::from_entries(std::move(entries), min_count);
    if (vocab.empty()) throw InvalidArgument("empty vocabulary: no word occurs more than " +
                                             std::to_string(min_count) + " times");
    return vocab;
}

Vocabulary sample_vocabulary(const Vocabulary& vocab, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw InvalidArgument("sample fraction must lie in (0, 1]");
    }
    const std::size_t n = vocab.size();
    const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    if (fraction * static_cast<double>(n) < 1.0 || k == 0) {
        throw InvalidArgument("sample fraction selects no words");
    }

    std::vector<WordId> ids(n);
    std::iota(ids.begin(), ids.end(), WordId{0});
    Rng rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + rng.uniform_index(n - i);
        std::swap(ids[i], ids[j]);
    }
    ids.resize(k);
    std::sort(ids.begin(), ids.end());

    std::vector<std::pair<std::string, std::uint64_t>> entries;
    entries.reserve(k);
    for (WordId id : ids) entries.emplace_back(vocab.word(id), vocab.count(id));
    return Vocabulary::from_entries(std::move(entries), vocab.min_count());
}

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
    auto out = detail::open_output(path);
    out << "word\tid\tcount\n";
    for (WordId id = 0; id < vocab.size(); ++id) {
        out << vocab.word(id) << '\t' << id << '\t' << vocab.count(id) << '\n';
    }
    detail::finish_output(out, path);
}

Vocabulary load_vocabulary(const std::filesystem::path& path, std::uint64_t min_count) {
    auto in = detail::open_input(path);
    const auto source = path.string();
    std::string line;
    if (!detail::read_line(in, line) || line != "word\tid\tcount") {
        throw ParseError(source, 1, "expected header \"word\\tid\\tcount\"");
    }
    std::vector<std::pair<std::string, std::uint64_t>> entries;
    std::size_t line_no = 1;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
            throw ParseError(source, line_no, "expected three tab-separated fields");
        }
        std::uint64_t id = 0;
        std::uint64_t count = 0;
        try {
            std::size_t used = 0;
            const auto id_text = line.substr(t1 + 1, t2 - t1 - 1);
            id = std::stoull(id_text, &used);
            if (used != id_text.size()) throw std::invalid_argument("id");
            const auto count_text = line.substr(t2 + 1);
            count = std::stoull(count_text, &used);
            if (used != count_text.size()) throw std::invalid_argument("count");
        } catch (const std::exception&) {
            throw ParseError(source, line_no, "id and count must be non-negative integers");
        }
        if (id != entries.size()) {
            throw ParseError(source, line_no, "ids must be contiguous starting at 0");
        }
        if (count <= min_count) {
            throw ParseError(source, line_no, "count does not exceed min_count");
        }
        entries.emplace_back(line.substr(0, t1), count);
    }
    try {
        return Vocabulary::from_entries(std::move(entries), min_count);
    } catch (const InvalidArgument& e) {
        throw ParseError(source, line_no, e.what());
    }
}

}  // namespace lexnet

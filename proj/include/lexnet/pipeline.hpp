#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexnet/corpus.hpp"
#include "lexnet/embedding.hpp"
#include "lexnet/error.hpp"
#include "lexnet/netstats.hpp"

namespace lexnet {

/// Configuration failed validation; what() lists every violated field.
class ConfigError : public InvalidArgument {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// A stage's input artifact is absent.
class MissingArtifact : public Error {
public:
    using Error::Error;
};

enum class Subcommand { Ingest, Vocab, Train, BuildWcn, BuildWsn, Stats, Report, Pipeline };

Subcommand parse_subcommand(std::string_view name);
std::string_view to_string(Subcommand s);

/// Every knob of the end-to-end run. Loaded from a flat `key = value` file;
/// see README for the key list.
struct PipelineConfig {
    std::string name = "corpus";
    std::vector<std::string> corpus_paths;  ///< as written; relative to base_dir
    CorpusFormat corpus_format = CorpusFormat::PretokenizedLines;
    bool extended_ideographs = false;

    std::uint64_t min_count = 3;
    double wcn_sample_fraction = 0.1;
    double wsn_sample_fraction = 0.1;
    std::uint64_t seed = 1;

    TrainingConfig training{};

    double threshold_percentile = 99.0;
    std::size_t threshold_sample_size = 10'000'000;
    bool threshold_exhaustive = false;

    std::size_t cooccurrence_window = 0;
    std::size_t max_unique_tokens = 0;

    StructureConfig stats{};

    std::filesystem::path output_dir = "lexnet-out";
    std::filesystem::path base_dir = ".";  ///< directory the config file lives in
    unsigned threads = 1;

    /// Sets one key from its textual value. Unknown keys and unparsable values throw ConfigError.
    void set(std::string_view key, std::string_view value);

    /// Every violated constraint, empty when valid. Corpus files are only
    /// checked when the subcommand reads them.
    std::vector<std::string> violations(Subcommand for_stage) const;
    void validate(Subcommand for_stage) const;

    /// Sorted `key=value` lines covering every setting that affects artifact content.
    std::string canonical() const;
    /// FNV-1a 64 of canonical(), as 16 hex digits.
    std::string hash() const;

    std::vector<std::filesystem::path> resolved_corpus_paths() const;
};

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".");
PipelineConfig load_config(const std::filesystem::path& path);

struct RunOptions {
    /// stats: graph files to analyse; default is wcn.graph and wsn.graph in the output directory.
    std::vector<std::filesystem::path> graphs;
    /// report: report files to tabulate; default is every *.report.json in the output directory.
    std::vector<std::filesystem::path> reports;
    /// Progress lines; nullptr silences them.
    std::ostream* log = nullptr;
};

/// Runs one stage, reading upstream artifacts from and writing results to
/// config.output_dir. Returns the paths written.
std::vector<std::filesystem::path> run_subcommand(Subcommand stage, const PipelineConfig& config,
                                                  const RunOptions& options = {});

struct SummaryTable {
    std::string text;
    std::string csv;
};

/// One row per network: the three classifications followed by the raw numbers.
SummaryTable emit_summary_table(std::span<const StructureReport> reports);

/// Report JSON: every numeric field at full precision, classification strings,
/// and "undefined" for fields that could not be computed.
std::string report_to_json(const StructureReport& report, const StructureConfig& config,
                           const std::string& config_hash = {}, std::uint64_t seed = 0);
StructureReport report_from_json(std::string_view json);

}  // namespace lexnet

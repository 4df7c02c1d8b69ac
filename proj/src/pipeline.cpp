#include "lexnet/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "io_util.hpp"
#include "json.hpp"
#include "lexnet/graph.hpp"

namespace lexnet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join_lines(const std::vector<std::string>& items) {
    std::string out = "invalid configuration:";
    for (const auto& item : items) out += "\n  - " + item;
    return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : InvalidArgument(join_lines(violations)), violations_(std::move(violations)) {}

Subcommand parse_subcommand(std::string_view name) {
    static const std::map<std::string_view, Subcommand> table = {
        {"ingest", Subcommand::Ingest},      {"vocab", Subcommand::Vocab},
        {"train", Subcommand::Train},        {"build-wcn", Subcommand::BuildWcn},
        {"build-wsn", Subcommand::BuildWsn}, {"stats", Subcommand::Stats},
        {"report", Subcommand::Report},      {"pipeline", Subcommand::Pipeline},
    };
    auto it = table.find(name);
    if (it == table.end()) throw InvalidArgument("unknown subcommand '" + std::string(name) + "'");
    return it->second;
}

std::string_view to_string(Subcommand s) {
    switch (s) {
        case Subcommand::Ingest: return "ingest";
        case Subcommand::Vocab: return "vocab";
        case Subcommand::Train: return "train";
        case Subcommand::BuildWcn: return "build-wcn";
        case Subcommand::BuildWsn: return "build-wsn";
        case Subcommand::Stats: return "stats";
        case Subcommand::Report: return "report";
        case Subcommand::Pipeline: return "pipeline";
    }
    return "pipeline";
}

// ---------------------------------------------------------------------------
// configuration

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_integer(std::string_view key, std::string_view value) {
    T out{};
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || p != value.data() + value.size()) {
        throw ConfigError({std::string(key) + ": expected an integer, got '" + std::string(value) + "'"});
    }
    return out;
}

double parse_real(std::string_view key, std::string_view value) {
    double out = 0.0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || p != value.data() + value.size()) {
        throw ConfigError({std::string(key) + ": expected a number, got '" + std::string(value) + "'"});
    }
    return out;
}

bool parse_flag(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError({std::string(key) + ": expected true or false, got '" + std::string(value) + "'"});
}

std::vector<std::string> split_list(std::string_view value) {
    std::vector<std::string> items;
    while (!value.empty()) {
        const auto comma = value.find(',');
        const auto item = trim(value.substr(0, comma));
        if (!item.empty()) items.emplace_back(item);
        if (comma == std::string_view::npos) break;
        value.remove_prefix(comma + 1);
    }
    return items;
}

std::string real_text(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view raw) {
    const auto value = trim(raw);
    if (key == "name") name = value;
    else if (key == "corpus") corpus_paths = split_list(value);
    else if (key == "corpus_format") {
        try {
            corpus_format = parse_corpus_format(value);
        } catch (const InvalidArgument& e) {
            throw ConfigError({std::string("corpus_format: ") + e.what()});
        }
    }
    else if (key == "extended_ideographs") extended_ideographs = parse_flag(key, value);
    else if (key == "min_count") min_count = parse_integer<std::uint64_t>(key, value);
    else if (key == "sample_fraction") wcn_sample_fraction = wsn_sample_fraction = parse_real(key, value);
    else if (key == "wcn_sample_fraction") wcn_sample_fraction = parse_real(key, value);
    else if (key == "wsn_sample_fraction") wsn_sample_fraction = parse_real(key, value);
    else if (key == "seed") seed = parse_integer<std::uint64_t>(key, value);
    else if (key == "window") training.window = parse_integer<int>(key, value);
    else if (key == "dim") training.dim = parse_integer<int>(key, value);
    else if (key == "negatives") training.negatives = parse_integer<int>(key, value);
    else if (key == "epochs") training.epochs = parse_integer<int>(key, value);
    else if (key == "initial_lr") training.initial_lr = parse_real(key, value);
    else if (key == "subsample") training.subsample_threshold = parse_real(key, value);
    else if (key == "threshold_percentile") threshold_percentile = parse_real(key, value);
    else if (key == "threshold_sample_size") threshold_sample_size = parse_integer<std::size_t>(key, value);
    else if (key == "threshold_exhaustive") threshold_exhaustive = parse_flag(key, value);
    else if (key == "cooccurrence_window") cooccurrence_window = parse_integer<std::size_t>(key, value);
    else if (key == "max_unique_tokens") max_unique_tokens = parse_integer<std::size_t>(key, value);
    else if (key == "ratio_threshold") stats.ratio_threshold = parse_real(key, value);
    else if (key == "neutral_band") stats.neutral_band = parse_real(key, value);
    else if (key == "log_binning") stats.log_binning = parse_flag(key, value);
    else if (key == "bins_per_decade") stats.bins_per_decade = parse_real(key, value);
    else if (key == "output_dir") output_dir = fs::path(std::string(value));
    else if (key == "threads") threads = parse_integer<unsigned>(key, value);
    else throw ConfigError({"unknown key '" + std::string(key) + "'"});
}

std::vector<std::string> PipelineConfig::violations(Subcommand stage) const {
    std::vector<std::string> v;
    auto need = [&](bool ok, const std::string& message) {
        if (!ok) v.push_back(message);
    };
    need(!name.empty() && name.find('/') == std::string::npos, "name: must be non-empty without '/'");
    const bool reads_corpus = stage == Subcommand::Ingest || stage == Subcommand::Pipeline;
    if (reads_corpus) {
        need(!corpus_paths.empty(), "corpus: at least one corpus file is required");
        for (const auto& p : resolved_corpus_paths()) {
            need(fs::is_regular_file(p), "corpus: file not found: " + p.string());
        }
    }
    need(wcn_sample_fraction > 0.0 && wcn_sample_fraction <= 1.0, "wcn_sample_fraction: must lie in (0, 1]");
    need(wsn_sample_fraction > 0.0 && wsn_sample_fraction <= 1.0, "wsn_sample_fraction: must lie in (0, 1]");
    need(training.window >= 1, "window: must be >= 1");
    need(training.dim >= 1, "dim: must be >= 1");
    need(training.negatives >= 1, "negatives: must be >= 1");
    need(training.epochs >= 0, "epochs: must be >= 0");
    need(training.initial_lr > 0.0, "initial_lr: must be positive");
    need(training.subsample_threshold >= 0.0, "subsample: must be >= 0");
    need(threshold_percentile > 0.0 && threshold_percentile < 100.0, "threshold_percentile: must lie in (0, 100)");
    need(threshold_exhaustive || threshold_sample_size >= 1000, "threshold_sample_size: must be >= 1000");
    need(stats.ratio_threshold > 1.0, "ratio_threshold: must exceed 1");
    need(stats.neutral_band > 0.0, "neutral_band: must be positive");
    need(stats.bins_per_decade > 0.0, "bins_per_decade: must be positive");
    need(threads >= 1, "threads: must be >= 1");
    need(!output_dir.empty(), "output_dir: must be set");
    return v;
}

void PipelineConfig::validate(Subcommand stage) const {
    auto v = violations(stage);
    if (!v.empty()) throw ConfigError(std::move(v));
}

std::string PipelineConfig::canonical() const {
    std::map<std::string, std::string> kv;
    kv["name"] = name;
    std::string paths;
    for (const auto& p : corpus_paths) paths += (paths.empty() ? "" : ",") + p;
    kv["corpus"] = paths;
    kv["corpus_format"] = std::string(to_string(corpus_format));
    kv["extended_ideographs"] = extended_ideographs ? "true" : "false";
    kv["min_count"] = std::to_string(min_count);
    kv["wcn_sample_fraction"] = real_text(wcn_sample_fraction);
    kv["wsn_sample_fraction"] = real_text(wsn_sample_fraction);
    kv["seed"] = std::to_string(seed);
    kv["window"] = std::to_string(training.window);
    kv["dim"] = std::to_string(training.dim);
    kv["negatives"] = std::to_string(training.negatives);
    kv["epochs"] = std::to_string(training.epochs);
    kv["initial_lr"] = real_text(training.initial_lr);
    kv["subsample"] = real_text(training.subsample_threshold);
    kv["threshold_percentile"] = real_text(threshold_percentile);
    kv["threshold_sample_size"] = std::to_string(threshold_sample_size);
    kv["threshold_exhaustive"] = threshold_exhaustive ? "true" : "false";
    kv["cooccurrence_window"] = std::to_string(cooccurrence_window);
    kv["max_unique_tokens"] = std::to_string(max_unique_tokens);
    kv["ratio_threshold"] = real_text(stats.ratio_threshold);
    kv["neutral_band"] = real_text(stats.neutral_band);
    kv["log_binning"] = stats.log_binning ? "true" : "false";
    kv["bins_per_decade"] = real_text(stats.bins_per_decade);
    kv["threads"] = std::to_string(threads);
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

std::string PipelineConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<fs::path> PipelineConfig::resolved_corpus_paths() const {
    std::vector<fs::path> out;
    for (const auto& p : corpus_paths) {
        fs::path path(p);
        out.push_back(path.is_absolute() ? path : base_dir / path);
    }
    return out;
}

PipelineConfig parse_config(std::string_view text, const fs::path& base_dir) {
    PipelineConfig config;
    config.base_dir = base_dir;
    std::vector<std::string> errors;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            errors.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
            continue;
        }
        try {
            config.set(trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            for (const auto& v : e.violations()) errors.push_back("line " + std::to_string(line_no) + ": " + v);
        }
    }
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return config;
}

PipelineConfig load_config(const fs::path& path) {
    auto in = detail::open_input(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

// ---------------------------------------------------------------------------
// stages

namespace {

struct Workspace {
    const PipelineConfig& config;
    const RunOptions& options;
    std::vector<fs::path> written;

    fs::path path(const std::string& file) const { return config.output_dir / file; }
    fs::path corpus() const { return path("corpus.jsonl"); }
    fs::path vocab() const { return path("vocab.tsv"); }
    fs::path embeddings() const { return path("embeddings.txt"); }
    fs::path wcn() const { return path("wcn.graph"); }
    fs::path wsn() const { return path("wsn.graph"); }

    void log(const std::string& stage, const std::string& message) const {
        if (options.log) *options.log << "[" << stage << "] " << message << '\n';
    }

    void require(const fs::path& artifact, const std::string& what, std::string_view producer) const {
        if (!fs::is_regular_file(artifact)) {
            throw MissingArtifact(what + " not found; run " + std::string(producer));
        }
    }

    /// Sidecar provenance for artifacts whose format has no room for it.
    void write_meta(const fs::path& artifact, std::string_view stage, json extra = json::object()) {
        extra["artifact"] = artifact.filename().string();
        extra["stage"] = stage;
        extra["config_hash"] = config.hash();
        extra["seed"] = config.seed;
        const auto meta = fs::path(artifact.string() + ".meta.json");
        write_text(meta, extra.dump(2) + "\n");
    }

    void write_text(const fs::path& file, const std::string& text) {
        auto out = detail::open_output(file);
        out << text;
        detail::finish_output(out, file);
        written.push_back(file);
    }

    void wrote(const fs::path& file) { written.push_back(file); }

    Corpus load_corpus() const {
        require(corpus(), "corpus", "ingest");
        IngestOptions opts;
        opts.label = config.name;
        if (config.extended_ideographs) opts.normalization = NormalizationConfig::with_extension_blocks();
        return ingest_corpus(corpus(), CorpusFormat::TokenJsonLines, opts);
    }

    Vocabulary load_vocab() const {
        require(vocab(), "vocabulary", "vocab");
        return load_vocabulary(vocab(), config.min_count);
    }

    Vocabulary subset(const Vocabulary& vocab, double fraction) const {
        if (fraction >= 1.0) return vocab;
        return sample_vocabulary(vocab, fraction, config.seed);
    }
};

void stage_ingest(Workspace& ws) {
    const auto& config = ws.config;
    IngestOptions opts;
    opts.label = config.name;
    if (config.extended_ideographs) opts.normalization = NormalizationConfig::with_extension_blocks();
    std::vector<Corpus> parts;
    for (const auto& path : config.resolved_corpus_paths()) {
        parts.push_back(ingest_corpus(path, config.corpus_format, opts));
    }
    const auto corpus = concat(std::move(parts), config.name);
    save_corpus(corpus, ws.corpus());
    ws.wrote(ws.corpus());
    ws.write_meta(ws.corpus(), "ingest",
                  {{"texts", corpus.size()}, {"tokens", corpus.token_count()},
                   {"dropped_texts", corpus.dropped_texts()}});
    ws.log("ingest", std::to_string(corpus.size()) + " texts (" + std::to_string(corpus.dropped_texts()) +
                         " dropped) -> " + ws.corpus().string());
}

void stage_vocab(Workspace& ws) {
    const auto corpus = ws.load_corpus();
    const auto vocab = build_vocabulary(corpus, ws.config.min_count, ws.config.threads);
    save_vocabulary(vocab, ws.vocab());
    ws.wrote(ws.vocab());
    ws.write_meta(ws.vocab(), "vocab", {{"words", vocab.size()}, {"min_count", ws.config.min_count}});
    ws.log("vocab", std::to_string(vocab.size()) + " words -> " + ws.vocab().string());
}

void stage_train(Workspace& ws) {
    const auto corpus = ws.load_corpus();
    const auto vocab = ws.load_vocab();
    auto training = ws.config.training;
    training.seed = ws.config.seed;
    training.threads = ws.config.threads;
    std::vector<EpochStats> epochs;
    const auto m = train_sgns(corpus, vocab, training, &epochs);
    save_embeddings(m, ws.embeddings());
    ws.wrote(ws.embeddings());
    json losses = json::array();
    for (const auto& e : epochs) losses.push_back({{"mean_loss", e.mean_loss}, {"pairs", e.pairs}});
    ws.write_meta(ws.embeddings(), "train", {{"words", m.size()}, {"dim", m.dim()}, {"epochs", losses}});
    ws.log("train", std::to_string(m.size()) + " x " + std::to_string(m.dim()) + " -> " +
                        ws.embeddings().string());
}

void stage_build_wcn(Workspace& ws) {
    const auto corpus = ws.load_corpus();
    const auto subset = ws.subset(ws.load_vocab(), ws.config.wcn_sample_fraction);
    CooccurrenceOptions opts;
    opts.window = ws.config.cooccurrence_window;
    opts.max_unique_tokens = ws.config.max_unique_tokens;
    opts.threads = ws.config.threads;
    const auto g = build_wcn(corpus, subset, opts);
    save_graph(g, ws.wcn());
    ws.wrote(ws.wcn());
    ws.write_meta(ws.wcn(), "build-wcn",
                  {{"nodes", g.node_count()}, {"edges", g.edge_count()},
                   {"vocabulary_subset", subset.size()}, {"sample_fraction", ws.config.wcn_sample_fraction}});
    ws.log("build-wcn", std::to_string(g.node_count()) + " nodes, " + std::to_string(g.edge_count()) +
                            " edges -> " + ws.wcn().string());
}

void stage_build_wsn(Workspace& ws) {
    ws.require(ws.embeddings(), "embeddings", "train");
    const auto m = load_embeddings(ws.embeddings());
    const auto subset = ws.subset(ws.load_vocab(), ws.config.wsn_sample_fraction);

    SimilarityThreshold threshold;
    if (ws.config.threshold_exhaustive) {
        if (subset.size() >= 50'000) {
            throw InvalidArgument("exhaustive threshold is limited to fewer than 50000 words");
        }
        threshold = exhaustive_similarity_threshold(m, subset, ws.config.threshold_percentile);
    } else {
        threshold = estimate_similarity_threshold(m, subset, ws.config.threshold_percentile,
                                                  ws.config.threshold_sample_size, ws.config.seed);
    }
    SimilarityOptions opts;
    opts.threads = ws.config.threads;
    const auto g = build_wsn(m, subset, threshold, opts);
    save_graph(g, ws.wsn());
    ws.wrote(ws.wsn());

    const json threshold_json = {{"value", threshold.value},
                                 {"percentile", threshold.percentile},
                                 {"sample_size", threshold.sample_size},
                                 {"seed", threshold.seed},
                                 {"exhaustive", threshold.exhaustive}};
    ws.write_meta(ws.wsn(), "build-wsn",
                  {{"nodes", g.node_count()}, {"edges", g.edge_count()}, {"threshold", threshold_json},
                   {"sample_fraction", ws.config.wsn_sample_fraction}});
    ws.log("build-wsn", "threshold " + real_text(threshold.value) + ", " + std::to_string(g.node_count()) +
                            " nodes, " + std::to_string(g.edge_count()) + " edges -> " + ws.wsn().string());
}

void stage_stats(Workspace& ws) {
    struct Target {
        fs::path graph;
        std::string name;
        std::string stem;
    };
    std::vector<Target> targets;
    if (!ws.options.graphs.empty()) {
        for (const auto& g : ws.options.graphs) {
            if (!fs::is_regular_file(g)) throw MissingArtifact("graph not found: " + g.string());
            targets.push_back({g, g.stem().string(), g.stem().string()});
        }
    } else {
        if (fs::is_regular_file(ws.wcn())) targets.push_back({ws.wcn(), "WCN-" + ws.config.name, "wcn"});
        if (fs::is_regular_file(ws.wsn())) targets.push_back({ws.wsn(), "WSN-" + ws.config.name, "wsn"});
        if (targets.empty()) throw MissingArtifact("graphs not found; run build-wcn or build-wsn");
    }

    auto stats = ws.config.stats;
    stats.threads = ws.config.threads;
    for (const auto& t : targets) {
        const auto g = load_graph(t.graph);
        const auto report = structure_report(g, stats, t.name);
        const auto report_path = ws.path(t.stem + ".report.json");
        ws.write_text(report_path, report_to_json(report, stats, ws.config.hash(), ws.config.seed));

        std::string csv;
        try {
            csv = degree_plot_csv(g, stats);
        } catch (const UndefinedValue&) {
            csv = "k,p,power_fit,two_regime_fit\n";
        }
        const auto csv_path = ws.path(t.stem + ".degree.csv");
        ws.write_text(csv_path, csv);
        ws.write_meta(csv_path, "stats", {{"graph", t.graph.filename().string()}});
        ws.log("stats", t.name + " -> " + report_path.string());
    }
}

void stage_report(Workspace& ws) {
    std::vector<fs::path> files = ws.options.reports;
    if (files.empty()) {
        if (fs::is_directory(ws.config.output_dir)) {
            for (const auto& entry : fs::directory_iterator(ws.config.output_dir)) {
                const auto name = entry.path().filename().string();
                if (entry.is_regular_file() && name.size() > 12 &&
                    name.compare(name.size() - 12, 12, ".report.json") == 0) {
                    files.push_back(entry.path());
                }
            }
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) throw MissingArtifact("reports not found; run stats");
    }
    std::vector<StructureReport> reports;
    for (const auto& f : files) {
        auto in = detail::open_input(f);
        std::stringstream buffer;
        buffer << in.rdbuf();
        reports.push_back(report_from_json(buffer.str()));
    }
    const auto table = emit_summary_table(reports);
    const auto txt = ws.path("summary.txt");
    const auto csv = ws.path("summary.csv");
    ws.write_text(txt, table.text);
    ws.write_text(csv, table.csv);
    ws.write_meta(txt, "report", {{"reports", reports.size()}});
    ws.write_meta(csv, "report", {{"reports", reports.size()}});
    if (ws.options.log) *ws.options.log << table.text;
}

}  // namespace

std::vector<fs::path> run_subcommand(Subcommand stage, const PipelineConfig& config, const RunOptions& options) {
    config.validate(stage);
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) throw IoError("cannot create output directory " + config.output_dir.string() + ": " + ec.message());

    Workspace ws{config, options, {}};
    switch (stage) {
        case Subcommand::Ingest: stage_ingest(ws); break;
        case Subcommand::Vocab: stage_vocab(ws); break;
        case Subcommand::Train: stage_train(ws); break;
        case Subcommand::BuildWcn: stage_build_wcn(ws); break;
        case Subcommand::BuildWsn: stage_build_wsn(ws); break;
        case Subcommand::Stats: stage_stats(ws); break;
        case Subcommand::Report: stage_report(ws); break;
        case Subcommand::Pipeline:
            stage_ingest(ws);
            stage_vocab(ws);
            stage_train(ws);
            stage_build_wcn(ws);
            stage_build_wsn(ws);
            stage_stats(ws);
            stage_report(ws);
            break;
    }
    return ws.written;
}

}  // namespace lexnet

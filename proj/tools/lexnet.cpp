// lexnet: corpus -> embeddings -> co-occurrence / similarity networks -> structure report.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lexnet/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string output;
    std::vector<std::string> overrides;
    std::vector<std::string> graphs;
    std::vector<std::string> reports;
    bool quiet = false;
};

lexnet::PipelineConfig resolve_config(const Flags& flags) {
    auto config = flags.config.empty() ? lexnet::PipelineConfig{} : lexnet::load_config(flags.config);
    std::vector<std::string> errors;
    for (const auto& kv : flags.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            errors.push_back("--set " + kv + ": expected key=value");
            continue;
        }
        try {
            config.set(kv.substr(0, eq), kv.substr(eq + 1));
        } catch (const lexnet::ConfigError& e) {
            errors.insert(errors.end(), e.violations().begin(), e.violations().end());
        }
    }
    if (!errors.empty()) throw lexnet::ConfigError(std::move(errors));
    if (flags.seed) config.seed = *flags.seed;
    if (flags.threads) config.threads = *flags.threads;
    if (!flags.output.empty()) config.output_dir = flags.output;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Word co-occurrence and word similarity network toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    Flags flags;
    app.add_option("-c,--config", flags.config, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", flags.seed, "override the config seed");
    app.add_option("--threads", flags.threads, "worker threads; 1 is deterministic");
    app.add_option("-o,--output", flags.output, "override output_dir");
    app.add_option("--set", flags.overrides, "override any config key (key=value, repeatable)");
    app.add_flag("-q,--quiet", flags.quiet, "suppress progress output");

    const std::vector<std::pair<std::string, std::string>> stages = {
        {"ingest", "normalize corpus files into corpus.jsonl"},
        {"vocab", "count words into vocab.tsv"},
        {"train", "train skip-gram embeddings into embeddings.txt"},
        {"build-wcn", "build the word co-occurrence network"},
        {"build-wsn", "build the word similarity network"},
        {"stats", "compute structure reports for graphs"},
        {"report", "tabulate structure reports"},
        {"pipeline", "run every stage in order"},
    };
    for (const auto& [name, help] : stages) {
        auto* sub = app.add_subcommand(name, help);
        if (name == "stats") sub->add_option("-g,--graph", flags.graphs, "graph files (default: wcn.graph, wsn.graph)");
        if (name == "report") sub->add_option("-r,--report", flags.reports, "report JSON files (default: all in output_dir)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    const auto* chosen = app.get_subcommands().front();
    try {
        const auto config = resolve_config(flags);
        lexnet::RunOptions options;
        for (const auto& g : flags.graphs) options.graphs.emplace_back(g);
        for (const auto& r : flags.reports) options.reports.emplace_back(r);
        if (!flags.quiet) options.log = &std::cerr;
        lexnet::run_subcommand(lexnet::parse_subcommand(chosen->get_name()), config, options);
    } catch (const lexnet::ConfigError& e) {
        std::cerr << "lexnet: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "lexnet: " << e.what() << '\n';
        return kRuntime;
    }
    return kOk;
}

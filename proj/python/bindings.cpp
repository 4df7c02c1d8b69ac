#include <pybind11/pybind11.h>
#include <pybind11/numpy.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lexnet/corpus.hpp"
#include "lexnet/embedding.hpp"
#include "lexnet/generators.hpp"
#include "lexnet/graph.hpp"
#include "lexnet/netstats.hpp"
#include "lexnet/pipeline.hpp"

namespace py = pybind11;
using namespace lexnet;

namespace {

NormalizationConfig rules_for(bool extended) {
    return extended ? NormalizationConfig::with_extension_blocks() : NormalizationConfig{};
}

std::vector<DegreePoint> to_points(const std::vector<std::pair<double, double>>& kp) {
    std::vector<DegreePoint> points;
    points.reserve(kp.size());
    for (const auto& [k, p] : kp) points.push_back({k, p});
    return points;
}

py::array_t<float> matrix_copy(std::span<const float> data, std::size_t rows, std::size_t dim) {
    py::array_t<float> out({rows, dim});
    std::copy(data.begin(), data.end(), out.mutable_data());
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Word co-occurrence and similarity networks";

    static py::exception<Error> error(m, "LexnetError", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", error.ptr());
    py::register_exception<IoError>(m, "IoError", error.ptr());
    py::register_exception<UndefinedValue>(m, "UndefinedValue", error.ptr());
    py::register_exception<ParseError>(m, "ParseError", error.ptr());
    py::register_exception<MissingArtifact>(m, "MissingArtifact", error.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", error.ptr());

    // corpus ---------------------------------------------------------------
    m.def("normalize_text", [](std::string_view raw, bool extended) { return normalize_text(raw, rules_for(extended)); },
          py::arg("raw"), py::arg("extended_ideographs") = false);
    m.def("normalize_token", [](std::string_view raw, bool extended) { return normalize_token(raw, rules_for(extended)); },
          py::arg("raw"), py::arg("extended_ideographs") = false);

    py::class_<Corpus>(m, "Corpus")
        .def(py::init([](const std::vector<std::vector<std::string>>& texts, std::string label) {
                 std::vector<TokenizedText> out;
                 out.reserve(texts.size());
                 for (std::size_t i = 0; i < texts.size(); ++i) out.push_back({std::to_string(i), texts[i]});
                 return Corpus(std::move(label), std::move(out));
             }),
             py::arg("texts"), py::arg("label") = "")
        .def_property_readonly("label", &Corpus::label)
        .def_property_readonly("dropped_texts", &Corpus::dropped_texts)
        .def_property_readonly("token_count", &Corpus::token_count)
        .def("__len__", &Corpus::size)
        .def("texts", [](const Corpus& c) {
            std::vector<std::vector<std::string>> out;
            for (const auto& t : c.texts()) out.push_back(t.tokens);
            return out;
        });

    m.def(
        "read_corpus",
        [](const std::filesystem::path& path, std::string_view format, bool extended, std::string label) {
            IngestOptions opts;
            opts.normalization = rules_for(extended);
            opts.label = std::move(label);
            return ingest_corpus(path, parse_corpus_format(format), opts);
        },
        py::arg("path"), py::arg("format") = "pretokenized-lines", py::arg("extended_ideographs") = false,
        py::arg("label") = "");

    py::class_<Vocabulary>(m, "Vocabulary")
        .def_static("from_counts", [](std::vector<std::pair<std::string, std::uint64_t>> entries,
                                      std::uint64_t min_count) { return Vocabulary::from_entries(std::move(entries), min_count); },
                    py::arg("entries"), py::arg("min_count") = 0)
        .def("__len__", &Vocabulary::size)
        .def("__contains__", &Vocabulary::contains)
        .def("find", &Vocabulary::find)
        .def_property_readonly("words", &Vocabulary::words)
        .def_property_readonly("counts", &Vocabulary::counts)
        .def_property_readonly("min_count", &Vocabulary::min_count);

    m.def("build_vocabulary", &build_vocabulary, py::arg("corpus"), py::arg("min_count") = 3, py::arg("threads") = 1);
    m.def("sample_vocabulary", &sample_vocabulary, py::arg("vocab"), py::arg("fraction"), py::arg("seed"));

    // embedding ------------------------------------------------------------
    py::class_<EmbeddingMatrix>(m, "Embeddings")
        .def("__len__", &EmbeddingMatrix::size)
        .def_property_readonly("dim", &EmbeddingMatrix::dim)
        .def_property_readonly("words", &EmbeddingMatrix::words)
        .def("vector", &EmbeddingMatrix::vector_of, py::arg("word"))
        .def("input_matrix", [](const EmbeddingMatrix& e) { return matrix_copy(e.input_data(), e.size(), e.dim()); })
        .def("output_matrix", [](const EmbeddingMatrix& e) { return matrix_copy(e.output_data(), e.size(), e.dim()); })
        .def("similarity", [](const EmbeddingMatrix& e, std::string_view a, std::string_view b) {
            const auto ia = e.find(a), ib = e.find(b);
            if (!ia || !ib) throw InvalidArgument("word not in embeddings");
            return cosine_similarity(e.input(*ia), e.input(*ib));
        });

    m.def(
        "train_sgns",
        [](const Corpus& corpus, const Vocabulary& vocab, int window, int dim, int negatives, int epochs,
           double initial_lr, std::uint64_t seed, double subsample, unsigned threads) {
            TrainingConfig cfg;
            cfg.window = window;
            cfg.dim = dim;
            cfg.negatives = negatives;
            cfg.epochs = epochs;
            cfg.initial_lr = initial_lr;
            cfg.seed = seed;
            cfg.subsample_threshold = subsample;
            cfg.threads = threads;
            std::vector<EpochStats> log;
            auto e = train_sgns(corpus, vocab, cfg, &log);
            std::vector<double> losses;
            for (const auto& s : log) losses.push_back(s.mean_loss);
            return std::make_pair(std::move(e), losses);
        },
        py::arg("corpus"), py::arg("vocab"), py::kw_only(), py::arg("window") = 10, py::arg("dim") = 500,
        py::arg("negatives") = 5, py::arg("epochs") = 5, py::arg("initial_lr") = 0.025, py::arg("seed") = 1,
        py::arg("subsample") = 0.0, py::arg("threads") = 1,
        "Returns (embeddings, per-epoch mean loss).");

    m.def("sgns_pair_loss",
          [](const std::vector<double>& c, const std::vector<double>& o, const std::vector<std::vector<double>>& neg) {
              std::vector<std::span<const double>> spans(neg.begin(), neg.end());
              return sgns_pair_loss(c, o, spans);
          });
    m.def("sgns_pair_gradient",
          [](const std::vector<double>& c, const std::vector<double>& o, const std::vector<std::vector<double>>& neg) {
              std::vector<std::span<const double>> spans(neg.begin(), neg.end());
              const auto g = sgns_pair_gradient(c, o, spans);
              return py::make_tuple(g.center, g.context, g.negatives);
          });
    m.def("cosine_similarity", [](const std::vector<double>& a, const std::vector<double>& b) {
        return cosine_similarity(std::span<const double>(a), std::span<const double>(b));
    });
    m.def("save_embeddings", &save_embeddings);
    m.def("load_embeddings", &load_embeddings);

    // graph ------------------------------------------------------------------
    py::class_<UndirectedGraph>(m, "Graph")
        .def(py::init([](std::vector<std::string> words, std::vector<Edge> edges) {
                 return UndirectedGraph::from_edges(std::move(words), std::move(edges));
             }),
             py::arg("words"), py::arg("edges"))
        .def_property_readonly("node_count", &UndirectedGraph::node_count)
        .def_property_readonly("edge_count", &UndirectedGraph::edge_count)
        .def_property_readonly("words", &UndirectedGraph::words)
        .def("neighbors", [](const UndirectedGraph& g, NodeId v) {
            if (v >= g.node_count()) throw InvalidArgument("node id out of range");
            const auto n = g.neighbors(v);
            return std::vector<NodeId>(n.begin(), n.end());
        })
        .def("degree", [](const UndirectedGraph& g, NodeId v) {
            if (v >= g.node_count()) throw InvalidArgument("node id out of range");
            return g.degree(v);
        })
        .def("has_edge", &UndirectedGraph::has_edge)
        .def("find", &UndirectedGraph::find)
        .def("edges", &UndirectedGraph::edges)
        .def("__eq__", &UndirectedGraph::operator==);

    m.def(
        "build_wcn",
        [](const Corpus& corpus, const Vocabulary& vocab, std::size_t window, std::size_t max_unique_tokens,
           unsigned threads) {
            CooccurrenceOptions opts;
            opts.window = window;
            opts.max_unique_tokens = max_unique_tokens;
            opts.threads = threads;
            return build_wcn(corpus, vocab, opts);
        },
        py::arg("corpus"), py::arg("vocab"), py::kw_only(), py::arg("window") = 0,
        py::arg("max_unique_tokens") = 0, py::arg("threads") = 1);

    py::class_<SimilarityThreshold>(m, "SimilarityThreshold")
        .def(py::init([](double value, double percentile) {
                 SimilarityThreshold t;
                 t.value = value;
                 t.percentile = percentile;
                 return t;
             }),
             py::arg("value"), py::arg("percentile") = 99.0)
        .def_readonly("value", &SimilarityThreshold::value)
        .def_readonly("percentile", &SimilarityThreshold::percentile)
        .def_readonly("sample_size", &SimilarityThreshold::sample_size)
        .def_readonly("seed", &SimilarityThreshold::seed)
        .def_readonly("exhaustive", &SimilarityThreshold::exhaustive);

    m.def("estimate_similarity_threshold", &estimate_similarity_threshold, py::arg("embeddings"), py::arg("subset"),
          py::arg("percentile") = 99.0, py::arg("sample_size") = 10'000'000, py::arg("seed") = 1);
    m.def("exhaustive_similarity_threshold", &exhaustive_similarity_threshold, py::arg("embeddings"),
          py::arg("subset"), py::arg("percentile") = 99.0);
    m.def(
        "build_wsn",
        [](const EmbeddingMatrix& e, const Vocabulary& subset, const SimilarityThreshold& t, unsigned threads) {
            SimilarityOptions opts;
            opts.threads = threads;
            return build_wsn(e, subset, t, opts);
        },
        py::arg("embeddings"), py::arg("subset"), py::arg("threshold"), py::kw_only(), py::arg("threads") = 1);
    m.def("percentile", [](std::vector<double> values, double p) { return percentile_of(values, p); });
    m.def("save_graph", &save_graph);
    m.def("load_graph", [](const std::filesystem::path& p) { return load_graph(p); });
    m.def("erdos_renyi", &erdos_renyi, py::arg("n"), py::arg("p"), py::arg("seed"));
    m.def("barabasi_albert", &barabasi_albert, py::arg("n"), py::arg("m"), py::arg("seed"));

    // netstats ---------------------------------------------------------------
    m.def("degree_distribution", [](const UndirectedGraph& g) {
        std::vector<std::pair<double, double>> out;
        for (const auto& pt : degree_distribution(g).points()) out.emplace_back(pt.k, pt.p);
        return out;
    });
    m.def("fit_power_law", [](const std::vector<std::pair<double, double>>& kp) {
        const auto f = fit_power_law(to_points(kp));
        return py::dict(py::arg("gamma") = f.gamma, py::arg("log_intercept") = f.log_intercept,
                        py::arg("ssr") = f.ssr, py::arg("aic") = f.aic, py::arg("n_points") = f.n_points);
    });
    m.def("fit_two_regime", [](const std::vector<std::pair<double, double>>& kp) {
        const auto f = fit_two_regime(to_points(kp));
        return py::dict(py::arg("gamma1") = f.gamma1, py::arg("gamma2") = f.gamma2,
                        py::arg("breakpoint_k") = f.breakpoint_k, py::arg("log_intercept") = f.log_intercept,
                        py::arg("ssr") = f.ssr, py::arg("aic") = f.aic, py::arg("n_points") = f.n_points);
    });
    m.def("aic", &aic, py::arg("ssr"), py::arg("n"), py::arg("num_params"));
    m.def("local_clustering", &local_clustering, py::arg("graph"), py::arg("threads") = 1);
    m.def("average_clustering", &average_clustering, py::arg("graph"), py::arg("threads") = 1);
    m.def("er_baseline_cc", &er_baseline_cc, py::arg("nodes"), py::arg("edges"));
    m.def("degree_assortativity", &degree_assortativity, py::arg("graph"));
    m.def("classify_small_world", &classify_small_world, py::arg("cc"), py::arg("er_cc"),
          py::arg("ratio_threshold") = 10.0);
    m.def("classify_assortativity", [](double dac, double band) { return std::string(to_string(classify_assortativity(dac, band))); },
          py::arg("dac"), py::arg("neutral_band") = 0.05);
    m.def(
        "structure_report_json",
        [](const UndirectedGraph& g, std::string name, double ratio, double band, bool log_binning,
           double bins_per_decade, unsigned threads) {
            StructureConfig cfg;
            cfg.ratio_threshold = ratio;
            cfg.neutral_band = band;
            cfg.log_binning = log_binning;
            cfg.bins_per_decade = bins_per_decade;
            cfg.threads = threads;
            return report_to_json(structure_report(g, cfg, name), cfg);
        },
        py::arg("graph"), py::arg("name") = "", py::kw_only(), py::arg("ratio_threshold") = 10.0,
        py::arg("neutral_band") = 0.05, py::arg("log_binning") = false, py::arg("bins_per_decade") = 10.0,
        py::arg("threads") = 1);
    m.def("summary_table", [](const std::vector<std::string>& report_json) {
        std::vector<StructureReport> reports;
        for (const auto& j : report_json) reports.push_back(report_from_json(j));
        const auto t = emit_summary_table(reports);
        return py::make_tuple(t.text, t.csv);
    });

    // pipeline ---------------------------------------------------------------
    m.def(
        "run_subcommand",
        [](std::string_view stage, std::optional<std::filesystem::path> config_path,
           const std::map<std::string, std::string>& overrides, std::vector<std::filesystem::path> graphs,
           std::vector<std::filesystem::path> reports) {
            auto config = config_path ? load_config(*config_path) : PipelineConfig{};
            for (const auto& [k, v] : overrides) config.set(k, v);
            RunOptions opts;
            opts.graphs = std::move(graphs);
            opts.reports = std::move(reports);
            return run_subcommand(parse_subcommand(stage), config, opts);
        },
        py::arg("stage"), py::arg("config") = py::none(), py::kw_only(),
        py::arg("overrides") = std::map<std::string, std::string>{},
        py::arg("graphs") = std::vector<std::filesystem::path>{},
        py::arg("reports") = std::vector<std::filesystem::path>{},
        "Runs one pipeline stage; returns the paths written.");
}

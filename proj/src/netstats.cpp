#include "lexnet/netstats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <thread>

#include <Eigen/Dense>

#include "lexnet/error.hpp"

namespace lexnet {

DegreeDistribution DegreeDistribution::from_points(std::vector<DegreePoint> points, std::size_t isolated_nodes) {
    if (points.empty()) throw InvalidArgument("degree distribution has no points");
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& pt = points[i];
        if (!(pt.k >= 1.0)) throw InvalidArgument("degree distribution: k must be >= 1");
        if (!(pt.p > 0.0)) throw InvalidArgument("degree distribution: p must be positive");
        if (i > 0 && !(points[i - 1].k < pt.k)) {
            throw InvalidArgument("degree distribution: k must be strictly ascending");
        }
        total += pt.p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("degree distribution: probabilities must sum to 1");
    DegreeDistribution d;
    d.points_ = std::move(points);
    d.isolated_nodes_ = isolated_nodes;
    return d;
}

DegreeDistribution degree_distribution(const UndirectedGraph& g) {
    std::map<std::size_t, std::size_t> histogram;
    std::size_t isolated = 0;
    for (NodeId v = 0; v < g.node_count(); ++v) {
        const auto k = g.degree(v);
        if (k == 0) {
            ++isolated;
        } else {
            ++histogram[k];
        }
    }
    const std::size_t connected = g.node_count() - isolated;
    if (connected == 0) throw UndefinedValue("degree distribution undefined: every node is isolated");
    std::vector<DegreePoint> points;
    points.reserve(histogram.size());
    for (const auto& [k, count] : histogram) {
        points.push_back({static_cast<double>(k), static_cast<double>(count) / static_cast<double>(connected)});
    }
    return DegreeDistribution::from_points(std::move(points), isolated);
}

std::vector<DegreePoint> log_binned(const DegreeDistribution& d, double bins_per_decade) {
    if (!(bins_per_decade > 0.0)) throw InvalidArgument("bins_per_decade must be positive");
    const double step = 1.0 / bins_per_decade;
    std::map<long, double> mass;
    for (const auto& pt : d.points()) {
        // small offset keeps exact powers (k = 10, 100) in the bin they open
        const auto bin = static_cast<long>(std::floor(std::log10(pt.k) / step + 1e-9));
        mass[bin] += pt.p;
    }
    std::vector<DegreePoint> out;
    out.reserve(mass.size());
    for (const auto& [bin, p] : mass) {
        const double lo = std::pow(10.0, static_cast<double>(bin) * step);
        const double hi = std::pow(10.0, static_cast<double>(bin + 1) * step);
        const double width = std::max(1.0, std::ceil(hi - 1e-9) - std::ceil(lo - 1e-9));
        out.push_back({std::sqrt(lo * hi), p / width});
    }
    return out;
}

double aic(double ssr, std::size_t n, std::size_t num_params) {
    if (n == 0) throw InvalidArgument("AIC needs at least one point");
    if (ssr < 0.0 || std::isnan(ssr)) throw InvalidArgument("SSR must be non-negative");
    if (ssr == 0.0) throw UndefinedValue("degenerate fit; AIC undefined");
    const double dn = static_cast<double>(n);
    return dn * std::log(ssr / dn) + 2.0 * static_cast<double>(num_params + 1);
}

double PowerLawFit::predict_log(double k) const { return log_intercept - gamma * std::log(k); }

double TwoRegimeFit::predict_log(double k) const {
    const double x = std::log(k);
    const double x0 = std::log(breakpoint_k);
    if (x <= x0) return log_intercept - gamma1 * x;
    return log_intercept - gamma1 * x0 - gamma2 * (x - x0);
}

double ssr_resolution_floor(std::span<const DegreePoint> points) {
    double scale = 1.0;
    for (const auto& pt : points) {
        scale = std::max({scale, std::abs(std::log(pt.k)), std::abs(std::log(pt.p))});
    }
    const double per_point = 64.0 * std::numeric_limits<double>::epsilon() * scale;
    return static_cast<double>(points.size()) * per_point * per_point;
}

namespace {

void log_coordinates(std::span<const DegreePoint> points, Eigen::VectorXd& x, Eigen::VectorXd& y) {
    x.resize(static_cast<Eigen::Index>(points.size()));
    y.resize(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].k > 0.0) || !(points[i].p > 0.0)) {
            throw InvalidArgument("fit points need positive k and p");
        }
        if (i > 0 && !(points[i - 1].k < points[i].k)) throw InvalidArgument("fit points must ascend in k");
        x[static_cast<Eigen::Index>(i)] = std::log(points[i].k);
        y[static_cast<Eigen::Index>(i)] = std::log(points[i].p);
    }
}

template <typename Fit>
double residual_ssr(const Fit& fit, std::span<const DegreePoint> points) {
    double ssr = 0.0;
    for (const auto& pt : points) {
        const double r = std::log(pt.p) - fit.predict_log(pt.k);
        ssr += r * r;
    }
    return ssr;
}

}  // namespace

PowerLawFit fit_power_law(std::span<const DegreePoint> points) {
    if (points.size() < 3) {
        throw UndefinedValue("insufficient points: power-law fit needs 3, got " + std::to_string(points.size()));
    }
    Eigen::VectorXd x, y;
    log_coordinates(points, x, y);
    Eigen::MatrixXd design(x.size(), 2);
    design.col(0).setOnes();
    design.col(1) = x;
    const Eigen::Vector2d beta = design.colPivHouseholderQr().solve(y);

    PowerLawFit fit;
    fit.log_intercept = beta[0];
    fit.gamma = -beta[1];
    fit.n_points = points.size();
    fit.ssr = residual_ssr(fit, points);
    fit.aic = aic(std::max(fit.ssr, ssr_resolution_floor(points)), fit.n_points, 2);
    return fit;
}

TwoRegimeFit fit_two_regime(std::span<const DegreePoint> points) {
    const std::size_t n = points.size();
    if (n < 7) {
        throw UndefinedValue("insufficient points: two-regime fit needs 7, got " + std::to_string(n));
    }
    Eigen::VectorXd x, y;
    log_coordinates(points, x, y);

    Eigen::MatrixXd design(x.size(), 3);
    design.col(0).setOnes();
    TwoRegimeFit best;
    best.ssr = std::numeric_limits<double>::infinity();

    // regime one holds points [0, b], regime two (b, n)
    for (std::size_t b = 2; b + 3 < n; ++b) {
        const double x0 = x[static_cast<Eigen::Index>(b)];
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            design(i, 1) = std::min(x[i], x0);
            design(i, 2) = std::max(x[i] - x0, 0.0);
        }
        const Eigen::Vector3d beta = design.colPivHouseholderQr().solve(y);
        TwoRegimeFit candidate;
        candidate.log_intercept = beta[0];
        candidate.gamma1 = -beta[1];
        candidate.gamma2 = -beta[2];
        candidate.breakpoint_k = points[b].k;
        candidate.n_points = n;
        candidate.ssr = residual_ssr(candidate, points);
        if (candidate.ssr < best.ssr) best = candidate;
    }
    best.aic = aic(std::max(best.ssr, ssr_resolution_floor(points)), n, 4);
    return best;
}

std::string_view to_string(DegreeClass c) {
    return c == DegreeClass::ScaleFree ? "scale-free" : "two-regime";
}

std::string_view to_string(AssortativityClass c) {
    switch (c) {
        case AssortativityClass::Assortative: return "assortative";
        case AssortativityClass::Disassortative: return "disassortative";
        case AssortativityClass::Neutral: return "neutral";
    }
    return "neutral";
}

DegreeClass classify_degree_distribution(const PowerLawFit& power_law, const TwoRegimeFit& two_regime) {
    return power_law.aic < two_regime.aic ? DegreeClass::ScaleFree : DegreeClass::TwoRegime;
}

// ---------------------------------------------------------------------------

namespace {

void clustering_range(const UndirectedGraph& g, NodeId begin, NodeId end, std::vector<double>& out) {
    std::vector<char> mark(g.node_count(), 0);
    for (NodeId v = begin; v < end; ++v) {
        const auto nbrs = g.neighbors(v);
        const std::size_t k = nbrs.size();
        if (k < 2) {
            out[v] = 0.0;
            continue;
        }
        for (NodeId u : nbrs) mark[u] = 1;
        std::size_t links = 0;  // each edge among neighbours is seen from both ends
        for (NodeId u : nbrs) {
            for (NodeId w : g.neighbors(u)) links += mark[w];
        }
        for (NodeId u : nbrs) mark[u] = 0;
        out[v] = static_cast<double>(links) / (static_cast<double>(k) * static_cast<double>(k - 1));
    }
}

}  // namespace

std::vector<double> local_clustering(const UndirectedGraph& g, unsigned threads) {
    const auto n = static_cast<NodeId>(g.node_count());
    std::vector<double> cc(n, 0.0);
    threads = std::max(1u, std::min<unsigned>(threads, n));
    if (threads <= 1) {
        clustering_range(g, 0, n, cc);
        return cc;
    }
    // interleaved node blocks balance hub-heavy prefixes across workers
    constexpr NodeId kBlock = 256;
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
            for (NodeId start = w * kBlock; start < n; start += threads * kBlock) {
                clustering_range(g, start, std::min<NodeId>(n, start + kBlock), cc);
            }
        });
    }
    workers.clear();
    return cc;
}

double average_clustering(const UndirectedGraph& g, unsigned threads) {
    if (g.node_count() == 0) throw InvalidArgument("average clustering of an empty graph");
    const auto cc = local_clustering(g, threads);
    double sum = 0.0;
    for (double c : cc) sum += c;
    return sum / static_cast<double>(cc.size());
}

double er_baseline_cc(std::size_t n_nodes, std::size_t n_edges) {
    if (n_nodes < 2) throw InvalidArgument("ER baseline needs at least 2 nodes");
    const double n = static_cast<double>(n_nodes);
    return 2.0 * static_cast<double>(n_edges) / (n * (n - 1.0));
}

bool classify_small_world(double cc, double er_cc, double ratio_threshold) {
    if (!(ratio_threshold > 1.0)) throw InvalidArgument("ratio_threshold must exceed 1");
    return cc > 0.0 && cc >= ratio_threshold * er_cc;
}

double degree_assortativity(const UndirectedGraph& g) {
    if (g.edge_count() == 0) throw UndefinedValue("assortativity undefined: graph has no edges");
    // Exact integer moments over oriented edge ends; the symmetric sums make
    // the x and y marginals identical.
    __extension__ typedef __int128 Wide;
    Wide m = 0, s1 = 0, s2 = 0, sxy = 0;
    for (NodeId u = 0; u < g.node_count(); ++u) {
        const Wide ku = static_cast<Wide>(g.degree(u));
        for (NodeId v : g.neighbors(u)) {
            if (v < u) continue;
            const Wide kv = static_cast<Wide>(g.degree(v));
            m += 1;
            s1 += ku + kv;
            s2 += ku * ku + kv * kv;
            sxy += ku * kv;
        }
    }
    // r = (2m * 2 sxy - s1^2) / (2m * s2 - s1^2) over 2m oriented pairs
    const Wide num = 4 * m * sxy - s1 * s1;
    const Wide den = 2 * m * s2 - s1 * s1;
    if (den == 0) throw UndefinedValue("assortativity undefined: endpoint degrees have zero variance");
    return std::clamp(static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den)), -1.0, 1.0);
}

AssortativityClass classify_assortativity(double dac, double neutral_band) {
    if (!(neutral_band > 0.0)) throw InvalidArgument("neutral_band must be positive");
    if (std::abs(dac) < neutral_band) return AssortativityClass::Neutral;
    return dac > 0.0 ? AssortativityClass::Assortative : AssortativityClass::Disassortative;
}

// ---------------------------------------------------------------------------

void StructureConfig::validate() const {
    if (!(ratio_threshold > 1.0)) throw InvalidArgument("ratio_threshold must exceed 1");
    if (!(neutral_band > 0.0)) throw InvalidArgument("neutral_band must be positive");
    if (log_binning && !(bins_per_decade > 0.0)) throw InvalidArgument("bins_per_decade must be positive");
    if (threads < 1) throw InvalidArgument("threads must be >= 1");
}

namespace {

std::vector<DegreePoint> fit_points(const DegreeDistribution& d, const StructureConfig& config) {
    if (config.log_binning) return log_binned(d, config.bins_per_decade);
    return {d.points().begin(), d.points().end()};
}

}  // namespace

StructureReport structure_report(const UndirectedGraph& g, const StructureConfig& config, std::string name) {
    config.validate();
    StructureReport r;
    r.name = std::move(name);
    r.nodes = g.node_count();
    r.edges = g.edge_count();

    try {
        const auto d = degree_distribution(g);
        r.isolated_nodes = d.isolated_nodes();
        const auto points = fit_points(d, config);
        r.fit_points = points.size();
        try {
            r.power_law = fit_power_law(points);
        } catch (const Error& e) {
            r.undefined["power_law"] = e.what();
        }
        try {
            r.two_regime = fit_two_regime(points);
        } catch (const Error& e) {
            r.undefined["two_regime"] = e.what();
        }
    } catch (const Error& e) {
        r.isolated_nodes = g.node_count();
        r.undefined["power_law"] = e.what();
        r.undefined["two_regime"] = e.what();
    }
    if (r.power_law && r.two_regime) {
        r.degree_class = classify_degree_distribution(*r.power_law, *r.two_regime);
    } else {
        r.undefined["degree_class"] = "requires both degree-distribution fits";
    }

    if (g.node_count() > 0) {
        r.cc = average_clustering(g, config.threads);
    }
    if (g.node_count() >= 2) {
        r.er_cc = er_baseline_cc(g.node_count(), g.edge_count());
        r.small_world = classify_small_world(r.cc, *r.er_cc, config.ratio_threshold);
    } else {
        r.undefined["er_cc"] = "ER baseline needs at least 2 nodes";
        r.undefined["small_world"] = "ER baseline needs at least 2 nodes";
    }

    try {
        r.dac = degree_assortativity(g);
        r.assortativity_class = classify_assortativity(*r.dac, config.neutral_band);
    } catch (const Error& e) {
        r.undefined["dac"] = e.what();
        r.undefined["assortativity_class"] = e.what();
    }
    return r;
}

std::string degree_plot_csv(const UndirectedGraph& g, const StructureConfig& config) {
    std::string out = "k,p,power_fit,two_regime_fit\n";
    const auto d = degree_distribution(g);
    const auto points = fit_points(d, config);
    std::optional<PowerLawFit> pl;
    std::optional<TwoRegimeFit> tr;
    try {
        pl = fit_power_law(points);
    } catch (const UndefinedValue&) {
    }
    try {
        tr = fit_two_regime(points);
    } catch (const UndefinedValue&) {
    }
    char buf[128];
    for (const auto& pt : points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,", pt.k, pt.p);
        out += buf;
        if (pl) {
            std::snprintf(buf, sizeof buf, "%.17g", std::exp(pl->predict_log(pt.k)));
            out += buf;
        } else {
            out += "undefined";
        }
        out += ',';
        if (tr) {
            std::snprintf(buf, sizeof buf, "%.17g", std::exp(tr->predict_log(pt.k)));
            out += buf;
        } else {
            out += "undefined";
        }
        out += '\n';
    }
    return out;
}

}  // namespace lexnet

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexnet/graph.hpp"

namespace lexnet {

struct DegreePoint {
    double k;  ///< degree, or bin centre after log binning
    double p;
};

/// Empirical p(k) over nodes of degree >= 1.
class DegreeDistribution {
public:
    /// Validates: k ascending and distinct, k >= 1, p > 0, sum(p) = 1 within 1e-9.
    static DegreeDistribution from_points(std::vector<DegreePoint> points, std::size_t isolated_nodes = 0);

    std::span<const DegreePoint> points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    /// Degree-0 nodes, reported but excluded from p(k).
    std::size_t isolated_nodes() const noexcept { return isolated_nodes_; }

private:
    std::vector<DegreePoint> points_;
    std::size_t isolated_nodes_ = 0;
};

DegreeDistribution degree_distribution(const UndirectedGraph& g);

/// Logarithmic binning: p summed over [b^i, b^(i+1)) divided by the number of
/// integer degrees in the bin, placed at the bin's geometric centre.
/// Empty bins are dropped.
std::vector<DegreePoint> log_binned(const DegreeDistribution& d, double bins_per_decade);

/// AIC = n ln(ssr / n) + 2 (num_params + 1), the Gaussian least-squares form.
double aic(double ssr, std::size_t n, std::size_t num_params);

/// ln p = log_intercept - gamma ln k, fitted by ordinary least squares.
struct PowerLawFit {
    double gamma = 0.0;
    double log_intercept = 0.0;
    double ssr = 0.0;  ///< sum of squared residuals in log-log space
    double aic = 0.0;
    std::size_t n_points = 0;

    double predict_log(double k) const;
};

/// Continuous broken power law: slope -gamma1 up to breakpoint_k, -gamma2 after.
struct TwoRegimeFit {
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double breakpoint_k = 0.0;
    double log_intercept = 0.0;
    double ssr = 0.0;
    double aic = 0.0;
    std::size_t n_points = 0;

    double predict_log(double k) const;
};

/// Requires >= 3 points.
PowerLawFit fit_power_law(std::span<const DegreePoint> points);

/// Requires >= 7 points. The breakpoint is searched over observed degrees that
/// leave >= 3 points on each side; for each candidate the continuity-constrained
/// least-squares problem is solved exactly. SSR ties go to the smaller breakpoint.
TwoRegimeFit fit_two_regime(std::span<const DegreePoint> points);

/// SSR values at or below this are numerically zero for the given points;
/// fits compute AIC from max(ssr, floor) so that exact data stays comparable.
double ssr_resolution_floor(std::span<const DegreePoint> points);

enum class DegreeClass { ScaleFree, TwoRegime };
enum class AssortativityClass { Assortative, Disassortative, Neutral };

std::string_view to_string(DegreeClass c);
std::string_view to_string(AssortativityClass c);

/// Scale-free iff the power law has the lower AIC.
DegreeClass classify_degree_distribution(const PowerLawFit& power_law, const TwoRegimeFit& two_regime);

/// Per-node C_i = 2 T_i / (k_i (k_i - 1)), 0 when k_i < 2.
std::vector<double> local_clustering(const UndirectedGraph& g, unsigned threads = 1);

/// Mean of C_i over all nodes, isolated and degree-1 nodes included.
double average_clustering(const UndirectedGraph& g, unsigned threads = 1);

/// Edge density 2E / (N (N - 1)), the expected clustering of a matched ER graph.
double er_baseline_cc(std::size_t n_nodes, std::size_t n_edges);

bool classify_small_world(double cc, double er_cc, double ratio_threshold = 10.0);

/// Newman's r: Pearson correlation of endpoint degrees over both orientations
/// of every edge. Throws UndefinedValue when endpoint degrees have no variance.
double degree_assortativity(const UndirectedGraph& g);

AssortativityClass classify_assortativity(double dac, double neutral_band = 0.05);

struct StructureConfig {
    double ratio_threshold = 10.0;
    double neutral_band = 0.05;
    bool log_binning = false;
    double bins_per_decade = 10.0;
    unsigned threads = 1;

    void validate() const;
};

/// All diagnostics for one graph. A field that cannot be computed is left
/// empty and the reason is recorded in `undefined`.
struct StructureReport {
    std::string name;
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::size_t isolated_nodes = 0;
    std::size_t fit_points = 0;

    std::optional<PowerLawFit> power_law;
    std::optional<TwoRegimeFit> two_regime;
    std::optional<DegreeClass> degree_class;

    double cc = 0.0;
    std::optional<double> er_cc;
    std::optional<bool> small_world;

    std::optional<double> dac;
    std::optional<AssortativityClass> assortativity_class;

    std::map<std::string, std::string> undefined;  ///< field -> reason
};

StructureReport structure_report(const UndirectedGraph& g, const StructureConfig& config = {},
                                 std::string name = {});

/// "k,p,power_fit,two_regime_fit" rows for external log-log plotting.
std::string degree_plot_csv(const UndirectedGraph& g, const StructureConfig& config = {});

}  // namespace lexnet

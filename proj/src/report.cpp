#include <algorithm>
#include <cstdio>

#include "json.hpp"
#include "lexnet/pipeline.hpp"

namespace lexnet {

namespace {

using nlohmann::json;

constexpr const char* kUndefined = "undefined";

json fit_json(const PowerLawFit& f) {
    return {{"gamma", f.gamma}, {"log_intercept", f.log_intercept}, {"ssr", f.ssr},
            {"aic", f.aic}, {"n_points", f.n_points}};
}

json fit_json(const TwoRegimeFit& f) {
    return {{"gamma1", f.gamma1}, {"gamma2", f.gamma2}, {"breakpoint_k", f.breakpoint_k},
            {"log_intercept", f.log_intercept}, {"ssr", f.ssr}, {"aic", f.aic},
            {"n_points", f.n_points}};
}

template <typename T>
json or_undefined(const std::optional<T>& value) {
    if (!value) return kUndefined;
    return json(*value);
}

std::string small_world_label(const std::optional<bool>& sw) {
    if (!sw) return kUndefined;
    return *sw ? "small world" : "not small world";
}

}  // namespace

std::string report_to_json(const StructureReport& r, const StructureConfig& config,
                           const std::string& config_hash, std::uint64_t seed) {
    json j;
    j["name"] = r.name;
    if (!config_hash.empty()) {
        j["config_hash"] = config_hash;
        j["seed"] = seed;
    }
    j["nodes"] = r.nodes;
    j["edges"] = r.edges;
    j["isolated_nodes"] = r.isolated_nodes;
    j["fit_points"] = r.fit_points;
    j["power_law"] = r.power_law ? fit_json(*r.power_law) : json(kUndefined);
    j["two_regime"] = r.two_regime ? fit_json(*r.two_regime) : json(kUndefined);
    j["degree_class"] = r.degree_class ? json(std::string(to_string(*r.degree_class))) : json(kUndefined);
    j["cc"] = r.cc;
    j["er_cc"] = or_undefined(r.er_cc);
    j["small_world"] = or_undefined(r.small_world);
    j["small_worldness"] = small_world_label(r.small_world);
    j["dac"] = or_undefined(r.dac);
    j["assortativity_class"] =
        r.assortativity_class ? json(std::string(to_string(*r.assortativity_class))) : json(kUndefined);
    j["undefined_reasons"] = r.undefined;
    j["thresholds"] = {{"ratio_threshold", config.ratio_threshold},
                       {"neutral_band", config.neutral_band},
                       {"log_binning", config.log_binning},
                       {"bins_per_decade", config.bins_per_decade}};
    return j.dump(2) + "\n";
}

StructureReport report_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("invalid report JSON: ") + e.what());
    }
    try {
        StructureReport r;
        r.name = j.at("name").get<std::string>();
        r.nodes = j.at("nodes").get<std::size_t>();
        r.edges = j.at("edges").get<std::size_t>();
        r.isolated_nodes = j.value("isolated_nodes", std::size_t{0});
        r.fit_points = j.value("fit_points", std::size_t{0});
        if (const auto& f = j.at("power_law"); f.is_object()) {
            PowerLawFit fit;
            fit.gamma = f.at("gamma");
            fit.log_intercept = f.at("log_intercept");
            fit.ssr = f.at("ssr");
            fit.aic = f.at("aic");
            fit.n_points = f.at("n_points");
            r.power_law = fit;
        }
        if (const auto& f = j.at("two_regime"); f.is_object()) {
            TwoRegimeFit fit;
            fit.gamma1 = f.at("gamma1");
            fit.gamma2 = f.at("gamma2");
            fit.breakpoint_k = f.at("breakpoint_k");
            fit.log_intercept = f.at("log_intercept");
            fit.ssr = f.at("ssr");
            fit.aic = f.at("aic");
            fit.n_points = f.at("n_points");
            r.two_regime = fit;
        }
        if (const auto& c = j.at("degree_class"); c != kUndefined) {
            r.degree_class = c == "scale-free" ? DegreeClass::ScaleFree : DegreeClass::TwoRegime;
        }
        r.cc = j.at("cc");
        if (const auto& v = j.at("er_cc"); v.is_number()) r.er_cc = v.get<double>();
        if (const auto& v = j.at("small_world"); v.is_boolean()) r.small_world = v.get<bool>();
        if (const auto& v = j.at("dac"); v.is_number()) r.dac = v.get<double>();
        if (const auto& c = j.at("assortativity_class"); c != kUndefined) {
            const auto s = c.get<std::string>();
            r.assortativity_class = s == "assortative"      ? AssortativityClass::Assortative
                                    : s == "disassortative" ? AssortativityClass::Disassortative
                                                            : AssortativityClass::Neutral;
        }
        if (auto it = j.find("undefined_reasons"); it != j.end()) {
            r.undefined = it->get<std::map<std::string, std::string>>();
        }
        return r;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed report JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------

namespace {

std::string number(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

template <typename T>
std::string optional_number(const std::optional<T>& v, int digits) {
    return v ? number(static_cast<double>(*v), digits) : kUndefined;
}

std::vector<std::string> summary_row(const StructureReport& r, int digits) {
    return {
        r.name,
        r.degree_class ? std::string(to_string(*r.degree_class)) : kUndefined,
        small_world_label(r.small_world),
        r.assortativity_class ? std::string(to_string(*r.assortativity_class)) : kUndefined,
        std::to_string(r.nodes),
        std::to_string(r.edges),
        r.power_law ? number(r.power_law->ssr, digits) : kUndefined,
        r.power_law ? number(r.power_law->aic, digits) : kUndefined,
        r.two_regime ? number(r.two_regime->ssr, digits) : kUndefined,
        r.two_regime ? number(r.two_regime->aic, digits) : kUndefined,
        number(r.cc, digits),
        optional_number(r.er_cc, digits),
        optional_number(r.dac, digits),
    };
}

const std::vector<std::string> kColumns = {
    "network", "degree_distribution", "small_worldness", "assortativity", "nodes", "edges",
    "power_law_ssr", "power_law_aic", "two_regime_ssr", "two_regime_aic", "cc", "er_cc", "dac"};

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// display width counting each UTF-8 sequence as one column (CJK names render wider,
// which only affects alignment)
std::size_t display_width(const std::string& s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
        return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
    }));
}

}  // namespace

SummaryTable emit_summary_table(std::span<const StructureReport> reports) {
    if (reports.empty()) throw InvalidArgument("summary table needs at least one report");

    std::vector<std::vector<std::string>> text_rows{kColumns};
    SummaryTable table;
    for (std::size_t c = 0; c < kColumns.size(); ++c) table.csv += (c ? "," : "") + kColumns[c];
    table.csv += '\n';
    for (const auto& r : reports) {
        text_rows.push_back(summary_row(r, 6));
        const auto full = summary_row(r, 17);
        for (std::size_t c = 0; c < full.size(); ++c) table.csv += (c ? "," : "") + csv_field(full[c]);
        table.csv += '\n';
    }

    std::vector<std::size_t> width(kColumns.size(), 0);
    for (const auto& row : text_rows) {
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], display_width(row[c]));
    }
    auto rule = [&] {
        std::string line = "+";
        for (auto w : width) line += std::string(w + 2, '-') + "+";
        return line + "\n";
    };
    table.text = rule();
    for (std::size_t i = 0; i < text_rows.size(); ++i) {
        std::string line = "|";
        for (std::size_t c = 0; c < text_rows[i].size(); ++c) {
            const auto& cell = text_rows[i][c];
            line += " " + cell + std::string(width[c] - display_width(cell), ' ') + " |";
        }
        table.text += line + "\n";
        if (i == 0) table.text += rule();
    }
    table.text += rule();
    return table;
}

}  // namespace lexnet

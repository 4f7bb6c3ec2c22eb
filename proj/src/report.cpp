#include "andova/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "andova/error.hpp"

namespace andova {

namespace {

using nlohmann::json;

// Non-finite doubles are stored as strings so the document stays valid JSON.
json num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double get_num(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw InputError("expected a number in report, got " + j.dump());
}

json opt_num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

std::optional<double> get_opt_num(const json& j) {
    if (j.is_null()) return std::nullopt;
    return get_num(j);
}

std::string fmt(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string hex_color(double r, double g, double b) {
    auto c = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c(r), c(g), c(b));
    return buf;
}

template <class Color>
std::string tree_svg(const PosteriorReport& report, const std::string& title, Color color,
                     const std::string& legend) {
    constexpr double width = 960.0;
    constexpr double row = 28.0;
    constexpr double left = 60.0;
    constexpr double top = 40.0;
    const double plot_w = width - left - 20.0;
    const double span = report.omega_hi - report.omega_lo;
    const int levels = report.depth;
    const double height = top + row * levels + 60.0;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
    for (const auto& w : report.windows) {
        const double x0 = left + plot_w * (w.lo - report.omega_lo) / span;
        const double x1 = left + plot_w * (w.hi - report.omega_lo) / span;
        // Levels shrink toward the bottom, giving the triangular look of a dyadic tree.
        const double shrink = 1.0 - 0.6 * w.level / std::max(1, levels);
        const double y = top + row * w.level;
        const double h = row * shrink;
        out << "<rect x=\"" << fmt(x0, 8) << "\" y=\"" << fmt(y, 8) << "\" width=\"" << fmt(std::max(x1 - x0, 0.2), 8)
            << "\" height=\"" << fmt(h, 8) << "\" fill=\"" << color(w) << "\" stroke=\"#999\" stroke-width=\""
            << (w.level < 6 ? "0.5" : "0") << "\"><title>level " << w.level << " [" << fmt(w.lo) << ", "
            << fmt(w.hi) << ") PMAP " << fmt(w.pmap, 4) << "</title></rect>\n";
    }
    for (int j = 0; j < levels; ++j)
        out << "<text x=\"8\" y=\"" << fmt(top + row * j + 14, 8) << "\">level " << j << "</text>\n";
    const double axis_y = top + row * levels + 12;
    for (int i = 0; i <= 4; ++i) {
        const double v = report.omega_lo + span * i / 4.0;
        out << "<text x=\"" << fmt(left + plot_w * i / 4.0, 8) << "\" y=\"" << fmt(axis_y, 8)
            << "\" text-anchor=\"middle\">" << fmt(v, 4) << "</text>\n";
    }
    out << "<text x=\"" << left << "\" y=\"" << fmt(axis_y + 22, 8) << "\">" << xml_escape(legend) << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace

std::string tool_version() { return "0.1.0"; }

json config_to_json(const FitConfig& c) {
    json j;
    j["omega"] = c.omega ? json::array({num(c.omega->first), num(c.omega->second)}) : json(nullptr);
    j["depth"] = c.depth;
    j["split_rule"] = c.split_rule.kind == SplitRule::Kind::midpoint ? "midpoint" : "quantile";
    j["nu_grid"] = {{"points", c.nu_points}, {"lo_exp", c.nu_lo_exp}, {"hi_exp", c.nu_hi_exp}};
    j["prior0"] = {c.prior0.shape1, c.prior0.shape2};
    j["prior1"] = {c.prior1.shape1, c.prior1.shape2};
    j["beta"] = c.level_prior.beta;
    j["delta"] = c.level_prior.delta;
    j["root_alt"] = opt_num(c.level_prior.root_alt);
    j["restrict_nu_infinity"] = c.restrict_nu_infinity;
    j["fdr_target"] = c.fdr_target;
    j["fixed_threshold"] = opt_num(c.fixed_threshold);
    return j;
}

FitConfig config_from_json(const json& j) {
    try {
        FitConfig c;
        if (!j.at("omega").is_null()) c.omega = std::pair{get_num(j["omega"].at(0)), get_num(j["omega"].at(1))};
        c.depth = j.at("depth").get<int>();
        if (j.at("split_rule").get<std::string>() != "midpoint")
            throw InputError("only the midpoint split rule can be restored from a report");
        c.nu_points = j.at("nu_grid").at("points").get<int>();
        c.nu_lo_exp = j["nu_grid"].at("lo_exp").get<double>();
        c.nu_hi_exp = j["nu_grid"].at("hi_exp").get<double>();
        c.prior0 = {j.at("prior0").at(0).get<double>(), j["prior0"].at(1).get<double>()};
        c.prior1 = {j.at("prior1").at(0).get<double>(), j["prior1"].at(1).get<double>()};
        c.level_prior.beta = j.at("beta").get<double>();
        c.level_prior.delta = j.at("delta").get<double>();
        c.level_prior.root_alt = get_opt_num(j.at("root_alt"));
        c.restrict_nu_infinity = j.at("restrict_nu_infinity").get<bool>();
        c.fdr_target = j.at("fdr_target").get<double>();
        c.fixed_threshold = get_opt_num(j.at("fixed_threshold"));
        return c;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed config: ") + e.what());
    }
}

PosteriorReport make_report(const FitResult& fit, const Dataset& data, const FitConfig& config) {
    PosteriorReport r;
    r.tool_version = tool_version();
    r.config = config_to_json(config);
    for (const auto& g : data.groups) {
        GroupLabels labels{g.label, {}};
        for (const auto& rep : g.replicates) labels.replicates.push_back(rep.label);
        r.groups.push_back(std::move(labels));
    }
    r.omega_lo = fit.tree.omega_lo();
    r.omega_hi = fit.tree.omega_hi();
    r.depth = fit.tree.max_depth();
    const auto& pmap = fit.pmap();
    for (std::size_t t = 0; t < fit.window_count(); ++t) {
        const Window& w = fit.tree[t];
        r.windows.push_back({t, w.level, w.index_in_level, w.lo, w.hi, pmap[t], fit.prior_marginals.alt_prob[t],
                             fit.evidence[t].log_bf, fit.evidence[t].degenerate, fit.effect[t]});
    }
    r.pjap = fit.pjap();
    r.prjap = fit.prior_marginals.joint_alt();
    r.log_joint_null = fit.log_joint_null();
    r.threshold = fit.decision.threshold;
    r.target_fdr = fit.decision.target_fdr;
    r.achieved_fdr = fit.decision.achieved_fdr;
    r.significant = fit.decision.significant;
    return r;
}

json to_json(const PosteriorReport& r) {
    json j;
    j["schema_version"] = r.schema_version;
    j["tool_version"] = r.tool_version;
    j["config"] = r.config;
    json groups = json::array();
    for (const auto& g : r.groups) groups.push_back({{"label", g.label}, {"replicates", g.replicates}});
    j["groups"] = groups;
    j["omega"] = {num(r.omega_lo), num(r.omega_hi)};
    j["depth"] = r.depth;
    json windows = json::array();
    for (const auto& w : r.windows) {
        json effect = json::array();
        for (double e : w.effect) effect.push_back(num(e));
        windows.push_back({{"window", w.window},
                           {"level", w.level},
                           {"index", w.index},
                           {"lo", num(w.lo)},
                           {"hi", num(w.hi)},
                           {"pmap", num(w.pmap)},
                           {"prmap", num(w.prmap)},
                           {"log_bf", num(w.log_bf)},
                           {"degenerate", w.degenerate},
                           {"effect", effect}});
    }
    j["windows"] = windows;
    j["pjap"] = num(r.pjap);
    j["prjap"] = num(r.prjap);
    j["log_joint_null"] = num(r.log_joint_null);
    j["decision"] = {{"threshold", num(r.threshold)},
                     {"target_fdr", opt_num(r.target_fdr)},
                     {"achieved_fdr", opt_num(r.achieved_fdr)},
                     {"significant", r.significant}};
    if (r.sampler) {
        json theta = json::array();
        for (const auto& row : r.sampler->theta_mean) {
            json vals = json::array();
            for (double v : row) vals.push_back(num(v));
            theta.push_back(vals);
        }
        j["sampler"] = {{"seed", r.sampler->seed},
                        {"draws", r.sampler->draws},
                        {"clamped_draws", r.sampler->clamped_draws},
                        {"state_frequency", r.sampler->state_frequency},
                        {"theta_mean", theta}};
    } else {
        j["sampler"] = nullptr;
    }
    return j;
}

PosteriorReport report_from_json(const json& j) {
    try {
        PosteriorReport r;
        r.schema_version = j.at("schema_version").get<int>();
        if (r.schema_version != kReportSchemaVersion)
            throw InputError("unsupported report schema version " + std::to_string(r.schema_version));
        r.tool_version = j.at("tool_version").get<std::string>();
        r.config = j.at("config");
        for (const auto& g : j.at("groups"))
            r.groups.push_back({g.at("label").get<std::string>(), g.at("replicates").get<std::vector<std::string>>()});
        r.omega_lo = get_num(j.at("omega").at(0));
        r.omega_hi = get_num(j["omega"].at(1));
        r.depth = j.at("depth").get<int>();
        for (const auto& w : j.at("windows")) {
            WindowReport wr;
            wr.window = w.at("window").get<std::size_t>();
            wr.level = w.at("level").get<int>();
            wr.index = w.at("index").get<std::int64_t>();
            wr.lo = get_num(w.at("lo"));
            wr.hi = get_num(w.at("hi"));
            wr.pmap = get_num(w.at("pmap"));
            wr.prmap = get_num(w.at("prmap"));
            wr.log_bf = get_num(w.at("log_bf"));
            wr.degenerate = w.at("degenerate").get<bool>();
            for (const auto& e : w.at("effect")) wr.effect.push_back(get_num(e));
            r.windows.push_back(std::move(wr));
        }
        r.pjap = get_num(j.at("pjap"));
        r.prjap = get_num(j.at("prjap"));
        r.log_joint_null = get_num(j.at("log_joint_null"));
        const auto& d = j.at("decision");
        r.threshold = get_num(d.at("threshold"));
        r.target_fdr = get_opt_num(d.at("target_fdr"));
        r.achieved_fdr = get_opt_num(d.at("achieved_fdr"));
        r.significant = d.at("significant").get<std::vector<std::size_t>>();
        if (j.contains("sampler") && !j["sampler"].is_null()) {
            const auto& s = j["sampler"];
            SamplerSummary sm;
            sm.seed = s.at("seed").get<std::uint64_t>();
            sm.draws = s.at("draws").get<int>();
            sm.clamped_draws = s.at("clamped_draws").get<int>();
            for (const auto& v : s.at("state_frequency")) sm.state_frequency.push_back(get_num(v));
            for (const auto& row : s.at("theta_mean")) {
                std::vector<double> vals;
                for (const auto& v : row) vals.push_back(get_num(v));
                sm.theta_mean.push_back(std::move(vals));
            }
            r.sampler = std::move(sm);
        }
        return r;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed report: ") + e.what());
    }
}

std::string csv_summary(const PosteriorReport& r) {
    std::ostringstream out;
    out << "window,level,index,lo,hi,pmap,prmap,log_bf,degenerate,significant";
    for (const auto& g : r.groups) out << ",effect_" << g.label;
    out << '\n';
    for (const auto& w : r.windows) {
        const bool sig = std::binary_search(r.significant.begin(), r.significant.end(), w.window);
        out << w.window << ',' << w.level << ',' << w.index << ',' << full(w.lo) << ',' << full(w.hi) << ','
            << full(w.pmap) << ',' << full(w.prmap) << ',' << full(w.log_bf) << ',' << (w.degenerate ? 1 : 0)
            << ',' << (sig ? 1 : 0);
        for (double e : w.effect) out << ',' << full(e);
        out << '\n';
    }
    return out.str();
}

std::string pmap_tree_svg(const PosteriorReport& r) {
    auto color = [](const WindowReport& w) {
        if (w.degenerate) return std::string("#eeeeee");
        return hex_color(1.0, 1.0 - w.pmap, 1.0 - w.pmap);
    };
    return tree_svg(r, "PMAP by window (PJAP " + fmt(r.pjap, 4) + ")", color,
                    "white = 0, red = 1; grey = data from at most one group");
}

std::string effect_tree_svg(const PosteriorReport& r, std::size_t group) {
    if (group >= r.groups.size()) throw InputError("effect plot group index out of range");
    double scale = 0.0;
    for (const auto& w : r.windows) scale = std::max(scale, std::abs(w.effect.at(group)));
    if (scale == 0.0) scale = 1.0;
    auto color = [&](const WindowReport& w) {
        const double e = w.effect.at(group) / scale;
        return e >= 0 ? hex_color(1.0, 1.0 - e, 1.0 - e) : hex_color(1.0 + e, 1.0 + e, 1.0);
    };
    return tree_svg(r, "Effect size, group " + r.groups[group].label, color,
                    "blue = " + fmt(-scale, 3) + ", white = 0, red = " + fmt(scale, 3));
}

}  // namespace andova

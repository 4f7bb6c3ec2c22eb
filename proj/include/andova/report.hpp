#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "andova/fit.hpp"
#include "andova/partition.hpp"

namespace andova {

inline constexpr int kReportSchemaVersion = 1;
std::string tool_version();

nlohmann::json config_to_json(const FitConfig& config);
// Inverse of config_to_json; a quantile split rule cannot be restored and is rejected.
FitConfig config_from_json(const nlohmann::json& j);

struct GroupLabels {
    std::string label;
    std::vector<std::string> replicates;
    bool operator==(const GroupLabels&) const = default;
};

struct WindowReport {
    std::size_t window = 0;  // heap index
    int level = 0;
    std::int64_t index = 0;  // index within level
    double lo = 0.0;
    double hi = 0.0;
    double pmap = 0.0;
    double prmap = 0.0;
    double log_bf = 0.0;
    bool degenerate = false;
    std::vector<double> effect;  // per group
    bool operator==(const WindowReport&) const = default;
};

struct PosteriorReport {
    int schema_version = kReportSchemaVersion;
    std::string tool_version;
    nlohmann::json config;
    std::vector<GroupLabels> groups;
    double omega_lo = 0.0;
    double omega_hi = 0.0;
    int depth = 0;
    std::vector<WindowReport> windows;
    double pjap = 0.0;
    double prjap = 0.0;
    double log_joint_null = 0.0;
    double threshold = 0.5;
    std::optional<double> target_fdr;
    std::optional<double> achieved_fdr;
    std::vector<std::size_t> significant;
    std::optional<SamplerSummary> sampler;
    bool operator==(const PosteriorReport&) const = default;
};

PosteriorReport make_report(const FitResult& fit, const Dataset& data, const FitConfig& config);

nlohmann::json to_json(const PosteriorReport& report);
PosteriorReport report_from_json(const nlohmann::json& j);

// One row per window: heap index, level, interval, PMAP, PrMAP, log BF, flags, effects.
std::string csv_summary(const PosteriorReport& report);

// Triangular level layout; each window is a cell shaded by its PMAP.
std::string pmap_tree_svg(const PosteriorReport& report);
// Same layout shaded by one group's effect size on a diverging scale.
std::string effect_tree_svg(const PosteriorReport& report, std::size_t group);

}  // namespace andova

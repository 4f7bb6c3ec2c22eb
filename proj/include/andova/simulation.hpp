#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "andova/fit.hpp"
#include "andova/partition.hpp"

namespace andova {

enum class Scenario { null, local_shift, local_dispersion, global_shift, global_dispersion };

std::string to_string(Scenario s);
Scenario parse_scenario(std::string_view name);

struct NormalComponent {
    double mean = 0.0;
    double sd = 1.0;
    bool operator==(const NormalComponent&) const = default;
};

using Centroid = std::array<NormalComponent, 3>;

Centroid null_centroid();
// Group-2 centroid of a scenario; the null centroid for Scenario::null.
Centroid scenario_centroid(Scenario s);

inline constexpr double kSimulationOmegaLo = 0.0;
inline constexpr double kSimulationOmegaHi = 3.2;

struct ScenarioSpec {
    Scenario scenario = Scenario::null;
    int groups = 2;
    int replicates = 4;          // per group
    std::int64_t n = 500;        // total observations per group
    std::uint64_t seed = 1;
    bool equal_logits = false;   // test hook: Z_ij1 = Z_ij2 = Z_ij3

    void validate() const;
};

struct SimulatedDataset {
    Dataset data;
    std::vector<Centroid> centroids;                           // per group
    std::vector<std::vector<std::array<double, 3>>> weights;   // [group][replicate]
};

SimulatedDataset simulate(const ScenarioSpec& spec);
Dataset generate(const ScenarioSpec& spec);

// Independent seed for (stream, run) pairs derived from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t run);

// Rank-formula AUC; the alternative is declared for smaller statistic values.
// Ties count one half.
double auc_lower_is_alt(std::span<const double> null_stats, std::span<const double> alt_stats);

struct MethodRoc {
    std::vector<double> null_stats;
    std::map<Scenario, std::vector<double>> alt_stats;
    std::map<Scenario, double> auc;
};

struct RocRecord {
    int run = 0;
    Scenario scenario = Scenario::null;
    std::string method;
    double statistic = 0.0;       // 1 - PJAP
    double log_statistic = 0.0;   // log(1 - PJAP)
};

struct RocResult {
    // Keyed by method name: "andova" and "nu_infinity".
    std::map<std::string, MethodRoc> methods;
    std::vector<RocRecord> records;
};

// Runs n_runs null datasets and n_runs datasets per alternative scenario, fitting
// graphical ANDOVA and its nu = infinity restriction to each. Statistics are stored
// as log(1 - PJAP) so that near-zero values keep their ordering.
RocResult run_roc(int n_runs, std::span<const Scenario> alternatives, const ScenarioSpec& base,
                  const FitConfig& config,
                  const std::function<void(const RocRecord&)>& on_record = {});

}  // namespace andova

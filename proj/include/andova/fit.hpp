#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "andova/beta_binomial.hpp"
#include "andova/decision.hpp"
#include "andova/markov_tree.hpp"
#include "andova/partition.hpp"

namespace andova {

struct FitConfig {
    std::optional<std::pair<double, double>> omega;  // default: padded data range
    int depth = 11;                                  // partition depth K (K + 1 levels)
    SplitRule split_rule = SplitRule::midpoint();
    int nu_points = 50;
    double nu_lo_exp = -1.0;
    double nu_hi_exp = 4.0;
    BetaPrior prior0;
    BetaPrior prior1;
    LevelPrior level_prior;
    bool restrict_nu_infinity = false;
    double fdr_target = 0.1;
    std::optional<double> fixed_threshold;  // overrides the FDR-calibrated threshold
    int threads = 1;

    void validate() const;
    NuGrid grid() const;
};

// Graphical ms-BB fit over the split-bearing windows (heap indices 0 .. 2^K - 2).
struct FitResult {
    WindowTree tree;
    CountTree counts;
    NuGrid grid;
    std::vector<WindowEvidence> evidence;
    TransitionSpec prior;
    TreePosterior posterior;
    Marginals prior_marginals;
    std::vector<std::vector<double>> effect;  // [window][group]
    DecisionReport decision;

    std::size_t window_count() const { return evidence.size(); }
    const std::vector<double>& pmap() const { return posterior.marginals.alt_prob; }
    double pjap() const { return posterior.marginals.joint_alt(); }
    double log_joint_null() const { return posterior.marginals.log_joint_null; }
};

FitResult fit_graphical(const Dataset& data, const FitConfig& config);

// Monte Carlo summary of joint posterior draws of states and parameters.
struct SamplerSummary {
    std::uint64_t seed = 0;
    int draws = 0;
    std::vector<double> state_frequency;          // empirical PMAP per window
    std::vector<std::vector<double>> theta_mean;  // [window][group]
    int clamped_draws = 0;
    bool operator==(const SamplerSummary&) const = default;
};

SamplerSummary summarize_draws(const FitResult& fit, const FitConfig& config, int draws, std::uint64_t seed);

}  // namespace andova

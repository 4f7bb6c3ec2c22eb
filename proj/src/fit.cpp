#include "andova/fit.hpp"

#include "andova/error.hpp"
#include "andova/ms_bb.hpp"
#include "andova/posterior_sampler.hpp"

namespace andova {

void FitConfig::validate() const {
    if (depth < 1 || depth > 24) throw InputError("depth must lie in [1, 24]");
    if (omega && !(omega->first < omega->second)) throw InputError("omega must satisfy lo < hi");
    prior0.validate();
    prior1.validate();
    level_prior.validate();
    if (!(fdr_target > 0.0 && fdr_target < 1.0)) throw InputError("FDR target must lie in (0, 1)");
    if (fixed_threshold && !(*fixed_threshold >= 0.0 && *fixed_threshold <= 1.0))
        throw InputError("threshold must lie in [0, 1]");
    if (!restrict_nu_infinity) (void)grid();
}

NuGrid FitConfig::grid() const {
    return restrict_nu_infinity ? NuGrid::infinite()
                                : NuGrid::log10_uniform(nu_points, nu_lo_exp, nu_hi_exp);
}

FitResult fit_graphical(const Dataset& data, const FitConfig& config) {
    config.validate();
    data.validate_design();
    const auto [lo, hi] = config.omega.value_or(default_omega(data));
    WindowTree tree = build_ndp(lo, hi, config.depth, config.split_rule);
    CountTree counts = bin_counts(tree, data);
    NuGrid grid = config.grid();

    auto evidence = evidence_tree(counts, grid, config.prior0, config.prior1, config.threads);
    std::vector<NodeEvidence> nodes(evidence.size());
    for (std::size_t t = 0; t < evidence.size(); ++t)
        nodes[t] = {evidence[t].log_bf, evidence[t].degenerate};

    TransitionSpec prior = TransitionSpec::level_rule(config.depth - 1, config.level_prior);
    TreePosterior posterior = solve_tree(nodes, prior);
    Marginals prior_marg = prior_marginals(prior);

    std::vector<std::vector<double>> effect(evidence.size());
    for (std::size_t t = 0; t < evidence.size(); ++t)
        effect[t] = effect_size(evidence[t], grid, posterior.marginals.alt_prob[t]);

    const auto& pmaps = posterior.marginals.alt_prob;
    DecisionReport decision = config.fixed_threshold ? decide_fixed(pmaps, *config.fixed_threshold)
                                                     : decide_fdr(pmaps, config.fdr_target);

    return FitResult{std::move(tree),     std::move(counts),    std::move(grid),
                     std::move(evidence), std::move(prior),     std::move(posterior),
                     std::move(prior_marg), std::move(effect),  std::move(decision)};
}

SamplerSummary summarize_draws(const FitResult& fit, const FitConfig& config, int draws, std::uint64_t seed) {
    if (draws < 1) throw InputError("number of posterior draws must be positive");
    const std::size_t n = fit.window_count();
    const std::size_t k = fit.counts.group_count();
    SamplerSummary out{seed, draws, std::vector<double>(n, 0.0),
                       std::vector<std::vector<double>>(n, std::vector<double>(k, 0.0)), 0};
    Rng rng(seed);
    for (int d = 0; d < draws; ++d) {
        const auto states = sample_states(fit.posterior.transitions, rng);
        const auto draw = sample_params(states, fit.evidence, fit.grid, fit.counts, config.prior0, config.prior1, rng);
        for (std::size_t t = 0; t < n; ++t) {
            out.state_frequency[t] += states[t];
            for (std::size_t i = 0; i < k; ++i) out.theta_mean[t][i] += draw.theta_group[t][i];
        }
        out.clamped_draws += draw.clamped ? 1 : 0;
    }
    for (std::size_t t = 0; t < n; ++t) {
        out.state_frequency[t] /= draws;
        for (auto& v : out.theta_mean[t]) v /= draws;
    }
    return out;
}

}  // namespace andova

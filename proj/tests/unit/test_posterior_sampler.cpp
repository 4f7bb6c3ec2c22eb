#include <gtest/gtest.h>

#include <cmath>

#include "andova/fit.hpp"
#include "andova/posterior_sampler.hpp"
#include "andova/simulation.hpp"

using namespace andova;

namespace {

PosteriorTransitions depth_two_posterior() {
    const auto spec = TransitionSpec::level_rule(2, LevelPrior{0.6, 0.5, std::nullopt});
    std::vector<NodeEvidence> ev{{1.0, false}, {-0.5, false}, {2.0, false}, {0.3, false},
                                 {-1.5, false}, {0.8, false}, {-0.2, false}};
    return solve_tree(ev, spec).transitions;
}

FitResult small_fit(FitConfig& config) {
    ScenarioSpec spec;
    spec.scenario = Scenario::local_shift;
    spec.n = 300;
    spec.seed = 4;
    config.depth = 5;
    config.omega = {kSimulationOmegaLo, kSimulationOmegaHi};
    return fit_graphical(generate(spec), config);
}

}  // namespace

TEST(SampleStates, NoAltMassGivesAllNull) {
    PosteriorTransitions p;
    p.matrices.assign(7, Matrix2{{{1.0, 0.0}, {0.2, 0.8}}});
    p.matrices[0] = Matrix2{{{1.0, 0.0}, {1.0, 0.0}}};
    p.log_stay_null.assign(7, 0.0);
    Rng rng(1);
    for (int i = 0; i < 1000; ++i)
        for (auto s : sample_states(p, rng)) ASSERT_EQ(s, 0);
}

TEST(SampleStates, EmpiricalPmapWithinThreeStandardErrors) {
    const auto post = depth_two_posterior();
    const auto analytic = downward_marginals(post).alt_prob;
    constexpr int draws = 100000;
    std::vector<int> hits(post.matrices.size(), 0);
    Rng rng(2024);
    for (int d = 0; d < draws; ++d) {
        const auto s = sample_states(post, rng);
        for (std::size_t t = 0; t < s.size(); ++t) hits[t] += s[t];
    }
    for (std::size_t t = 0; t < hits.size(); ++t) {
        const double p = analytic[t];
        const double se = std::sqrt(p * (1 - p) / draws);
        EXPECT_NEAR(static_cast<double>(hits[t]) / draws, p, 3 * se) << t;
    }
}

TEST(SampleStates, FixedSeedIsReproducible) {
    const auto post = depth_two_posterior();
    Rng a(99), b(99);
    for (int i = 0; i < 200; ++i) ASSERT_EQ(sample_states(post, a), sample_states(post, b));
}

TEST(ReplicatePosterior, EmptyReplicateKeepsPrior) {
    const auto r = replicate_posterior(0.37, 12.5, 0, 0);
    EXPECT_EQ(r.theta, 0.37);
    EXPECT_EQ(r.nu, 12.5);
}

TEST(ReplicatePosterior, ConjugateUpdate) {
    const auto r = replicate_posterior(0.4, 10.0, 7, 20);
    EXPECT_DOUBLE_EQ(r.theta, (4.0 + 7.0) / 30.0);
    EXPECT_DOUBLE_EQ(r.nu, 30.0);
}

TEST(SampleBeta, MeanMatchesUpdatedTheta) {
    const auto r = replicate_posterior(0.3, 4.0, 9, 12);
    constexpr int draws = 100000;
    Rng rng(7);
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) sum += sample_beta(r.theta * r.nu, (1 - r.theta) * r.nu, rng);
    const double var = r.theta * (1 - r.theta) / (r.nu + 1);
    EXPECT_NEAR(sum / draws, r.theta, 3 * std::sqrt(var / draws));
}

TEST(SampleBeta, SmallShapesStayInside) {
    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
        const double x = sample_beta(0.01, 0.02, rng);
        ASSERT_GT(x, 0.0);
        ASSERT_LT(x, 1.0);
    }
}

TEST(SampleUnitNormal, ClampsAfterRejectionBudget) {
    Rng rng(5);
    bool clamped = false;
    const double x = sample_unit_normal(-50.0, 0.01, rng, clamped);
    EXPECT_TRUE(clamped);
    EXPECT_GT(x, 0.0);
    EXPECT_LT(x, 1.0);
}

TEST(SampleParams, NullWindowsShareTheta) {
    FitConfig config;
    const auto fit = small_fit(config);
    Rng rng(11);
    for (int d = 0; d < 200; ++d) {
        const auto s = sample_states(fit.posterior.transitions, rng);
        const auto draw =
            sample_params(s, fit.evidence, fit.grid, fit.counts, config.prior0, config.prior1, rng);
        for (std::size_t t = 0; t < s.size(); ++t) {
            if (s[t]) continue;
            for (double th : draw.theta_group[t]) ASSERT_EQ(th, draw.theta_group[t][0]);
        }
    }
}

TEST(SampleParams, NuDrawsComeFromGrid) {
    FitConfig config;
    const auto fit = small_fit(config);
    const auto draw = sample_posterior(fit.posterior.transitions, fit.evidence, fit.grid, fit.counts,
                                       config.prior0, config.prior1, 17);
    const auto pts = fit.grid.points();
    for (double nu : draw.nu) EXPECT_NE(std::find(pts.begin(), pts.end(), nu), pts.end());
}

TEST(SampleParams, RestrictedModelHasInfiniteNu) {
    FitConfig config;
    config.restrict_nu_infinity = true;
    const auto fit = small_fit(config);
    const auto draw = sample_posterior(fit.posterior.transitions, fit.evidence, fit.grid, fit.counts,
                                       config.prior0, config.prior1, 17);
    for (double nu : draw.nu) EXPECT_TRUE(std::isinf(nu));
}

TEST(SampleParams, FixedSeedIsReproducible) {
    FitConfig config;
    const auto fit = small_fit(config);
    const auto a = summarize_draws(fit, config, 50, 123);
    const auto b = summarize_draws(fit, config, 50, 123);
    EXPECT_EQ(a, b);
    const auto c = summarize_draws(fit, config, 50, 124);
    EXPECT_NE(a.theta_mean, c.theta_mean);
}

TEST(SummarizeDraws, FrequenciesTrackPmap) {
    FitConfig config;
    const auto fit = small_fit(config);
    const auto s = summarize_draws(fit, config, 4000, 1);
    for (std::size_t t = 0; t < fit.window_count(); ++t) {
        const double p = fit.pmap()[t];
        EXPECT_NEAR(s.state_frequency[t], p, 5 * std::sqrt(p * (1 - p) / 4000) + 1e-12) << t;
    }
}

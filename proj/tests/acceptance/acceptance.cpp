// Acceptance checks. Usage: andova_acceptance [criterion ...]   (default: all)
// Prints one PASS/FAIL line per criterion; exit status 1 if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "andova/beta_binomial.hpp"
#include "andova/decision.hpp"
#include "andova/fit.hpp"
#include "andova/markov_tree.hpp"
#include "andova/posterior_sampler.hpp"
#include "andova/simulation.hpp"
#include "oracles/oracles.hpp"
#include "property/invariants.hpp"

using namespace andova;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------- 1

Outcome message_passing_exactness() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u01(0.0, 1.0), ubf(-3.0, 3.0);
    double worst = 0.0;
    for (int tree = 0; tree < 200; ++tree) {
        const int depth = std::uniform_int_distribution<int>(0, 2)(rng);
        std::vector<Matrix2> m((std::size_t{2} << depth) - 1);
        for (auto& x : m)
            for (auto& row : x) {
                const double p = u01(rng);
                row = {1.0 - p, p};
            }
        m[0][1] = m[0][0];
        std::vector<double> lbf(m.size());
        std::vector<NodeEvidence> ev(m.size());
        for (std::size_t t = 0; t < m.size(); ++t) ev[t].log_bf = lbf[t] = ubf(rng);
        const auto post = solve_tree(ev, TransitionSpec(m));
        const auto exact = oracle::enumerate_tree(m, lbf);
        for (std::size_t t = 0; t < m.size(); ++t) {
            worst = std::max(worst, std::abs(post.marginals.alt_prob[t] - exact.pmap[t]));
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    worst = std::max(worst, std::abs(post.transitions.matrices[t][r][c] - exact.transitions[t][r][c]));
        }
        worst = std::max(worst, std::abs(post.marginals.joint_alt() - exact.pjap));
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-10 && secs < 10.0,
            fmt("200 trees, max |error| %.2e (limit 1e-10), %.2f s (limit 10 s)", worst, secs)};
}

// ---------------------------------------------------------------- 2

Outcome quadrature_fidelity() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(202);
    const auto grid = NuGrid::log10_uniform(50);
    double worst_all = 0.0, worst_large = 0.0;
    int large = 0, over_all = 0, over_large = 0;
    for (int w = 0; w < 50; ++w) {
        GroupSplitCounts c(2);
        for (auto& g : c)
            for (int j = 0; j < 2; ++j) {
                const std::int64_t n = std::uniform_int_distribution<std::int64_t>(0, 200)(rng);
                const std::int64_t l = std::uniform_int_distribution<std::int64_t>(0, n)(rng);
                g.push_back({l, n - l});
            }
        const auto ev = window_evidence(c, grid);
        const auto ref = oracle::tensor_evidence(c, 2000, 500);
        const double err = std::abs(ev.log_bf - ref.log_bf);
        worst_all = std::max(worst_all, err);
        over_all += err > 0.1;
        const bool every_cell_large = c[0][0].total() + c[0][1].total() >= 50 && c[1][0].total() + c[1][1].total() >= 50;
        if (every_cell_large) {
            ++large;
            worst_large = std::max(worst_large, err);
            over_large += err > 0.02;
        }
    }
    const double secs = seconds_since(t0);
    return {over_all == 0 && over_large == 0 && secs < 60.0,
            fmt("50 windows: max |dlogBF| %.3f (limit 0.1, %d over); %d with all cells >= 50: max %.3f "
                "(limit 0.02, %d over); %.1f s (limit 60 s)",
                worst_all, over_all, large, worst_large, over_large, secs)};
}

// ---------------------------------------------------------------- 3, 4

struct RocRun {
    RocResult result;
    double seconds = 0.0;
};

const RocRun& roc_run() {
    static std::optional<RocRun> cached;
    if (!cached) {
        const auto t0 = Clock::now();
        ScenarioSpec base;
        base.n = 500;
        base.replicates = 4;
        base.seed = 2024;
        FitConfig config;
        config.depth = 11;
        config.level_prior = LevelPrior{0.07, 0.4, std::nullopt};
        config.threads = 0;
        const std::vector<Scenario> alts{Scenario::local_shift, Scenario::local_dispersion};
        RocRun r;
        r.result = run_roc(100, alts, base, config);
        r.seconds = seconds_since(t0);
        cached = std::move(r);
    }
    return *cached;
}

std::vector<double> exp_all(const std::vector<double>& v) {
    std::vector<double> out;
    for (double x : v) out.push_back(std::exp(x));
    return out;
}

Outcome null_calibration() {
    const auto& r = roc_run();
    const double andova = median(exp_all(r.result.methods.at("andova").null_stats));
    const double restricted = median(exp_all(r.result.methods.at("nu_infinity").null_stats));
    return {andova >= 0.45 && andova <= 0.85 && restricted <= 0.1 && r.seconds < 30 * 60,
            fmt("median 1-PJAP: ANDOVA %.3f (want [0.45, 0.85]), nu=inf %.3g (want <= 0.1); ROC harness %.0f s",
                andova, restricted, r.seconds)};
}

Outcome discrimination_ordering() {
    const auto& r = roc_run();
    bool ok = r.seconds < 60 * 60;
    std::string detail;
    for (Scenario s : {Scenario::local_shift, Scenario::local_dispersion}) {
        const double a = r.result.methods.at("andova").auc.at(s);
        const double b = r.result.methods.at("nu_infinity").auc.at(s);
        ok = ok && a > b && a >= 0.75;
        detail += fmt("%s AUC ANDOVA %.3f vs nu=inf %.3f; ", to_string(s).c_str(), a, b);
    }
    return {ok, detail + "want ANDOVA > nu=inf and ANDOVA >= 0.75"};
}

// ---------------------------------------------------------------- 5

struct RegionMax {
    double inside = -1.0;
    double outside = -1.0;
    int outside_called = 0;  // windows outside the region with PMAP > 0.5
};

RegionMax region_max(const FitResult& fit) {
    RegionMax m;
    for (std::size_t t = 0; t < fit.window_count(); ++t) {
        const auto& w = fit.tree[t];
        if (w.level < 3) continue;
        const bool hits = w.lo < 1.2 && w.hi > 0.9;
        double& slot = hits ? m.inside : m.outside;
        slot = std::max(slot, fit.pmap()[t]);
        if (!hits && fit.pmap()[t] > 0.5) ++m.outside_called;
    }
    return m;
}

Outcome localization() {
    FitConfig config;
    config.omega = {kSimulationOmegaLo, kSimulationOmegaHi};
    config.threads = 0;
    FitConfig restricted = config;
    restricted.restrict_nu_infinity = true;

    ScenarioSpec spec;
    spec.scenario = Scenario::local_shift;
    spec.seed = 1;
    const auto fixed = region_max(fit_graphical(generate(spec), config));
    const bool localized = fixed.inside >= fixed.outside;

    int false_positive = 0, called_outside = 0;
    for (int s = 0; s < 20; ++s) {
        spec.seed = derive_seed(505, 0, static_cast<std::uint64_t>(s));
        const auto m = region_max(fit_graphical(generate(spec), restricted));
        false_positive += m.outside > m.inside;
        called_outside += m.outside_called > 0;
    }
    return {localized && false_positive >= 6,
            fmt("seed 1: max PMAP (level >= 3) inside [0.9, 1.2] %.3f vs outside %.3f; nu=inf variant puts a higher "
                "PMAP outside than inside in %d/20 seeds (want >= 6); it calls a window outside at PMAP > 0.5 in "
                "%d/20",
                fixed.inside, fixed.outside, false_positive, called_outside)};
}

// ---------------------------------------------------------------- 6

Outcome prior_calibration() {
    const int K = 11;
    const double beta = elicit_beta(0.5, K);
    const double delta = elicit_delta(2.0, beta, K);
    const auto elicited = prior_marginals(TransitionSpec::level_rule(K - 1, LevelPrior{beta, delta, std::nullopt}));
    const auto paper = prior_marginals(TransitionSpec::level_rule(K - 1, LevelPrior{0.07, 0.4, std::nullopt}));
    const double e1 = std::abs(elicited.joint_alt() - 0.5);
    const double e2 = std::abs(elicited.expected_alt_count() - 2.0);
    const bool ok = e1 <= 1e-6 && e2 <= 1e-6 && paper.joint_alt() >= 0.45 && paper.joint_alt() <= 0.60 &&
                    paper.expected_alt_count() >= 1.5 && paper.expected_alt_count() <= 2.5;
    return {ok, fmt("elicited beta %.5f delta %.5f: |PrJAP-0.5| %.1e, |signals-2| %.1e; (0.07, 0.4): PrJAP %.4f, "
                    "signals %.3f",
                    beta, delta, e1, e2, paper.joint_alt(), paper.expected_alt_count())};
}

// ---------------------------------------------------------------- 7

Outcome fdr_arithmetic() {
    const std::vector<double> p{0.9, 0.8, 0.1};
    const auto f = bayesian_fdr(p, 0.5);
    const double display = 1.0 - (0.9 + 0.8) / 2.0;
    const bool exact = f && *f == display && std::abs(*f - 0.15) <= 4 * std::numeric_limits<double>::epsilon();
    const auto scan = invariants::fdr_threshold_minimality(1000, 707);
    return {exact && scan.passed(),
            fmt("FDR({0.9,0.8,0.1}, 0.5) = %.17g (0.15 to %.0e); minimality %d/%d vectors agree with exhaustive scan%s",
                f.value_or(-1.0), std::abs(f.value_or(0) - 0.15), scan.cases - scan.failures, scan.cases,
                scan.first_failure.empty() ? "" : ("; " + scan.first_failure).c_str())};
}

// ---------------------------------------------------------------- 8

Outcome sampler_consistency() {
    const auto spec = TransitionSpec::level_rule(2, LevelPrior{0.8, 0.5, std::nullopt});
    const std::vector<NodeEvidence> ev{{1.2, false}, {-0.7, false}, {2.1, false}, {0.4, false},
                                       {-1.1, false}, {1.6, false}, {-0.3, false}};
    const auto post = solve_tree(ev, spec);
    constexpr int draws = 100000;
    std::vector<int> hits(spec.size(), 0);
    Rng rng(808);
    for (int d = 0; d < draws; ++d) {
        const auto s = sample_states(post.transitions, rng);
        for (std::size_t t = 0; t < s.size(); ++t) hits[t] += s[t];
    }
    double worst_z = 0.0;
    for (std::size_t t = 0; t < spec.size(); ++t) {
        const double p = post.marginals.alt_prob[t];
        const double se = std::sqrt(p * (1 - p) / draws);
        worst_z = std::max(worst_z, std::abs(static_cast<double>(hits[t]) / draws - p) / se);
    }
    return {worst_z <= 3.0, fmt("10^5 draws, depth-2 tree: max |empirical - analytic| = %.2f MC standard errors "
                                "(limit 3)",
                                worst_z)};
}

// ---------------------------------------------------------------- 9

Outcome invariant_suites() {
    int passed = 0, total = 0;
    std::string failed;
    for (const auto& check : invariants::all_checks()) {
        const auto r = check.run(1000, 909);
        ++total;
        if (r.passed() && r.cases >= 1000)
            ++passed;
        else
            failed += fmt(" %s (%d/%d failed)", check.name.c_str(), r.failures, r.cases);
    }
    return {passed == total,
            fmt("%d/%d invariant checks pass on 1000 cases each", passed, total) + (failed.empty() ? "" : "; failing:" + failed)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"message-passing exactness", message_passing_exactness},
        {"quadrature fidelity", quadrature_fidelity},
        {"null calibration", null_calibration},
        {"discrimination ordering", discrimination_ordering},
        {"localization", localization},
        {"prior calibration", prior_calibration},
        {"FDR arithmetic", fdr_arithmetic},
        {"sampler consistency", sampler_consistency},
        {"invariant suites", invariant_suites},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        const int c = std::atoi(argv[i]);
        if (c < 1 || c > static_cast<int>(criteria.size())) {
            std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
            return 2;
        }
        selected.insert(c);
    }
    if (selected.empty())
        for (int c = 1; c <= static_cast<int>(criteria.size()); ++c) selected.insert(c);

    bool all = true;
    for (int c : selected) {
        Outcome o;
        try {
            o = criteria[c - 1].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        all = all && o.pass;
        std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", c, criteria[c - 1].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}

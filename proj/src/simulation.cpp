#include "andova/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "andova/error.hpp"
#include "andova/parallel.hpp"

namespace andova {

namespace {

using Rng = std::mt19937_64;

constexpr std::array<std::pair<Scenario, std::string_view>, 5> kScenarioNames{{
    {Scenario::null, "null"},
    {Scenario::local_shift, "local_shift"},
    {Scenario::local_dispersion, "local_dispersion"},
    {Scenario::global_shift, "global_shift"},
    {Scenario::global_dispersion, "global_dispersion"},
}};

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::vector<std::int64_t> dirichlet_multinomial_split(std::int64_t n, int parts, Rng& rng) {
    std::gamma_distribution<double> gamma(1.0, 1.0);
    std::vector<double> p(parts);
    double total = 0.0;
    for (auto& v : p) total += (v = gamma(rng));
    std::vector<std::int64_t> sizes(parts, 0);
    std::int64_t remaining = n;
    double mass_left = 1.0;
    for (int j = 0; j + 1 < parts && remaining > 0; ++j) {
        const double pj = p[j] / total;
        const double q = std::clamp(pj / mass_left, 0.0, 1.0);
        std::binomial_distribution<std::int64_t> binom(remaining, q);
        sizes[j] = binom(rng);
        remaining -= sizes[j];
        mass_left -= pj;
    }
    sizes[parts - 1] += remaining;
    return sizes;
}

double draw_in_omega(const NormalComponent& c, Rng& rng) {
    std::normal_distribution<double> normal(c.mean, c.sd);
    for (;;) {
        const double x = normal(rng);
        if (x >= kSimulationOmegaLo && x <= kSimulationOmegaHi) return x;
    }
}

}  // namespace

std::string to_string(Scenario s) {
    for (const auto& [value, name] : kScenarioNames)
        if (value == s) return std::string(name);
    return "unknown";
}

Scenario parse_scenario(std::string_view name) {
    for (const auto& [value, n] : kScenarioNames)
        if (n == name) return value;
    throw InputError("unknown scenario '" + std::string(name) + "'");
}

Centroid null_centroid() { return {{{1.0, 0.05}, {1.5, 0.2}, {2.5, 0.1}}}; }

Centroid scenario_centroid(Scenario s) {
    Centroid c = null_centroid();
    switch (s) {
        case Scenario::null:
            break;
        case Scenario::local_shift:
            c[0].mean = 1.1;
            break;
        case Scenario::local_dispersion:
            c[0].sd = 0.15;
            break;
        case Scenario::global_shift:
            c[0].mean = 1.05;
            c[1].mean = 1.55;
            c[2].mean = 2.55;
            break;
        case Scenario::global_dispersion:
            c[0].sd = 0.1;
            c[1].sd = 0.4;
            c[2].sd = 0.2;
            break;
    }
    return c;
}

void ScenarioSpec::validate() const {
    if (groups < 2) throw InputError("a scenario needs at least 2 groups");
    if (replicates < 1) throw InputError("a scenario needs at least 1 replicate per group");
    if (n < 1) throw InputError("a scenario needs n >= 1 observations per group");
}

SimulatedDataset simulate(const ScenarioSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    std::normal_distribution<double> std_normal(0.0, 1.0);

    SimulatedDataset out;
    out.centroids.resize(spec.groups, null_centroid());
    out.centroids[1] = scenario_centroid(spec.scenario);
    out.weights.resize(spec.groups);

    for (int i = 0; i < spec.groups; ++i) {
        Group group{"g" + std::to_string(i + 1), {}};
        const auto sizes = dirichlet_multinomial_split(spec.n, spec.replicates, rng);
        for (int j = 0; j < spec.replicates; ++j) {
            std::array<double, 3> z{};
            if (!spec.equal_logits)
                for (auto& v : z) v = std_normal(rng);
            const double zmax = *std::max_element(z.begin(), z.end());
            std::array<double, 3> w{};
            double sum = 0.0;
            for (int l = 0; l < 3; ++l) sum += (w[l] = std::exp(z[l] - zmax));
            for (auto& v : w) v /= sum;
            out.weights[i].push_back(w);

            std::discrete_distribution<int> pick(w.begin(), w.end());
            Replicate rep{"r" + std::to_string(j + 1), {}};
            rep.values.reserve(static_cast<std::size_t>(sizes[j]));
            for (std::int64_t m = 0; m < sizes[j]; ++m)
                rep.values.push_back(draw_in_omega(out.centroids[i][pick(rng)], rng));
            group.replicates.push_back(std::move(rep));
        }
        out.data.groups.push_back(std::move(group));
    }
    return out;
}

Dataset generate(const ScenarioSpec& spec) { return simulate(spec).data; }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t run) {
    return splitmix(splitmix(splitmix(base) ^ stream) ^ run);
}

double auc_lower_is_alt(std::span<const double> null_stats, std::span<const double> alt_stats) {
    if (null_stats.empty() || alt_stats.empty()) throw InputError("AUC needs both null and alternative values");
    struct Item {
        double value;
        bool alt;
    };
    std::vector<Item> pooled;
    pooled.reserve(null_stats.size() + alt_stats.size());
    for (double v : null_stats) pooled.push_back({v, false});
    for (double v : alt_stats) pooled.push_back({v, true});
    std::sort(pooled.begin(), pooled.end(), [](const Item& a, const Item& b) { return a.value > b.value; });

    // Midranks in decreasing order, so the alternative ranks high when its values are small.
    double alt_rank_sum = 0.0;
    for (std::size_t i = 0; i < pooled.size();) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].value == pooled[i].value) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t m = i; m < j; ++m)
            if (pooled[m].alt) alt_rank_sum += midrank;
        i = j;
    }
    const double n1 = static_cast<double>(alt_stats.size());
    const double n0 = static_cast<double>(null_stats.size());
    return (alt_rank_sum - n1 * (n1 + 1.0) / 2.0) / (n0 * n1);
}

RocResult run_roc(int n_runs, std::span<const Scenario> alternatives, const ScenarioSpec& base,
                  const FitConfig& config, const std::function<void(const RocRecord&)>& on_record) {
    if (n_runs < 2) throw InputError("ROC needs at least 2 runs");
    base.validate();
    config.validate();

    std::vector<Scenario> scenarios{Scenario::null};
    for (Scenario s : alternatives)
        if (s != Scenario::null && std::find(scenarios.begin(), scenarios.end(), s) == scenarios.end())
            scenarios.push_back(s);

    const std::size_t runs = static_cast<std::size_t>(n_runs);
    const std::size_t jobs = scenarios.size() * runs;
    std::vector<std::array<RocRecord, 2>> results(jobs);

    FitConfig full = config;
    full.restrict_nu_infinity = false;
    full.omega = {kSimulationOmegaLo, kSimulationOmegaHi};
    FitConfig restricted = full;
    restricted.restrict_nu_infinity = true;
    const int outer_threads = resolve_threads(config.threads);
    full.threads = restricted.threads = 1;

    parallel_for(jobs, outer_threads, [&](std::size_t job) {
        const Scenario s = scenarios[job / runs];
        const int run = static_cast<int>(job % runs);
        ScenarioSpec spec = base;
        spec.scenario = s;
        spec.seed = derive_seed(base.seed, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(run));
        try {
            const Dataset data = generate(spec);
            const FitResult a = fit_graphical(data, full);
            const FitResult b = fit_graphical(data, restricted);
            results[job][0] = {run, s, "andova", a.posterior.marginals.joint_null(), a.log_joint_null()};
            results[job][1] = {run, s, "nu_infinity", b.posterior.marginals.joint_null(), b.log_joint_null()};
        } catch (const InputError& e) {
            throw InputError("run " + std::to_string(run) + " (" + to_string(s) + "): " + e.what());
        } catch (const NumericalError& e) {
            throw NumericalError("run " + std::to_string(run) + " (" + to_string(s) + "): " + e.what());
        }
    });

    RocResult out;
    for (const auto& pair : results)
        for (const auto& rec : pair) {
            auto& m = out.methods[rec.method];
            if (rec.scenario == Scenario::null)
                m.null_stats.push_back(rec.log_statistic);
            else
                m.alt_stats[rec.scenario].push_back(rec.log_statistic);
            out.records.push_back(rec);
            if (on_record) on_record(rec);
        }
    for (auto& [name, m] : out.methods)
        for (const auto& [s, alt] : m.alt_stats) m.auc[s] = auc_lower_is_alt(m.null_stats, alt);
    return out;
}

}  // namespace andova

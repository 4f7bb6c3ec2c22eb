#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "andova/error.hpp"
#include "andova/fit.hpp"
#include "andova/io.hpp"
#include "andova/markov_tree.hpp"
#include "andova/parallel.hpp"
#include "andova/report.hpp"
#include "andova/simulation.hpp"

namespace {

using namespace andova;
using nlohmann::json;

struct ModelFlags {
    std::optional<double> omega_lo;
    std::optional<double> omega_hi;
    int depth = 11;
    double beta = 0.07;
    double delta = 0.4;
    std::optional<double> root_alt;
    int nu_points = 50;
    double nu_lo = -1.0;
    double nu_hi = 4.0;
    std::vector<double> prior0{0.5, 0.5};
    std::vector<double> prior1{0.5, 0.5};
    double fdr = 0.1;
    std::optional<double> threshold;
    bool restrict_nu_infinity = false;
    int threads = 0;

    FitConfig config() const {
        FitConfig c;
        if (omega_lo.has_value() != omega_hi.has_value())
            throw InputError("--omega-lo and --omega-hi must be given together");
        if (omega_lo) c.omega = std::pair{*omega_lo, *omega_hi};
        c.depth = depth;
        c.nu_points = nu_points;
        c.nu_lo_exp = nu_lo;
        c.nu_hi_exp = nu_hi;
        c.prior0 = {prior0[0], prior0[1]};
        c.prior1 = {prior1[0], prior1[1]};
        c.level_prior.beta = beta;
        c.level_prior.delta = delta;
        c.level_prior.root_alt = root_alt;
        c.restrict_nu_infinity = restrict_nu_infinity;
        c.fdr_target = fdr;
        c.fixed_threshold = threshold;
        c.threads = resolve_threads(threads);
        c.validate();
        return c;
    }
};

void add_model_flags(CLI::App* app, ModelFlags& f, bool with_omega) {
    if (with_omega) {
        app->add_option("--omega-lo", f.omega_lo, "Lower end of the sample space");
        app->add_option("--omega-hi", f.omega_hi, "Upper end of the sample space");
    }
    app->add_option("--depth,-K", f.depth, "Partition depth K (K + 1 resolution levels)")->capture_default_str();
    app->add_option("--beta", f.beta, "Markov tree beta")->capture_default_str();
    app->add_option("--delta", f.delta, "Markov tree delta")->capture_default_str();
    app->add_option("--root-alt", f.root_alt, "Prior alternative probability of the root window");
    app->add_option("--nu-points", f.nu_points, "Number of nu grid points")->capture_default_str();
    app->add_option("--nu-lo", f.nu_lo, "Lower log10 nu bound")->capture_default_str();
    app->add_option("--nu-hi", f.nu_hi, "Upper log10 nu bound")->capture_default_str();
    app->add_option("--prior0", f.prior0, "Beta prior shapes under the null")->expected(2)->capture_default_str();
    app->add_option("--prior1", f.prior1, "Beta prior shapes under the alternative")->expected(2)->capture_default_str();
    app->add_option("--fdr", f.fdr, "Bayesian FDR target")->capture_default_str();
    app->add_option("--threshold", f.threshold, "Fixed PMAP threshold instead of FDR calibration");
    app->add_flag("--restrict-nu-infinity", f.restrict_nu_infinity, "Fit the nu = infinity restricted model");
    app->add_option("--threads", f.threads, "Worker threads (0: ANDOVA_THREADS or hardware)")->capture_default_str();
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path, std::ios::binary);
    if (!file) throw InputError("cannot write '" + path + "'");
    return file;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << text;
}

struct ScenarioFlags {
    int groups = 2;
    int replicates = 4;
    std::int64_t n = 500;
    std::uint64_t seed = 1;
};

void add_scenario_flags(CLI::App* app, ScenarioFlags& f) {
    app->add_option("--groups", f.groups, "Number of groups")->capture_default_str();
    app->add_option("--replicates", f.replicates, "Replicates per group")->capture_default_str();
    app->add_option("--n", f.n, "Observations per group")->capture_default_str();
    app->add_option("--seed", f.seed, "Random seed")->capture_default_str();
}

int cmd_fit(const std::string& input, const ModelFlags& flags, const std::string& output, const std::string& format,
            const std::string& svg, int draws, std::uint64_t seed) {
    const FitConfig config = flags.config();
    const Dataset data = read_dataset(input);
    const FitResult fit = fit_graphical(data, config);
    PosteriorReport report = make_report(fit, data, config);
    if (draws > 0) report.sampler = summarize_draws(fit, config, draws, seed);

    std::ofstream file;
    std::ostream& out = open_output(output, file);
    if (format == "csv-summary")
        out << csv_summary(report);
    else
        out << to_json(report).dump(2) << '\n';

    if (!svg.empty()) {
        write_file(svg + "_pmap.svg", pmap_tree_svg(report));
        for (std::size_t g = 0; g < report.groups.size(); ++g)
            write_file(svg + "_effect_" + report.groups[g].label + ".svg", effect_tree_svg(report, g));
    }
    return 0;
}

json dataset_records(const Dataset& data) { return json::parse(to_json_text(data)); }

int cmd_simulate(const std::string& scenario, int runs, const ScenarioFlags& sf, const std::string& output_dir) {
    if (runs < 1) throw InputError("--runs must be at least 1");
    const Scenario s = parse_scenario(scenario);
    for (int r = 0; r < runs; ++r) {
        ScenarioSpec spec{s, sf.groups, sf.replicates, sf.n, derive_seed(sf.seed, static_cast<std::uint64_t>(s),
                                                                          static_cast<std::uint64_t>(r))};
        const Dataset data = generate(spec);
        if (!output_dir.empty()) {
            std::filesystem::create_directories(output_dir);
            std::ofstream out(std::filesystem::path(output_dir) / (scenario + "_run" + std::to_string(r) + ".csv"));
            if (!out) throw InputError("cannot write into '" + output_dir + "'");
            write_csv(out, data);
        } else {
            json line{{"run", r}, {"scenario", scenario}, {"seed", spec.seed}, {"data", dataset_records(data)}};
            std::cout << line.dump() << '\n';
        }
    }
    return 0;
}

int cmd_roc(const std::vector<std::string>& scenarios, int runs, const ScenarioFlags& sf, const ModelFlags& flags,
            const std::string& records_path) {
    if (runs < 2) throw InputError("--runs must be at least 2 for an ROC comparison");
    std::vector<Scenario> alts;
    for (const auto& name : scenarios) {
        const Scenario s = parse_scenario(name);
        if (s == Scenario::null) throw InputError("the null scenario is always included; pick alternatives");
        alts.push_back(s);
    }
    ScenarioSpec base{Scenario::null, sf.groups, sf.replicates, sf.n, sf.seed};
    FitConfig config = flags.config();

    std::ofstream file;
    std::ostream* records = nullptr;
    if (!records_path.empty()) records = &open_output(records_path, file);
    const RocResult roc = run_roc(runs, alts, base, config, [&](const RocRecord& rec) {
        if (!records) return;
        json line{{"run", rec.run},
                  {"scenario", to_string(rec.scenario)},
                  {"method", rec.method},
                  {"statistic", rec.statistic},
                  {"log_statistic", rec.log_statistic}};
        *records << line.dump() << '\n';
    });

    json summary;
    summary["runs"] = runs;
    summary["seed"] = sf.seed;
    summary["statistic"] = "1 - PJAP";
    for (const auto& [method, m] : roc.methods) {
        std::vector<double> sorted;
        for (double v : m.null_stats) sorted.push_back(std::exp(v));
        std::sort(sorted.begin(), sorted.end());
        const std::size_t h = sorted.size() / 2;
        const double median = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
        json auc;
        for (const auto& [s, a] : m.auc) auc[to_string(s)] = a;
        summary["methods"][method] = {{"auc", auc},
                                      {"null_median_statistic", median}};
    }
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int cmd_elicit(double prjap, std::optional<double> signals, int depth) {
    const double beta = elicit_beta(prjap, depth);
    LevelPrior prior;
    prior.beta = beta;
    json out{{"beta", beta}, {"depth", depth}};
    if (signals) {
        prior.delta = elicit_delta(*signals, beta, depth);
        out["delta"] = prior.delta;
    } else {
        out["delta"] = nullptr;
    }
    const LevelPriorSummary summary = level_prior_summary(prior, depth);
    out["achieved_prjap"] = summary.prjap;
    out["achieved_signals"] = signals ? json(summary.expected_signals) : json(nullptr);
    std::cout << out.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-scale Beta-Binomial ANDOVA"};
    app.set_version_flag("--version", andova::tool_version());
    app.require_subcommand(1);

    ModelFlags fit_flags;
    std::string input, output, format = "json", svg;
    int draws = 0;
    std::uint64_t fit_seed = 1;
    auto* fit = app.add_subcommand("fit", "Fit graphical ANDOVA to a dataset and write a posterior report");
    fit->add_option("--input,-i", input, "Dataset (CSV group,replicate,value or JSON records)")->required();
    fit->add_option("--output,-o", output, "Report path (default: stdout)");
    fit->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv-summary"}))->capture_default_str();
    fit->add_option("--svg", svg, "Write PMAP and effect-size tree plots with this path prefix");
    fit->add_option("--draws", draws, "Joint posterior draws to summarize in the report")->check(CLI::NonNegativeNumber);
    fit->add_option("--seed", fit_seed, "Seed for posterior draws")->capture_default_str();
    add_model_flags(fit, fit_flags, true);

    std::string sim_scenario = "null", sim_dir;
    int sim_runs = 1;
    ScenarioFlags sim_flags;
    auto* sim = app.add_subcommand("simulate", "Generate simulated datasets");
    sim->add_option("--scenario", sim_scenario, "null, local_shift, local_dispersion, global_shift, global_dispersion")
        ->capture_default_str();
    sim->add_option("--runs", sim_runs, "Number of datasets")->capture_default_str();
    sim->add_option("--output-dir", sim_dir, "Write one CSV per run here instead of JSON lines on stdout");
    add_scenario_flags(sim, sim_flags);

    std::vector<std::string> roc_scenarios{"local_shift"};
    int roc_runs = 100;
    std::string roc_records;
    ScenarioFlags roc_flags;
    ModelFlags roc_model;
    auto* roc = app.add_subcommand("roc", "Compare ANDOVA with its nu = infinity restriction by ROC AUC");
    roc->add_option("--scenario", roc_scenarios, "Alternative scenario(s)")->capture_default_str();
    roc->add_option("--runs", roc_runs, "Runs per scenario")->capture_default_str();
    roc->add_option("--records", roc_records, "JSON-lines file for run-level statistics ('-' for stdout)");
    add_scenario_flags(roc, roc_flags);
    add_model_flags(roc, roc_model, false);

    double prjap = 0.5;
    std::optional<double> signals;
    int elicit_depth = 11;
    auto* elicit = app.add_subcommand("elicit", "Elicit beta and delta from prior targets");
    elicit->add_option("--prjap", prjap, "Target prior joint alternative probability")->required();
    elicit->add_option("--signals", signals, "Target prior expected number of alternative windows");
    elicit->add_option("--depth,-K", elicit_depth, "Partition depth K")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*fit) return cmd_fit(input, fit_flags, output, format, svg, draws, fit_seed);
        if (*sim) return cmd_simulate(sim_scenario, sim_runs, sim_flags, sim_dir);
        if (*roc) return cmd_roc(roc_scenarios, roc_runs, roc_flags, roc_model, roc_records);
        if (*elicit) return cmd_elicit(prjap, signals, elicit_depth);
    } catch (const andova::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const andova::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

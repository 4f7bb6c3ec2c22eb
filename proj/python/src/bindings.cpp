#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "andova/beta_binomial.hpp"
#include "andova/decision.hpp"
#include "andova/error.hpp"
#include "andova/fit.hpp"
#include "andova/io.hpp"
#include "andova/markov_tree.hpp"
#include "andova/ms_bb.hpp"
#include "andova/report.hpp"
#include "andova/simulation.hpp"

namespace py = pybind11;
using namespace andova;

namespace {

using Values = std::vector<std::vector<std::vector<double>>>;  // [group][replicate][obs]

py::object json_to_py(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

Dataset make_dataset(const Values& values, const std::vector<std::string>& labels) {
    if (!labels.empty() && labels.size() != values.size())
        throw InputError("group_labels must match the number of groups");
    Dataset d;
    for (std::size_t g = 0; g < values.size(); ++g) {
        Group group{labels.empty() ? "g" + std::to_string(g + 1) : labels[g], {}};
        for (std::size_t r = 0; r < values[g].size(); ++r)
            group.replicates.push_back({"r" + std::to_string(r + 1), values[g][r]});
        d.groups.push_back(std::move(group));
    }
    return d;
}

Values dataset_values(const Dataset& d) {
    Values out;
    for (const auto& g : d.groups) {
        auto& group = out.emplace_back();
        for (const auto& r : g.replicates) group.push_back(r.values);
    }
    return out;
}

GroupSplitCounts to_counts(const std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>>& c) {
    GroupSplitCounts out;
    for (const auto& g : c) {
        auto& group = out.emplace_back();
        for (auto [l, r] : g) group.push_back({l, r});
    }
    return out;
}

BetaPrior to_prior(std::pair<double, double> p) { return {p.first, p.second}; }

py::dict marginals_dict(const Marginals& m) {
    py::dict d;
    d["alt_prob"] = m.alt_prob;
    d["joint_alt"] = m.joint_alt();
    d["log_joint_null"] = m.log_joint_null;
    d["expected_alt_count"] = m.expected_alt_count();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multi-scale Beta-Binomial ANDOVA";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def("version", &tool_version);

    m.def(
        "fit",
        [](const Values& values, const std::vector<std::string>& group_labels, int depth,
           std::optional<std::pair<double, double>> omega, int nu_points, double nu_lo_exp, double nu_hi_exp,
           std::pair<double, double> prior0, std::pair<double, double> prior1, double beta, double delta,
           std::optional<double> root_alt, bool restrict_nu_infinity, double fdr_target,
           std::optional<double> fixed_threshold, int threads, int samples, std::uint64_t seed) {
            FitConfig c;
            c.depth = depth;
            c.omega = omega;
            c.nu_points = nu_points;
            c.nu_lo_exp = nu_lo_exp;
            c.nu_hi_exp = nu_hi_exp;
            c.prior0 = to_prior(prior0);
            c.prior1 = to_prior(prior1);
            c.level_prior = {beta, delta, root_alt};
            c.restrict_nu_infinity = restrict_nu_infinity;
            c.fdr_target = fdr_target;
            c.fixed_threshold = fixed_threshold;
            c.threads = threads;
            if (samples < 0) throw InputError("samples must be >= 0");
            const Dataset data = make_dataset(values, group_labels);
            nlohmann::json j;
            {
                py::gil_scoped_release release;
                const FitResult fit = fit_graphical(data, c);
                PosteriorReport report = make_report(fit, data, c);
                if (samples > 0) report.sampler = summarize_draws(fit, c, samples, seed);
                j = to_json(report);
            }
            return json_to_py(j);
        },
        py::arg("values"), py::arg("group_labels") = std::vector<std::string>{}, py::arg("depth") = 11,
        py::arg("omega") = py::none(), py::arg("nu_points") = 50, py::arg("nu_lo_exp") = -1.0,
        py::arg("nu_hi_exp") = 4.0, py::arg("prior0") = std::pair{0.5, 0.5},
        py::arg("prior1") = std::pair{0.5, 0.5}, py::arg("beta") = 0.07, py::arg("delta") = 0.4,
        py::arg("root_alt") = py::none(), py::arg("restrict_nu_infinity") = false, py::arg("fdr_target") = 0.1,
        py::arg("fixed_threshold") = py::none(), py::arg("threads") = 1, py::arg("samples") = 0,
        py::arg("seed") = 1);

    m.def(
        "simulate",
        [](const std::string& scenario, int groups, int replicates, std::int64_t n, std::uint64_t seed) {
            ScenarioSpec s{parse_scenario(scenario), groups, replicates, n, seed};
            return dataset_values(generate(s));
        },
        py::arg("scenario"), py::arg("groups") = 2, py::arg("replicates") = 4, py::arg("n") = 500,
        py::arg("seed") = 1);
    m.def("derive_seed", &derive_seed, py::arg("base"), py::arg("stream"), py::arg("run"));
    m.def(
        "auc",
        [](const std::vector<double>& null_stats, const std::vector<double>& alt_stats) {
            return auc_lower_is_alt(null_stats, alt_stats);
        },
        py::arg("null_stats"), py::arg("alt_stats"));

    m.def("log_d", &log_d, py::arg("left"), py::arg("right"), py::arg("theta"), py::arg("nu"));
    m.def(
        "laplace_inner",
        [](const std::vector<std::pair<std::int64_t, std::int64_t>>& cell, double nu,
           std::pair<double, double> prior) {
            std::vector<SplitCount> c;
            for (auto [l, r] : cell) c.push_back({l, r});
            const auto res = laplace_inner(c, nu, to_prior(prior));
            static const char* names[] = {"laplace", "logit_laplace", "conjugate", "no_data"};
            py::dict d;
            d["log_value"] = res.log_value;
            d["mode"] = res.mode;
            d["curvature"] = res.curvature;
            d["method"] = names[static_cast<int>(res.method)];
            return d;
        },
        py::arg("cell"), py::arg("nu"), py::arg("prior") = std::pair{0.5, 0.5});
    m.def(
        "window_evidence",
        [](const std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>>& counts, int nu_points,
           double nu_lo_exp, double nu_hi_exp, bool restrict_nu_infinity, std::pair<double, double> prior0,
           std::pair<double, double> prior1) {
            const NuGrid grid = restrict_nu_infinity ? NuGrid::infinite()
                                                     : NuGrid::log10_uniform(nu_points, nu_lo_exp, nu_hi_exp);
            const auto ev = window_evidence(to_counts(counts), grid, to_prior(prior0), to_prior(prior1));
            py::dict d;
            d["log_m0"] = ev.log_m0;
            d["log_m1"] = ev.log_m1;
            d["log_bf"] = ev.log_bf;
            d["degenerate"] = ev.degenerate;
            return d;
        },
        py::arg("counts"), py::arg("nu_points") = 50, py::arg("nu_lo_exp") = -1.0, py::arg("nu_hi_exp") = 4.0,
        py::arg("restrict_nu_infinity") = false, py::arg("prior0") = std::pair{0.5, 0.5},
        py::arg("prior1") = std::pair{0.5, 0.5});
    m.def("pmap_independent", &pmap_independent, py::arg("log_bf"), py::arg("rho"));

    m.def(
        "solve_tree",
        [](const std::vector<double>& log_bf, std::vector<bool> degenerate, double beta, double delta,
           std::optional<double> root_alt) {
            if (degenerate.empty()) degenerate.assign(log_bf.size(), false);
            if (degenerate.size() != log_bf.size()) throw InputError("degenerate must match log_bf in length");
            std::size_t nodes = log_bf.size(), depth = 0;
            while ((std::size_t{2} << depth) - 1 < nodes) ++depth;
            if ((std::size_t{2} << depth) - 1 != nodes) throw InputError("log_bf length must be 2^d - 1");
            std::vector<NodeEvidence> ev;
            for (std::size_t t = 0; t < nodes; ++t) ev.push_back({log_bf[t], degenerate[t]});
            const auto spec = TransitionSpec::level_rule(static_cast<int>(depth), {beta, delta, root_alt});
            const auto post = solve_tree(ev, spec);
            py::dict d = marginals_dict(post.marginals);
            d["prior"] = marginals_dict(prior_marginals(spec));
            return d;
        },
        py::arg("log_bf"), py::arg("degenerate") = std::vector<bool>{}, py::arg("beta") = 0.07,
        py::arg("delta") = 0.4, py::arg("root_alt") = py::none());

    m.def("prjap", &prjap_closed_form, py::arg("beta"), py::arg("depth"), py::arg("root_alt") = py::none());
    m.def(
        "level_prior_summary",
        [](double beta, double delta, int depth, std::optional<double> root_alt) {
            const auto s = level_prior_summary({beta, delta, root_alt}, depth);
            py::dict d;
            d["prmap_by_level"] = s.prmap_by_level;
            d["prjap"] = s.prjap;
            d["expected_signals"] = s.expected_signals;
            return d;
        },
        py::arg("beta"), py::arg("delta"), py::arg("depth"), py::arg("root_alt") = py::none());
    m.def("elicit_beta", &elicit_beta, py::arg("target_prjap"), py::arg("depth"));
    m.def("elicit_delta", &elicit_delta, py::arg("target_signals"), py::arg("beta"), py::arg("depth"));

    m.def(
        "bayesian_fdr", [](const std::vector<double>& p, double c) { return bayesian_fdr(p, c); },
        py::arg("pmaps"), py::arg("threshold"));
    m.def(
        "threshold_for_fdr", [](const std::vector<double>& p, double t) { return threshold_for_fdr(p, t); },
        py::arg("pmaps"), py::arg("target"));
    m.def(
        "decide",
        [](const std::vector<double>& p, std::optional<double> threshold, double target) {
            const auto r = threshold ? decide_fixed(p, *threshold) : decide_fdr(p, target);
            py::dict d;
            d["threshold"] = r.threshold;
            d["significant"] = r.significant;
            d["achieved_fdr"] = r.achieved_fdr;
            d["target_fdr"] = r.target_fdr;
            return d;
        },
        py::arg("pmaps"), py::arg("threshold") = py::none(), py::arg("target") = 0.1);

    m.def(
        "read_dataset",
        [](const std::string& path) {
            const Dataset d = read_dataset(path);
            std::vector<std::string> labels;
            for (const auto& g : d.groups) labels.push_back(g.label);
            return py::make_tuple(dataset_values(d), labels);
        },
        py::arg("path"));

    m.attr("INFINITY") = std::numeric_limits<double>::infinity();
}

#include "andova/markov_tree.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "andova/error.hpp"
#include "andova/numeric.hpp"

namespace andova {

using numeric::kNegInf;
using numeric::log_add_exp;
using numeric::safe_log;

void LevelPrior::validate() const {
    if (!(beta >= 0.0 && beta <= 2.0)) throw InputError("beta must lie in [0, 2]");
    if (!(delta >= 0.0 && delta <= 1.0)) throw InputError("delta must lie in [0, 1]");
    if (root_alt && !(*root_alt >= 0.0 && *root_alt <= 1.0))
        throw InputError("root alternative probability must lie in [0, 1]");
}

double LevelPrior::root_alt_prob() const { return root_alt.value_or(std::min(1.0, beta / 2.0)); }

double LevelPrior::alt_from_null(int level) const { return std::min(1.0, std::ldexp(beta, -level)); }

TransitionSpec::TransitionSpec(std::vector<Matrix2> matrices) : matrices_(std::move(matrices)) {
    const std::size_t n = matrices_.size();
    if (n == 0 || ((n + 1) & n) != 0)
        throw InputError("transition spec must describe a complete binary tree");
    depth_ = 0;
    while ((std::size_t{2} << depth_) - 1 < n) ++depth_;
    for (std::size_t t = 0; t < n; ++t)
        for (const auto& row : matrices_[t]) {
            if (!(row[0] >= 0.0 && row[1] >= 0.0 && std::abs(row[0] + row[1] - 1.0) <= 1e-12))
                throw InputError("transition matrix rows must be probability vectors");
        }
    if (matrices_[0][0] != matrices_[0][1])
        throw InputError("root transition matrix must have two equal rows");
}

TransitionSpec TransitionSpec::level_rule(int tree_depth, const LevelPrior& prior) {
    prior.validate();
    if (tree_depth < 0 || tree_depth > 30) throw InputError("tree depth out of range");
    std::vector<Matrix2> m((std::size_t{2} << tree_depth) - 1);
    const double r = prior.root_alt_prob();
    m[0] = Matrix2{{{1.0 - r, r}, {1.0 - r, r}}};
    for (int j = 1; j <= tree_depth; ++j) {
        const double a = prior.alt_from_null(j);
        const Matrix2 level{{{1.0 - a, a}, {1.0 - prior.delta, prior.delta}}};
        std::fill(m.begin() + ((std::size_t{1} << j) - 1), m.begin() + ((std::size_t{2} << j) - 1), level);
    }
    return TransitionSpec(std::move(m));
}

namespace {

// Log weights of the two child states: (log phi_0(l) phi_0(r), log BF + log phi_1(l) phi_1(r)).
std::array<double, 2> child_terms(const MessageSet& msg, const TransitionSpec& prior,
                                  std::size_t t, double log_bf) {
    std::array<double, 2> a{0.0, log_bf};
    if (prior.has_children(t)) {
        const auto& l = msg.log_phi[2 * t + 1];
        const auto& r = msg.log_phi[2 * t + 2];
        a[0] += l[0] + r[0];
        a[1] += l[1] + r[1];
    }
    return a;
}

void check_sizes(std::span<const NodeEvidence> evidence, const TransitionSpec& prior) {
    if (evidence.size() != prior.size())
        throw InputError("evidence and transition spec sizes differ");
}

}  // namespace

MessageSet upward_messages(std::span<const NodeEvidence> evidence, const TransitionSpec& prior) {
    check_sizes(evidence, prior);
    const std::size_t n = prior.size();
    MessageSet msg;
    msg.log_phi.assign(n, {0.0, 0.0});
    msg.log_scale.assign(n, 0.0);
    msg.subtree_log_scale.assign(n, 0.0);
    for (std::size_t t = n; t-- > 0;) {
        double below = 0.0;
        if (prior.has_children(t))
            below = msg.subtree_log_scale[2 * t + 1] + msg.subtree_log_scale[2 * t + 2];
        if (evidence[t].degenerate) {
            // phi = (1, 1) exactly; the pinned value is unscaled.
            msg.subtree_log_scale[t] = 0.0;
            continue;
        }
        const auto a = child_terms(msg, prior, t, evidence[t].log_bf);
        std::array<double, 2> phi{};
        for (int s = 0; s < 2; ++s)
            phi[s] = log_add_exp(safe_log(prior[t][s][0]) + a[0], safe_log(prior[t][s][1]) + a[1]);
        const double scale = std::max(phi[0], phi[1]);
        if (!std::isfinite(scale)) {
            std::ostringstream s;
            s << "upward message at window " << t << " is not finite";
            throw NumericalError(s.str());
        }
        msg.log_phi[t] = {phi[0] - scale, phi[1] - scale};
        msg.log_scale[t] = scale;
        msg.subtree_log_scale[t] = scale + below;
    }
    return msg;
}

PosteriorTransitions posterior_transitions(const MessageSet& messages, const TransitionSpec& prior,
                                           std::span<const NodeEvidence> evidence) {
    check_sizes(evidence, prior);
    const std::size_t n = prior.size();
    PosteriorTransitions post;
    post.matrices.resize(n);
    post.log_stay_null.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        if (evidence[t].degenerate) {
            post.matrices[t] = prior[t];
            post.log_stay_null[t] = safe_log(prior[t][0][0]);
            continue;
        }
        const auto a = child_terms(messages, prior, t, evidence[t].log_bf);
        for (int s = 0; s < 2; ++s) {
            const double l0 = safe_log(prior[t][s][0]) + a[0];
            const double l1 = safe_log(prior[t][s][1]) + a[1];
            const double norm = log_add_exp(l0, l1);
            if (!std::isfinite(norm)) {
                std::ostringstream msg;
                msg << "posterior transition row " << s << " at window " << t << " has zero mass";
                throw NumericalError(msg.str());
            }
            const double p0 = std::exp(l0 - norm);
            const double p1 = std::exp(l1 - norm);
            const double total = p0 + p1;
            post.matrices[t][s] = {p0 / total, p1 / total};
            if (s == 0) post.log_stay_null[t] = l0 - norm;
        }
    }
    return post;
}

namespace {

Marginals propagate_down(std::span<const Matrix2> matrices, std::span<const double> log_stay_null) {
    const std::size_t n = matrices.size();
    Marginals out;
    out.alt_prob.resize(n);
    std::vector<std::array<double, 2>> marg(n);
    marg[0] = matrices[0][0];
    for (std::size_t t = 1; t < n; ++t) {
        const auto& p = marg[(t - 1) / 2];
        const auto& m = matrices[t];
        const double alt = p[0] * m[0][1] + p[1] * m[1][1];
        const double null = p[0] * m[0][0] + p[1] * m[1][0];
        marg[t] = {null / (null + alt), alt / (null + alt)};
    }
    for (std::size_t t = 0; t < n; ++t) out.alt_prob[t] = std::clamp(marg[t][1], 0.0, 1.0);
    double log_null = 0.0;
    for (double l : log_stay_null) log_null += l;
    out.log_joint_null = log_null;
    return out;
}

}  // namespace

double Marginals::joint_alt() const { return -std::expm1(log_joint_null); }
double Marginals::joint_null() const { return std::exp(log_joint_null); }
double Marginals::expected_alt_count() const {
    double s = 0.0;
    for (double p : alt_prob) s += p;
    return s;
}

Marginals downward_marginals(const PosteriorTransitions& posterior) {
    return propagate_down(posterior.matrices, posterior.log_stay_null);
}

Marginals prior_marginals(const TransitionSpec& prior) {
    std::vector<Matrix2> m(prior.size());
    std::vector<double> log_stay(prior.size());
    for (std::size_t t = 0; t < prior.size(); ++t) {
        m[t] = prior[t];
        log_stay[t] = safe_log(prior[t][0][0]);
    }
    return propagate_down(m, log_stay);
}

TreePosterior solve_tree(std::span<const NodeEvidence> evidence, const TransitionSpec& prior) {
    TreePosterior out;
    out.messages = upward_messages(evidence, prior);
    out.transitions = posterior_transitions(out.messages, prior, evidence);
    out.marginals = downward_marginals(out.transitions);
    return out;
}

double prjap_closed_form(double beta, int partition_depth, std::optional<double> root_alt) {
    if (partition_depth < 1) throw InputError("partition depth must be at least 1");
    LevelPrior p{beta, 0.0, root_alt};
    p.validate();
    double log_null = std::log1p(-p.root_alt_prob());
    for (int j = 1; j < partition_depth; ++j)
        log_null += std::ldexp(1.0, j) * std::log1p(-p.alt_from_null(j));
    return -std::expm1(log_null);
}

LevelPriorSummary level_prior_summary(const LevelPrior& prior, int partition_depth) {
    if (partition_depth < 1) throw InputError("partition depth must be at least 1");
    prior.validate();
    LevelPriorSummary s;
    double p = prior.root_alt_prob();
    double log_null = std::log1p(-p);
    s.prmap_by_level.push_back(p);
    s.expected_signals = p;
    for (int j = 1; j < partition_depth; ++j) {
        const double a = prior.alt_from_null(j);
        p = p * prior.delta + (1.0 - p) * a;
        s.prmap_by_level.push_back(p);
        s.expected_signals += std::ldexp(p, j);
        log_null += std::ldexp(1.0, j) * std::log1p(-a);
    }
    s.prjap = -std::expm1(log_null);
    return s;
}

double elicit_beta(double target_prjap, int partition_depth) {
    if (!(target_prjap >= 0.0 && target_prjap < 1.0))
        throw InputError("target PrJAP must lie in [0, 1)");
    if (target_prjap == 0.0) return 0.0;
    double lo = 0.0;
    double hi = 2.0;
    if (prjap_closed_form(hi, partition_depth) < target_prjap)
        throw InputError("target PrJAP is unreachable with beta <= 2");
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        if (prjap_closed_form(mid, partition_depth) < target_prjap) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double elicit_delta(double target_expected_signals, double beta, int partition_depth) {
    auto signals = [&](double delta) {
        return level_prior_summary(LevelPrior{beta, delta, std::nullopt}, partition_depth).expected_signals;
    };
    const double floor = signals(0.0);
    const double ceiling = signals(1.0);
    if (!(target_expected_signals >= floor - 1e-12 && target_expected_signals <= ceiling + 1e-12)) {
        std::ostringstream msg;
        msg << "expected signal count " << target_expected_signals << " is not attainable; range is ["
            << floor << ", " << ceiling << "]";
        throw InputError(msg.str());
    }
    if (target_expected_signals <= floor) return 0.0;
    if (target_expected_signals >= ceiling) return 1.0;
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        if (signals(mid) < target_expected_signals) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace andova

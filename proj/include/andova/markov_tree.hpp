#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace andova {

// 2x2 transition matrix, rows = parent state {null, alt}, columns = child state.
using Matrix2 = std::array<std::array<double, 2>, 2>;

// Level-symmetric prior: rho_01(j) = min(1, beta 2^-j), rho_11(j) = delta, and
// P(S(root) = 1) = min(1, beta / 2) unless overridden.
struct LevelPrior {
    double beta = 0.07;
    double delta = 0.4;
    std::optional<double> root_alt;

    void validate() const;
    double root_alt_prob() const;
    double alt_from_null(int level) const;
};

// Per-window prior transitions of a Markov tree stored in heap order. The root
// matrix has two identical rows holding P(S(root) = s).
class TransitionSpec {
public:
    explicit TransitionSpec(std::vector<Matrix2> matrices);
    static TransitionSpec level_rule(int tree_depth, const LevelPrior& prior);

    std::size_t size() const { return matrices_.size(); }
    int depth() const { return depth_; }
    const Matrix2& operator[](std::size_t t) const { return matrices_[t]; }
    bool has_children(std::size_t t) const { return 2 * t + 2 < matrices_.size(); }

private:
    std::vector<Matrix2> matrices_;
    int depth_;
};

struct NodeEvidence {
    double log_bf = 0.0;
    // Data from at most one group: the message is pinned to (1, 1).
    bool degenerate = false;
};

// Upward messages phi(A), kept on the log scale and rescaled so the larger
// component is exp(0). log_scale[t] is the shift applied at node t, and
// subtree_log_scale[t] the total shift accumulated below and at t.
struct MessageSet {
    std::vector<std::array<double, 2>> log_phi;
    std::vector<double> log_scale;
    std::vector<double> subtree_log_scale;

    std::array<double, 2> unscaled_log_phi(std::size_t t) const {
        return {log_phi[t][0] + subtree_log_scale[t], log_phi[t][1] + subtree_log_scale[t]};
    }
};

MessageSet upward_messages(std::span<const NodeEvidence> evidence, const TransitionSpec& prior);

struct PosteriorTransitions {
    std::vector<Matrix2> matrices;
    std::vector<double> log_stay_null;  // log rho~_00, kept for underflow-free PJAP
};

PosteriorTransitions posterior_transitions(const MessageSet& messages, const TransitionSpec& prior,
                                           std::span<const NodeEvidence> evidence);

struct Marginals {
    std::vector<double> alt_prob;  // PMAP (or PrMAP) per window
    double log_joint_null = 0.0;   // log prod rho_00 over all windows
    double joint_alt() const;      // PJAP (or PrJAP)
    double joint_null() const;
    double expected_alt_count() const;
};

Marginals downward_marginals(const PosteriorTransitions& posterior);
Marginals prior_marginals(const TransitionSpec& prior);

// Graphical posterior in one call: messages -> transitions -> marginals.
struct TreePosterior {
    MessageSet messages;
    PosteriorTransitions transitions;
    Marginals marginals;
};
TreePosterior solve_tree(std::span<const NodeEvidence> evidence, const TransitionSpec& prior);

// --- Prior elicitation -----------------------------------------------------
// `partition_depth` K is the depth of the window partition; the Markov tree
// covers its split-bearing windows, levels 0..K-1.

// 1 - (1 - rho_root) prod_{j=1}^{K-1} (1 - min(1, beta 2^-j))^(2^j)
double prjap_closed_form(double beta, int partition_depth, std::optional<double> root_alt = std::nullopt);

// PrMAP per level and total expected number of alternative windows, by the
// level-wise form of the prior marginal recursion.
struct LevelPriorSummary {
    std::vector<double> prmap_by_level;
    double prjap = 0.0;
    double expected_signals = 0.0;
};
LevelPriorSummary level_prior_summary(const LevelPrior& prior, int partition_depth);

double elicit_beta(double target_prjap, int partition_depth);
double elicit_delta(double target_expected_signals, double beta, int partition_depth);

}  // namespace andova

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "andova/partition.hpp"

namespace andova {

struct BetaPrior {
    double shape1 = 0.5;
    double shape2 = 0.5;

    void validate() const;
    double mean() const { return shape1 / (shape1 + shape2); }
    double variance() const;
    double log_density(double theta) const;
};

// Discretised hyperprior on the Beta-Binomial precision nu. log10(nu) is uniform
// on [lo_exp, hi_exp]; the range is cut into equal cells and each cell is
// represented by its midpoint, so every point carries weight 1/T. The infinite
// grid places all mass on nu = infinity (no in-group variation).
class NuGrid {
public:
    static NuGrid log10_uniform(int points, double lo_exp = -1.0, double hi_exp = 4.0);
    static NuGrid infinite();

    bool is_infinite() const { return infinite_; }
    std::size_t size() const { return nu_.size(); }
    double nu(std::size_t h) const { return nu_[h]; }
    double log_weight(std::size_t h) const { return log_weight_[h]; }
    std::span<const double> points() const { return nu_; }
    std::span<const double> log_weights() const { return log_weight_; }
    double lo_exp() const { return lo_exp_; }
    double hi_exp() const { return hi_exp_; }

private:
    std::vector<double> nu_;
    std::vector<double> log_weight_;
    double lo_exp_ = 0.0;
    double hi_exp_ = 0.0;
    bool infinite_ = false;
};

struct SplitCount {
    std::int64_t left = 0;
    std::int64_t right = 0;
    std::int64_t total() const { return left + right; }
};

// log of B(theta*nu + n1, (1-theta)*nu + n2) / B(theta*nu, (1-theta)*nu);
// n1*log(theta) + n2*log(1-theta) when nu is infinite.
double log_d(std::int64_t n1, std::int64_t n2, double theta, double nu);

// One inner integral  int prod_j D(n_lj, n_rj, theta, nu) dF(theta).
struct InnerIntegral {
    enum class Method : std::uint8_t {
        laplace,        // Laplace in theta around an interior mode
        logit_laplace,  // Laplace on the logit scale; the theta-mode is on the boundary
        conjugate,      // nu = infinity, closed form
        no_data,        // empty cell, the prior integrates to one
    };
    double log_value = 0.0;
    double mode = 0.5;
    double curvature = -1.0;  // second derivative of the log integrand in theta at the mode
    Method method = Method::no_data;
};

// Laplace approximation of the inner integral (exact for nu = infinity and for
// empty cells). Throws NumericalError if Newton-Raphson fails to converge.
InnerIntegral laplace_inner(std::span<const SplitCount> counts, double nu, const BetaPrior& prior,
                            std::optional<double> start = std::nullopt);

// Value and first two theta-derivatives of sum_j log D(...) + log f(theta).
struct LogIntegrand {
    double value;
    double d1;
    double d2;
};
LogIntegrand log_integrand(std::span<const SplitCount> counts, double theta, double nu,
                           const BetaPrior& prior);

using GroupSplitCounts = std::vector<std::vector<SplitCount>>;

struct WindowEvidence {
    double log_m0 = 0.0;
    double log_m1 = 0.0;
    double log_bf = 0.0;
    // Data from at most one group (or none): no evidence either way, log_bf == 0.
    bool degenerate = true;
    std::size_t group_count = 0;
    // Per grid point. Empty when the window holds no data at all.
    std::vector<InnerIntegral> null_cell;
    std::vector<std::vector<InnerIntegral>> group_cells;  // [group][grid point]

    bool has_cells() const { return !null_cell.empty(); }
};

WindowEvidence window_evidence(const GroupSplitCounts& counts, const NuGrid& grid,
                               const BetaPrior& prior0 = {}, const BetaPrior& prior1 = {});

// Posterior expected effect sizes: pmap * E(eff_i | S = 1, x) for every group.
std::vector<double> effect_size(const WindowEvidence& evidence, const NuGrid& grid, double pmap);

// (n_ij(A_l), n_ij(A_r)) grouped by group, for a non-leaf window.
GroupSplitCounts split_counts(const CountTree& counts, std::size_t window);

}  // namespace andova

#pragma once

#include <span>
#include <vector>

#include "andova/beta_binomial.hpp"
#include "andova/partition.hpp"

namespace andova {

// rho BF / ((1 - rho) + rho BF), evaluated on the log-odds scale.
double pmap_independent(double log_bf, double rho);

// Level rule rho(j) = min(1, beta 2^-j) for every split-bearing window of a
// depth-K partition (levels 0..K-1), heap order.
std::vector<double> level_rule_rho(int partition_depth, double beta);

// Evidence for every split-bearing window (heap indices 0 .. 2^K - 2).
// Convergence failures are rethrown with the window identity attached.
std::vector<WindowEvidence> evidence_tree(const CountTree& counts, const NuGrid& grid,
                                          const BetaPrior& prior0, const BetaPrior& prior1,
                                          int threads = 1);

struct IndependentFit {
    std::vector<WindowEvidence> evidence;
    std::vector<double> pmap;
    std::vector<std::vector<double>> effect;  // [window][group]
};

// Window-autonomous ms-BB fit. With restrict_nu_infinity the supplied grid is
// replaced by the single point nu = infinity.
IndependentFit fit_independent(const CountTree& counts, const NuGrid& grid, const BetaPrior& prior0,
                               const BetaPrior& prior1, std::span<const double> rho,
                               bool restrict_nu_infinity, int threads = 1);

}  // namespace andova

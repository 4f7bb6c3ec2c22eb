#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "andova/beta_binomial.hpp"
#include "andova/markov_tree.hpp"
#include "andova/partition.hpp"

namespace andova {

using Rng = std::mt19937_64;

// One joint draw from the graphical ms-BB posterior over the split-bearing windows.
struct PosteriorDraw {
    std::vector<std::uint8_t> state;                   // S(A)
    std::vector<double> nu;                            // nu(A); infinity for the restricted model
    std::vector<std::vector<double>> theta_group;      // [window][group]
    std::vector<std::vector<double>> theta_replicate;  // [window][cell]
    // A truncated-normal theta draw exhausted its rejection budget and was clamped.
    bool clamped = false;
};

// Root from its marginal, every other window from the rho~ row picked by its parent's state.
std::vector<std::uint8_t> sample_states(const PosteriorTransitions& posterior, Rng& rng);

PosteriorDraw sample_params(std::span<const std::uint8_t> states,
                            std::span<const WindowEvidence> evidence, const NuGrid& grid,
                            const CountTree& counts, const BetaPrior& prior0,
                            const BetaPrior& prior1, Rng& rng);

PosteriorDraw sample_posterior(const PosteriorTransitions& posterior,
                               std::span<const WindowEvidence> evidence, const NuGrid& grid,
                               const CountTree& counts, const BetaPrior& prior0,
                               const BetaPrior& prior1, std::uint64_t seed);

// Conjugate update of a replicate PAC given the group PAC and the precision.
struct ReplicatePosterior {
    double theta;
    double nu;
};
ReplicatePosterior replicate_posterior(double theta_group, double nu, std::int64_t n_left,
                                       std::int64_t n_total);

// Beta(a, b) draw on the log-gamma scale, kept strictly inside (0, 1).
double sample_beta(double a, double b, Rng& rng);

// N(mean, sd^2) truncated to (0, 1) by rejection; clamps after `max_tries` misses.
double sample_unit_normal(double mean, double sd, Rng& rng, bool& clamped, int max_tries = 100);

}  // namespace andova

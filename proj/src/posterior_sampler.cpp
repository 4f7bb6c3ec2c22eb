#include "andova/posterior_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "andova/error.hpp"
#include "andova/numeric.hpp"

namespace andova {

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

double unit_interior(double x) {
    return std::clamp(x, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
}

// log of a Gamma(shape, 1) draw; shape < 1 is boosted to keep precision.
double log_gamma_draw(double shape, Rng& rng) {
    if (shape < 1.0) {
        std::gamma_distribution<double> g(shape + 1.0, 1.0);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double v = u(rng);
        while (v <= 0.0) v = u(rng);
        return std::log(std::max(g(rng), kTiny)) + std::log(v) / shape;
    }
    std::gamma_distribution<double> g(shape, 1.0);
    return std::log(std::max(g(rng), kTiny));
}

std::size_t draw_index(std::span<const double> log_weights, Rng& rng) {
    const double norm = numeric::log_sum_exp(log_weights);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double target = u(rng);
    double acc = 0.0;
    for (std::size_t h = 0; h < log_weights.size(); ++h) {
        acc += std::exp(log_weights[h] - norm);
        if (target < acc) return h;
    }
    return log_weights.size() - 1;
}

double draw_theta(const InnerIntegral& cell, const BetaPrior& prior, Rng& rng, bool& clamped) {
    if (cell.method == InnerIntegral::Method::no_data)
        return sample_beta(prior.shape1, prior.shape2, rng);
    return sample_unit_normal(cell.mode, std::sqrt(-1.0 / cell.curvature), rng, clamped);
}

}  // namespace

double sample_beta(double a, double b, Rng& rng) {
    const double la = log_gamma_draw(a, rng);
    const double lb = log_gamma_draw(b, rng);
    return unit_interior(numeric::sigmoid(la - lb));
}

double sample_unit_normal(double mean, double sd, Rng& rng, bool& clamped, int max_tries) {
    std::normal_distribution<double> n(mean, sd);
    for (int i = 0; i < max_tries; ++i) {
        const double x = n(rng);
        if (x > 0.0 && x < 1.0) return x;
    }
    clamped = true;
    return unit_interior(mean);
}

ReplicatePosterior replicate_posterior(double theta_group, double nu, std::int64_t n_left,
                                       std::int64_t n_total) {
    if (std::isinf(nu)) return {theta_group, nu};
    const double n = static_cast<double>(n_total);
    return {(theta_group * nu + static_cast<double>(n_left)) / (nu + n), nu + n};
}

std::vector<std::uint8_t> sample_states(const PosteriorTransitions& posterior, Rng& rng) {
    const std::size_t n = posterior.matrices.size();
    std::vector<std::uint8_t> s(n, 0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t t = 0; t < n; ++t) {
        const std::uint8_t parent = t == 0 ? 0 : s[(t - 1) / 2];
        s[t] = u(rng) < posterior.matrices[t][parent][1] ? 1 : 0;
    }
    return s;
}

PosteriorDraw sample_params(std::span<const std::uint8_t> states,
                            std::span<const WindowEvidence> evidence, const NuGrid& grid,
                            const CountTree& counts, const BetaPrior& prior0,
                            const BetaPrior& prior1, Rng& rng) {
    if (states.size() != evidence.size()) throw InputError("sample_params: size mismatch");
    const std::size_t k = counts.group_count();
    const std::size_t T = grid.size();
    PosteriorDraw d;
    d.state.assign(states.begin(), states.end());
    d.nu.resize(states.size());
    d.theta_group.assign(states.size(), std::vector<double>(k));
    d.theta_replicate.assign(states.size(), std::vector<double>(counts.cell_count()));

    std::vector<double> logw(T);
    for (std::size_t t = 0; t < states.size(); ++t) {
        const auto& ev = evidence[t];
        const bool alt = states[t] != 0;
        for (std::size_t h = 0; h < T; ++h) {
            double lw = grid.log_weight(h);
            if (ev.has_cells()) {
                if (alt)
                    for (std::size_t i = 0; i < k; ++i) lw += ev.group_cells[i][h].log_value;
                else
                    lw += ev.null_cell[h].log_value;
            }
            logw[h] = lw;
        }
        const std::size_t h = draw_index(logw, rng);
        const double nu = grid.nu(h);
        d.nu[t] = nu;

        auto& theta = d.theta_group[t];
        if (!alt) {
            const double shared = ev.has_cells() ? draw_theta(ev.null_cell[h], prior0, rng, d.clamped)
                                                 : sample_beta(prior0.shape1, prior0.shape2, rng);
            std::fill(theta.begin(), theta.end(), shared);
        } else {
            for (std::size_t i = 0; i < k; ++i)
                theta[i] = ev.has_cells() ? draw_theta(ev.group_cells[i][h], prior1, rng, d.clamped)
                                          : sample_beta(prior1.shape1, prior1.shape2, rng);
        }

        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t c = counts.group_begin(i); c < counts.group_end(i); ++c) {
                const auto upd = replicate_posterior(theta[i], nu, counts.left_count(t, c),
                                                     counts.count(t, c));
                d.theta_replicate[t][c] =
                    std::isinf(upd.nu) ? upd.theta
                                       : sample_beta(upd.theta * upd.nu, (1.0 - upd.theta) * upd.nu, rng);
            }
    }
    return d;
}

PosteriorDraw sample_posterior(const PosteriorTransitions& posterior,
                               std::span<const WindowEvidence> evidence, const NuGrid& grid,
                               const CountTree& counts, const BetaPrior& prior0,
                               const BetaPrior& prior1, std::uint64_t seed) {
    Rng rng(seed);
    const auto states = sample_states(posterior, rng);
    return sample_params(states, evidence, grid, counts, prior0, prior1, rng);
}

}  // namespace andova

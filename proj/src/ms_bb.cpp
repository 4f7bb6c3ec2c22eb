#include "andova/ms_bb.hpp"

#include <cmath>
#include <sstream>

#include "andova/error.hpp"
#include "andova/numeric.hpp"
#include "andova/parallel.hpp"

namespace andova {

double pmap_independent(double log_bf, double rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw InputError("rho must lie in [0, 1]");
    if (rho == 0.0 || rho == 1.0 || log_bf == 0.0) return rho;
    return numeric::sigmoid(numeric::logit(rho) + log_bf);
}

std::vector<double> level_rule_rho(int partition_depth, double beta) {
    if (partition_depth < 1) throw InputError("partition depth must be at least 1");
    std::vector<double> rho((std::size_t{1} << partition_depth) - 1);
    for (int j = 0; j < partition_depth; ++j)
        for (std::size_t t = (std::size_t{1} << j) - 1; t < (std::size_t{2} << j) - 1; ++t)
            rho[t] = std::min(1.0, std::ldexp(beta, -j));
    return rho;
}

std::vector<WindowEvidence> evidence_tree(const CountTree& counts, const NuGrid& grid,
                                          const BetaPrior& prior0, const BetaPrior& prior1,
                                          int threads) {
    if (counts.max_depth() < 1) throw InputError("partition depth must be at least 1");
    prior0.validate();
    prior1.validate();
    const std::size_t n = (std::size_t{1} << counts.max_depth()) - 1;
    std::vector<WindowEvidence> out(n);
    parallel_for(n, threads, [&](std::size_t t) {
        try {
            out[t] = window_evidence(split_counts(counts, t), grid, prior0, prior1);
        } catch (const NumericalError& e) {
            const int level = static_cast<int>(std::floor(std::log2(static_cast<double>(t + 1))));
            std::ostringstream msg;
            msg << "window " << t << " (level " << level << ", index "
                << t + 1 - (std::size_t{1} << level) << "): " << e.what();
            throw NumericalError(msg.str());
        }
    });
    return out;
}

IndependentFit fit_independent(const CountTree& counts, const NuGrid& grid, const BetaPrior& prior0,
                               const BetaPrior& prior1, std::span<const double> rho,
                               bool restrict_nu_infinity, int threads) {
    const NuGrid used = restrict_nu_infinity ? NuGrid::infinite() : grid;
    IndependentFit fit;
    fit.evidence = evidence_tree(counts, used, prior0, prior1, threads);
    if (rho.size() != fit.evidence.size())
        throw InputError("fit_independent: need one rho per split-bearing window");
    fit.pmap.resize(rho.size());
    fit.effect.resize(rho.size());
    for (std::size_t t = 0; t < rho.size(); ++t) {
        const auto& ev = fit.evidence[t];
        fit.pmap[t] = ev.degenerate ? rho[t] : pmap_independent(ev.log_bf, rho[t]);
        fit.effect[t] = effect_size(ev, used, fit.pmap[t]);
    }
    return fit;
}

}  // namespace andova

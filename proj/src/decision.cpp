#include "andova/decision.hpp"

#include <algorithm>

#include "andova/error.hpp"

namespace andova {

namespace {

void check_pmaps(std::span<const double> pmaps) {
    for (double p : pmaps)
        if (!(p >= 0.0 && p <= 1.0)) throw InputError("PMAPs must lie in [0, 1]");
}

}  // namespace

std::optional<double> bayesian_fdr(std::span<const double> pmaps, double c) {
    check_pmaps(pmaps);
    double sum = 0.0;
    std::size_t called = 0;
    for (double p : pmaps)
        if (p > c) {
            sum += p;
            ++called;
        }
    if (called == 0) return std::nullopt;
    return std::clamp(1.0 - sum / static_cast<double>(called), 0.0, 1.0);
}

double threshold_for_fdr(std::span<const double> pmaps, double target) {
    check_pmaps(pmaps);
    if (!(target > 0.0 && target < 1.0)) throw InputError("FDR target must lie in (0, 1)");
    std::vector<double> sorted(pmaps.begin(), pmaps.end());
    std::sort(sorted.begin(), sorted.end());

    // Called set for candidate c is the suffix of `sorted` strictly above c.
    // Walk candidates in increasing order, maintaining the suffix sum.
    const std::size_t n = sorted.size();
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + sorted[i];

    auto fdr_above = [&](double c) -> std::optional<double> {
        const std::size_t first = static_cast<std::size_t>(
            std::upper_bound(sorted.begin(), sorted.end(), c) - sorted.begin());
        if (first == n) return std::nullopt;
        return 1.0 - suffix[first] / static_cast<double>(n - first);
    };

    std::vector<double> candidates{0.0};
    for (double p : sorted)
        if (p > candidates.back()) candidates.push_back(p);
    for (double c : candidates) {
        const auto fdr = fdr_above(c);
        if (fdr && *fdr <= target) return c;
    }
    return 1.0;
}

DecisionReport decide_fixed(std::span<const double> pmaps, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw InputError("threshold must lie in [0, 1]");
    DecisionReport r;
    r.threshold = threshold;
    for (std::size_t i = 0; i < pmaps.size(); ++i)
        if (pmaps[i] > threshold) r.significant.push_back(i);
    r.achieved_fdr = bayesian_fdr(pmaps, threshold);
    return r;
}

DecisionReport decide_fdr(std::span<const double> pmaps, double target) {
    DecisionReport r = decide_fixed(pmaps, threshold_for_fdr(pmaps, target));
    r.target_fdr = target;
    return r;
}

}  // namespace andova

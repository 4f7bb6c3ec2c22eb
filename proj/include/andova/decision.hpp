#pragma once

#include <optional>
#include <span>
#include <vector>

namespace andova {

// 1 - mean PMAP over windows with PMAP > c; empty when nothing is called.
std::optional<double> bayesian_fdr(std::span<const double> pmaps, double c);

// Smallest candidate threshold (0 or a distinct PMAP value) whose Bayesian FDR
// does not exceed `target`; 1 (no calls) when none qualifies.
double threshold_for_fdr(std::span<const double> pmaps, double target);

struct DecisionReport {
    double threshold = 0.5;
    std::vector<std::size_t> significant;  // indices with PMAP > threshold
    std::optional<double> achieved_fdr;
    std::optional<double> target_fdr;
};

DecisionReport decide_fixed(std::span<const double> pmaps, double threshold = 0.5);
DecisionReport decide_fdr(std::span<const double> pmaps, double target = 0.1);

}  // namespace andova

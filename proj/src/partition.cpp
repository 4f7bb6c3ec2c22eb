#include "andova/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "andova/error.hpp"

namespace andova {

namespace {

constexpr int kMaxDepth = 26;

// Solves cdf(c) = target on [a, b] by bisection.
double invert_cdf(const std::function<double(double)>& cdf, double target, double a, double b) {
    double lo = a;
    double hi = b;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (cdf(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return lo + 0.5 * (hi - lo);
}

}  // namespace

WindowTree::WindowTree(double omega_lo, double omega_hi, int max_depth, SplitRule::Kind rule,
                       std::vector<Window> windows)
    : omega_lo_(omega_lo),
      omega_hi_(omega_hi),
      max_depth_(max_depth),
      rule_(rule),
      windows_(std::move(windows)) {}

std::size_t WindowTree::locate(double x, int level) const {
    std::size_t t = 0;
    for (int j = 0; j < level; ++j) t = x < split_point(t) ? left_child(t) : right_child(t);
    return t;
}

WindowTree build_ndp(double omega_lo, double omega_hi, int max_depth, const SplitRule& rule) {
    if (!(std::isfinite(omega_lo) && std::isfinite(omega_hi) && omega_lo < omega_hi))
        throw InputError("build_ndp: sample space must be a finite interval with lo < hi");
    if (max_depth < 0 || max_depth > kMaxDepth)
        throw InputError("build_ndp: max depth must be in [0, " + std::to_string(kMaxDepth) + "]");
    if (rule.kind == SplitRule::Kind::quantile && !rule.cdf)
        throw InputError("build_ndp: quantile rule needs a base CDF");

    if (rule.kind == SplitRule::Kind::midpoint) {
        // Spacing is coarsest at the end of largest magnitude; walk both edge paths first.
        for (bool leftmost : {true, false}) {
            double a = omega_lo;
            double b = omega_hi;
            for (int j = 0; j < max_depth; ++j) {
                const double c = a + 0.5 * (b - a);
                if (!(c > a && c < b)) {
                    std::ostringstream msg;
                    msg << "build_ndp: windows at level " << j << " cannot be split at machine precision; "
                        << "reduce the depth";
                    throw InputError(msg.str());
                }
                (leftmost ? b : a) = c;
            }
        }
    }

    std::vector<Window> windows(WindowTree::window_count(max_depth));
    windows[0] = {0, 0, omega_lo, omega_hi};
    for (std::size_t t = 0; t < windows.size(); ++t) {
        const Window& w = windows[t];
        if (w.level == max_depth) continue;
        double c = 0.0;
        if (rule.kind == SplitRule::Kind::midpoint) {
            c = w.lo + 0.5 * (w.hi - w.lo);
        } else {
            const double fa = rule.cdf(w.lo);
            const double fb = rule.cdf(w.hi);
            if (!(fb > fa))
                throw InputError("build_ndp: base CDF puts no mass on window [" +
                                 std::to_string(w.lo) + ", " + std::to_string(w.hi) + "]");
            c = invert_cdf(rule.cdf, 0.5 * (fa + fb), w.lo, w.hi);
        }
        if (!(c > w.lo && c < w.hi)) {
            std::ostringstream msg;
            msg << "build_ndp: window at level " << w.level << " [" << w.lo << ", " << w.hi
                << "] cannot be split at machine precision; reduce the depth";
            throw InputError(msg.str());
        }
        windows[WindowTree::left_child(t)] = {w.level + 1, 2 * w.index_in_level, w.lo, c};
        windows[WindowTree::right_child(t)] = {w.level + 1, 2 * w.index_in_level + 1, c, w.hi};
    }
    return WindowTree(omega_lo, omega_hi, max_depth, rule.kind, std::move(windows));
}

std::size_t Dataset::replicate_count() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.replicates.size();
    return n;
}

void Dataset::validate_design() const {
    if (groups.size() < 2)
        throw InputError("dataset needs at least 2 groups, found " + std::to_string(groups.size()));
    for (const auto& g : groups)
        if (g.replicates.empty()) throw InputError("group '" + g.label + "' has no replicates");
}

std::pair<double, double> default_omega(const Dataset& data) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& g : data.groups)
        for (const auto& r : g.replicates)
            for (double x : r.values) {
                if (!std::isfinite(x)) throw InputError("dataset contains a non-finite value");
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
    if (!(lo <= hi)) throw InputError("dataset has no observations; cannot infer sample space");
    const double range = hi - lo;
    const double pad = range > 0.0 ? 0.005 * range : 0.5 * std::max(1.0, std::abs(lo));
    return {lo - pad, hi + pad};
}

CountTree::CountTree(std::size_t window_count, int max_depth, std::vector<std::size_t> group_offsets)
    : window_count_(window_count),
      max_depth_(max_depth),
      group_offsets_(std::move(group_offsets)),
      counts_(window_count * group_offsets_.back(), 0) {}

std::int64_t CountTree::left_count(std::size_t window, std::size_t cell) const {
    if (!has_split(window)) throw InputError("left_count: leaf window has no split counts");
    return count(2 * window + 1, cell);
}

std::int64_t CountTree::right_count(std::size_t window, std::size_t cell) const {
    if (!has_split(window)) throw InputError("right_count: leaf window has no split counts");
    return count(2 * window + 2, cell);
}

std::size_t CountTree::groups_present(std::size_t window) const {
    std::size_t present = 0;
    for (std::size_t g = 0; g < group_count(); ++g) {
        for (std::size_t c = group_begin(g); c < group_end(g); ++c)
            if (count(window, c) > 0) {
                ++present;
                break;
            }
    }
    return present;
}

CountTree bin_counts(const WindowTree& tree, const Dataset& data) {
    std::vector<std::size_t> offsets{0};
    for (const auto& g : data.groups) offsets.push_back(offsets.back() + g.replicates.size());
    CountTree counts(tree.size(), tree.max_depth(), std::move(offsets));

    const double lo = tree.omega_lo();
    const double hi = tree.omega_hi();
    for (std::size_t gi = 0; gi < data.groups.size(); ++gi) {
        const auto& group = data.groups[gi];
        for (std::size_t ri = 0; ri < group.replicates.size(); ++ri) {
            const std::size_t cell = counts.cell(gi, ri);
            const auto& values = group.replicates[ri].values;
            for (std::size_t l = 0; l < values.size(); ++l) {
                const double x = values[l];
                if (!(x >= lo && x <= hi)) {
                    std::ostringstream msg;
                    msg << "observation " << l << " of group '" << group.label << "' replicate '"
                        << group.replicates[ri].label << "' (" << x << ") lies outside ["
                        << lo << ", " << hi << "]";
                    throw InputError(msg.str());
                }
                std::size_t t = 0;
                ++counts.at(t, cell);
                for (int j = 0; j < tree.max_depth(); ++j) {
                    t = x < tree.split_point(t) ? WindowTree::left_child(t)
                                                : WindowTree::right_child(t);
                    ++counts.at(t, cell);
                }
            }
        }
    }
    return counts;
}

}  // namespace andova

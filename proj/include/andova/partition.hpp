#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace andova {

// Splitting rule for the nested dyadic partition.
struct SplitRule {
    enum class Kind { midpoint, quantile };
    Kind kind = Kind::midpoint;
    // Base CDF for the quantile rule; must be continuous and non-decreasing on the root interval.
    std::function<double(double)> cdf;

    static SplitRule midpoint() { return {}; }
    static SplitRule quantile(std::function<double(double)> base_cdf) {
        return {Kind::quantile, std::move(base_cdf)};
    }
};

struct Window {
    int level = 0;
    std::int64_t index_in_level = 0;
    double lo = 0.0;
    double hi = 0.0;
};

// Heap-ordered dyadic window tree: node t has children 2t+1 and 2t+2.
class WindowTree {
public:
    WindowTree(double omega_lo, double omega_hi, int max_depth, SplitRule::Kind rule,
               std::vector<Window> windows);

    double omega_lo() const { return omega_lo_; }
    double omega_hi() const { return omega_hi_; }
    int max_depth() const { return max_depth_; }
    SplitRule::Kind split_rule() const { return rule_; }

    std::size_t size() const { return windows_.size(); }
    const Window& operator[](std::size_t t) const { return windows_[t]; }
    std::span<const Window> windows() const { return windows_; }

    bool is_leaf(std::size_t t) const { return windows_[t].level == max_depth_; }
    static std::optional<std::size_t> parent(std::size_t t) {
        if (t == 0) return std::nullopt;
        return (t - 1) / 2;
    }
    static std::size_t left_child(std::size_t t) { return 2 * t + 1; }
    static std::size_t right_child(std::size_t t) { return 2 * t + 2; }
    static std::size_t first_of_level(int level) { return (std::size_t{1} << level) - 1; }
    static std::size_t window_count(int depth) { return (std::size_t{1} << (depth + 1)) - 1; }

    // Split point of a non-leaf window (== left child's hi).
    double split_point(std::size_t t) const { return windows_[left_child(t)].hi; }

    // Heap index of the level-`level` window containing x (x inside the root).
    std::size_t locate(double x, int level) const;

private:
    double omega_lo_;
    double omega_hi_;
    int max_depth_;
    SplitRule::Kind rule_;
    std::vector<Window> windows_;
};

WindowTree build_ndp(double omega_lo, double omega_hi, int max_depth,
                     const SplitRule& rule = SplitRule::midpoint());

struct Replicate {
    std::string label;
    std::vector<double> values;
};

struct Group {
    std::string label;
    std::vector<Replicate> replicates;
};

struct Dataset {
    std::vector<Group> groups;

    std::size_t group_count() const { return groups.size(); }
    std::size_t replicate_count() const;
    // Throws InputError unless k >= 2 and every group has at least one replicate.
    void validate_design() const;
};

// Default sample space: data range padded by 0.5% on each side.
std::pair<double, double> default_omega(const Dataset& data);

// Per-window, per-(group, replicate) counts. Cells are numbered group-major.
class CountTree {
public:
    CountTree(std::size_t window_count, int max_depth, std::vector<std::size_t> group_offsets);

    std::size_t window_count() const { return window_count_; }
    std::size_t cell_count() const { return group_offsets_.back(); }
    std::size_t group_count() const { return group_offsets_.size() - 1; }
    int max_depth() const { return max_depth_; }
    std::size_t cell(std::size_t group, std::size_t replicate) const {
        return group_offsets_[group] + replicate;
    }
    std::size_t group_begin(std::size_t group) const { return group_offsets_[group]; }
    std::size_t group_end(std::size_t group) const { return group_offsets_[group + 1]; }

    std::int64_t count(std::size_t window, std::size_t cell) const {
        return counts_[window * cell_count() + cell];
    }
    // n(A_l); only defined for non-leaf windows.
    std::int64_t left_count(std::size_t window, std::size_t cell) const;
    std::int64_t right_count(std::size_t window, std::size_t cell) const;
    bool has_split(std::size_t window) const { return 2 * window + 2 < window_count_; }

    std::span<const std::int64_t> row(std::size_t window) const {
        return {counts_.data() + window * cell_count(), cell_count()};
    }
    std::int64_t& at(std::size_t window, std::size_t cell) {
        return counts_[window * cell_count() + cell];
    }

    // Number of groups with a positive total count in the window.
    std::size_t groups_present(std::size_t window) const;

private:
    std::size_t window_count_;
    int max_depth_;
    std::vector<std::size_t> group_offsets_;
    std::vector<std::int64_t> counts_;
};

// Bins every replicate into the tree. Left children own [lo, c), the rightmost
// window of each level is closed on the right.
CountTree bin_counts(const WindowTree& tree, const Dataset& data);

}  // namespace andova

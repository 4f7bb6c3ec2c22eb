#include "andova/beta_binomial.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "andova/error.hpp"
#include "andova/numeric.hpp"

namespace andova {

using numeric::kNegInf;
using numeric::log_beta;
using numeric::log_gamma;

namespace {

constexpr double kThetaLo = 1e-10;
constexpr double kThetaHi = 1.0 - 1e-10;
constexpr double kGradTol = 1e-8;
constexpr int kMaxIter = 100;
// Below this count the digamma/trigamma differences are summed directly.
constexpr std::int64_t kDirectSumLimit = 48;

// psi(x + n) - psi(x)
double digamma_diff(double x, std::int64_t n) {
    if (n == 0) return 0.0;
    if (n <= kDirectSumLimit) {
        double s = 0.0;
        for (std::int64_t m = 0; m < n; ++m) s += 1.0 / (x + static_cast<double>(m));
        return s;
    }
    return boost::math::digamma(x + static_cast<double>(n)) - boost::math::digamma(x);
}

// psi1(x + n) - psi1(x)
double trigamma_diff(double x, std::int64_t n) {
    if (n == 0) return 0.0;
    if (n <= kDirectSumLimit) {
        double s = 0.0;
        for (std::int64_t m = 0; m < n; ++m) {
            const double v = x + static_cast<double>(m);
            s -= 1.0 / (v * v);
        }
        return s;
    }
    return boost::math::trigamma(x + static_cast<double>(n)) - boost::math::trigamma(x);
}

// log Gamma(x + n) - log Gamma(x)
double log_rising(double x, std::int64_t n) {
    if (n == 0) return 0.0;
    return log_gamma(x + static_cast<double>(n)) - log_gamma(x);
}

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

struct Gradient {
    double d1;
    double d2;
};

Gradient log_integrand_derivs(std::span<const SplitCount> counts, double theta, double nu,
                              const BetaPrior& prior) {
    double d1 = (prior.shape1 - 1.0) / theta - (prior.shape2 - 1.0) / (1.0 - theta);
    double d2 = -(prior.shape1 - 1.0) / (theta * theta) -
                (prior.shape2 - 1.0) / ((1.0 - theta) * (1.0 - theta));
    const double x = theta * nu;
    const double y = (1.0 - theta) * nu;
    for (const auto& c : counts) {
        d1 += nu * (digamma_diff(x, c.left) - digamma_diff(y, c.right));
        d2 += nu * nu * (trigamma_diff(x, c.left) + trigamma_diff(y, c.right));
    }
    return {d1, d2};
}

double log_integrand_value(std::span<const SplitCount> counts, double theta, double nu,
                           const BetaPrior& prior) {
    double v = prior.log_density(theta);
    for (const auto& c : counts) v += log_d(c.left, c.right, theta, nu);
    return v;
}

std::string describe_cell(std::span<const SplitCount> counts, double nu) {
    std::ostringstream s;
    s << "nu=" << nu << " counts=[";
    for (std::size_t i = 0; i < counts.size(); ++i)
        s << (i ? "," : "") << "(" << counts[i].left << "," << counts[i].right << ")";
    s << "]";
    return s.str();
}

// Bracketed Newton on a decreasing-through-zero derivative. `derivs(x)` returns
// (f'(x), f''(x)); the root of f' inside (lo, hi) is returned.
template <class Derivs>
double bracketed_newton(Derivs derivs, double x, double lo, double hi, double grad_tol,
                        const char* what, std::span<const SplitCount> counts, double nu) {
    x = std::clamp(x, lo, hi);
    for (int it = 0; it < kMaxIter; ++it) {
        const auto [g, H] = derivs(x);
        if (!std::isfinite(g)) {
            // Numerically at a boundary: shrink toward the interior.
            if (x <= lo || x >= hi) x = 0.5 * (lo + hi);
            else if (x - lo < hi - x) lo = x;
            else hi = x;
            x = 0.5 * (lo + hi);
            continue;
        }
        if (std::abs(g) < grad_tol) return x;
        if (g > 0.0) lo = x; else hi = x;
        double next = (H < 0.0 && std::isfinite(H)) ? x - g / H : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
            return next;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
            return 0.5 * (lo + hi);
        x = next;
    }
    std::ostringstream msg;
    msg << what << " did not converge after " << kMaxIter << " iterations (last iterate " << x
        << ", " << describe_cell(counts, nu) << ")";
    throw NumericalError(msg.str());
}

InnerIntegral conjugate_inner(std::span<const SplitCount> counts, const BetaPrior& prior) {
    double nl = 0.0;
    double nr = 0.0;
    for (const auto& c : counts) {
        nl += static_cast<double>(c.left);
        nr += static_cast<double>(c.right);
    }
    const double a = prior.shape1 + nl;
    const double b = prior.shape2 + nr;
    InnerIntegral r;
    r.method = InnerIntegral::Method::conjugate;
    r.log_value = log_beta(a, b) - log_beta(prior.shape1, prior.shape2);
    if (a > 1.0 && b > 1.0) {
        r.mode = (a - 1.0) / (a + b - 2.0);
        r.curvature = -(a - 1.0) / (r.mode * r.mode) - (b - 1.0) / ((1.0 - r.mode) * (1.0 - r.mode));
    } else {
        r.mode = a / (a + b);
        r.curvature = -((a + b) * (a + b) * (a + b + 1.0)) / (a * b);
    }
    return r;
}

InnerIntegral theta_laplace(std::span<const SplitCount> counts, double nu, const BetaPrior& prior,
                            double start) {
    auto derivs = [&](double t) {
        const auto g = log_integrand_derivs(counts, t, nu, prior);
        return std::pair{g.d1, g.d2};
    };
    const double mode =
        bracketed_newton(derivs, start, kThetaLo, kThetaHi, kGradTol, "Laplace mode search", counts, nu);
    const double curvature = log_integrand_derivs(counts, mode, nu, prior).d2;
    if (!(curvature < 0.0))
        throw NumericalError("Laplace mode has non-negative curvature (" + describe_cell(counts, nu) + ")");
    InnerIntegral r;
    r.method = InnerIntegral::Method::laplace;
    r.mode = mode;
    r.curvature = curvature;
    r.log_value = log_integrand_value(counts, mode, nu, prior) +
                  0.5 * std::log(-2.0 * std::numbers::pi / curvature);
    return r;
}

// Laplace on eta = logit(theta); the integrand picks up the Jacobian theta(1 - theta).
InnerIntegral logit_laplace(std::span<const SplitCount> counts, double nu, const BetaPrior& prior,
                            double start) {
    auto derivs = [&](double eta) {
        const double t = numeric::sigmoid(eta);
        const double j = t * (1.0 - t);
        const auto g = log_integrand_derivs(counts, t, nu, prior);
        const double d1 = g.d1 * j + (1.0 - 2.0 * t);
        const double d2 = g.d2 * j * j + g.d1 * j * (1.0 - 2.0 * t) - 2.0 * j;
        return std::pair{d1, d2};
    };
    const double eta = bracketed_newton(derivs, numeric::logit(std::clamp(start, 1e-12, 1.0 - 1e-12)),
                                        -36.0, 36.0, kGradTol, "logit Laplace mode search", counts, nu);
    const double d2 = derivs(eta).second;
    if (!(d2 < 0.0))
        throw NumericalError("logit Laplace mode has non-negative curvature (" +
                             describe_cell(counts, nu) + ")");
    const double t = numeric::sigmoid(eta);
    const double j = t * (1.0 - t);
    InnerIntegral r;
    r.method = InnerIntegral::Method::logit_laplace;
    r.mode = t;
    r.curvature = d2 / (j * j);
    r.log_value = log_integrand_value(counts, t, nu, prior) + std::log(j) +
                  0.5 * std::log(-2.0 * std::numbers::pi / d2);
    return r;
}

InnerIntegral no_data(const BetaPrior& prior) {
    InnerIntegral r;
    r.method = InnerIntegral::Method::no_data;
    r.log_value = 0.0;
    r.mode = prior.mean();
    r.curvature = -1.0 / prior.variance();
    return r;
}

}  // namespace

void BetaPrior::validate() const {
    if (!(shape1 > 0.0 && shape2 > 0.0 && std::isfinite(shape1) && std::isfinite(shape2)))
        throw InputError("Beta prior shapes must be positive and finite");
}

double BetaPrior::variance() const {
    const double s = shape1 + shape2;
    return shape1 * shape2 / (s * s * (s + 1.0));
}

double BetaPrior::log_density(double theta) const {
    return xlogy(shape1 - 1.0, theta) + xlogy(shape2 - 1.0, 1.0 - theta) - log_beta(shape1, shape2);
}

NuGrid NuGrid::log10_uniform(int points, double lo_exp, double hi_exp) {
    if (points < 1) throw InputError("nu grid needs at least one point");
    if (!(std::isfinite(lo_exp) && std::isfinite(hi_exp) && lo_exp < hi_exp))
        throw InputError("nu grid bounds must satisfy l < u");
    NuGrid g;
    g.lo_exp_ = lo_exp;
    g.hi_exp_ = hi_exp;
    const double width = (hi_exp - lo_exp) / points;
    for (int h = 0; h < points; ++h) {
        g.nu_.push_back(std::pow(10.0, lo_exp + (h + 0.5) * width));
        g.log_weight_.push_back(-std::log(static_cast<double>(points)));
    }
    return g;
}

NuGrid NuGrid::infinite() {
    NuGrid g;
    g.infinite_ = true;
    g.nu_ = {std::numeric_limits<double>::infinity()};
    g.log_weight_ = {0.0};
    return g;
}

double log_d(std::int64_t n1, std::int64_t n2, double theta, double nu) {
    if (n1 < 0 || n2 < 0) throw InputError("log_d: counts must be non-negative");
    if (!(theta > 0.0 && theta < 1.0)) throw InputError("log_d: theta must lie in (0, 1)");
    if (!(nu > 0.0)) throw InputError("log_d: nu must be positive");
    if (std::isinf(nu))
        return xlogy(static_cast<double>(n1), theta) + xlogy(static_cast<double>(n2), 1.0 - theta);
    return log_rising(theta * nu, n1) + log_rising((1.0 - theta) * nu, n2) - log_rising(nu, n1 + n2);
}

LogIntegrand log_integrand(std::span<const SplitCount> counts, double theta, double nu,
                           const BetaPrior& prior) {
    if (std::isinf(nu)) {
        double nl = 0.0;
        double nr = 0.0;
        for (const auto& c : counts) {
            nl += static_cast<double>(c.left);
            nr += static_cast<double>(c.right);
        }
        const double a = prior.shape1 - 1.0 + nl;
        const double b = prior.shape2 - 1.0 + nr;
        return {log_integrand_value(counts, theta, nu, prior), a / theta - b / (1.0 - theta),
                -a / (theta * theta) - b / ((1.0 - theta) * (1.0 - theta))};
    }
    const auto g = log_integrand_derivs(counts, theta, nu, prior);
    return {log_integrand_value(counts, theta, nu, prior), g.d1, g.d2};
}

InnerIntegral laplace_inner(std::span<const SplitCount> counts, double nu, const BetaPrior& prior,
                            std::optional<double> start) {
    if (!(nu > 0.0)) throw InputError("laplace_inner: nu must be positive");
    std::vector<SplitCount> cell;
    cell.reserve(counts.size());
    double nl = 0.0;
    double nr = 0.0;
    double cl = 0.0;
    double cr = 0.0;
    for (const auto& c : counts) {
        if (c.left < 0 || c.right < 0) throw InputError("laplace_inner: negative count");
        if (c.total() == 0) continue;
        cell.push_back(c);
        nl += static_cast<double>(c.left);
        nr += static_cast<double>(c.right);
        cl += c.left > 0 ? 1.0 : 0.0;
        cr += c.right > 0 ? 1.0 : 0.0;
    }
    if (cell.empty()) return no_data(prior);
    if (std::isinf(nu)) return conjugate_inner(cell, prior);

    const double init = start.value_or((nl + 0.5) / (nl + nr + 1.0));
    if (cl + prior.shape1 - 1.0 > 0.0 && cr + prior.shape2 - 1.0 > 0.0)
        return theta_laplace(cell, nu, prior, init);
    return logit_laplace(cell, nu, prior, init);
}

WindowEvidence window_evidence(const GroupSplitCounts& counts, const NuGrid& grid,
                               const BetaPrior& prior0, const BetaPrior& prior1) {
    const std::size_t k = counts.size();
    const std::size_t T = grid.size();
    WindowEvidence ev;
    ev.group_count = k;

    std::vector<SplitCount> pooled;
    std::vector<bool> present(k, false);
    std::size_t groups_present = 0;
    for (std::size_t i = 0; i < k; ++i) {
        for (const auto& c : counts[i]) {
            if (c.left < 0 || c.right < 0) throw InputError("window_evidence: negative count");
            if (c.total() == 0) continue;
            pooled.push_back(c);
            present[i] = true;
        }
        if (present[i]) ++groups_present;
    }
    ev.degenerate = groups_present <= 1;
    if (groups_present == 0) return ev;

    ev.null_cell.resize(T);
    std::optional<double> start;
    for (std::size_t h = 0; h < T; ++h) {
        ev.null_cell[h] = laplace_inner(pooled, grid.nu(h), prior0, start);
        start = ev.null_cell[h].mode;
    }

    ev.group_cells.assign(k, std::vector<InnerIntegral>(T, no_data(prior1)));
    for (std::size_t i = 0; i < k; ++i) {
        if (!present[i]) continue;
        if (groups_present == 1 && prior0.shape1 == prior1.shape1 && prior0.shape2 == prior1.shape2) {
            ev.group_cells[i] = ev.null_cell;
            continue;
        }
        start.reset();
        for (std::size_t h = 0; h < T; ++h) {
            ev.group_cells[i][h] = laplace_inner(counts[i], grid.nu(h), prior1, start);
            start = ev.group_cells[i][h].mode;
        }
    }

    std::vector<double> terms0(T);
    std::vector<double> terms1(T);
    for (std::size_t h = 0; h < T; ++h) {
        terms0[h] = ev.null_cell[h].log_value + grid.log_weight(h);
        double s = grid.log_weight(h);
        for (std::size_t i = 0; i < k; ++i) s += ev.group_cells[i][h].log_value;
        terms1[h] = s;
    }
    ev.log_m0 = numeric::log_sum_exp(terms0);
    ev.log_m1 = numeric::log_sum_exp(terms1);
    ev.log_bf = ev.degenerate ? 0.0 : ev.log_m1 - ev.log_m0;
    return ev;
}

std::vector<double> effect_size(const WindowEvidence& evidence, const NuGrid& grid, double pmap) {
    const std::size_t k = evidence.group_count;
    std::vector<double> eff(k, 0.0);
    if (evidence.degenerate || !evidence.has_cells() || pmap == 0.0 || k < 2) return eff;

    static constexpr double kClamp = 1e-8;
    auto clamp = [](double t) { return std::clamp(t, kClamp, 1.0 - kClamp); };
    for (std::size_t h = 0; h < grid.size(); ++h) {
        double log_term = grid.log_weight(h) - evidence.log_m1;
        double mode_sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            log_term += evidence.group_cells[i][h].log_value;
            mode_sum += clamp(evidence.group_cells[i][h].mode);
        }
        const double weight = std::exp(log_term);
        for (std::size_t i = 0; i < k; ++i) {
            const double own = clamp(evidence.group_cells[i][h].mode);
            const double rest = (mode_sum - own) / static_cast<double>(k - 1);
            eff[i] += weight * (numeric::logit(own) - numeric::logit(clamp(rest)));
        }
    }
    for (double& e : eff) e *= pmap;
    return eff;
}

GroupSplitCounts split_counts(const CountTree& counts, std::size_t window) {
    GroupSplitCounts out(counts.group_count());
    for (std::size_t g = 0; g < counts.group_count(); ++g) {
        out[g].reserve(counts.group_end(g) - counts.group_begin(g));
        for (std::size_t c = counts.group_begin(g); c < counts.group_end(g); ++c)
            out[g].push_back({counts.left_count(window, c), counts.right_count(window, c)});
    }
    return out;
}

}  // namespace andova

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hdlt/debias.hpp"
#include "hdlt/model.hpp"
#include "hdlt/normal.hpp"

namespace hdlt {

/// Limit law of max_j M_j^2 - 2 log p + log log p under the global null:
/// F(x) = exp(-exp(-x/2) / sqrt(pi)).
inline double gumbel_cdf(double x)
{
    return std::exp(-std::exp(-0.5 * x) / std::sqrt(std::numbers::pi));
}

/// The 1 - alpha quantile of `gumbel_cdf`: -log(pi) - 2 log log (1 - alpha)^{-1}.
inline double gumbel_quantile(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw invalid_input("alpha must lie in (0,1)");
    }
    return -std::log(std::numbers::pi) - 2.0 * std::log(-std::log1p(-alpha));
}

/// Minimum dimension for which the asymptotic thresholds are defined.
inline constexpr Index min_test_dimension = 3;

/// 2 log p - log log p, the centering of the max statistic.
inline double gumbel_centering(Index p)
{
    const double lp = std::log(static_cast<double>(p));
    return 2.0 * lp - std::log(lp);
}

struct GlobalTestResult
{
    double statistic = 0.0; // max_j M_j^2 (or T_j^2)
    double threshold = 0.0; // 2 log p - log log p + q_alpha
    double q_alpha = 0.0;
    double alpha = 0.0;
    Index p = 0;            // dimension the threshold used (|G| for group tests)
    double p_value = 1.0;
    bool reject = false;
    Index argmax = 0;       // coordinate attaining the max, zero-based, in the input vector
};

namespace detail {

inline void check_finite(std::span<const double> values, const char* what)
{
    for (double v : values) {
        if (!std::isfinite(v)) throw invalid_input(std::string(what) + " contains non-finite values");
    }
}

inline GlobalTestResult max_square_test(std::span<const double> stats, double alpha, std::span<const Index> labels)
{
    const Index p = static_cast<Index>(stats.size());
    if (p < min_test_dimension) {
        throw unsupported_dimension("global test needs at least " + std::to_string(min_test_dimension) +
                                    " coordinates, got " + std::to_string(p));
    }
    check_finite(stats, "test statistics");
    GlobalTestResult r;
    r.alpha = alpha;
    r.p = p;
    r.q_alpha = gumbel_quantile(alpha);
    r.threshold = gumbel_centering(p) + r.q_alpha;
    for (std::size_t k = 0; k < stats.size(); ++k) {
        const double sq = stats[k] * stats[k];
        if (sq > r.statistic || k == 0) {
            r.statistic = sq;
            r.argmax = labels[k];
        }
    }
    const double x = r.statistic - gumbel_centering(p);
    r.p_value = std::clamp(-std::expm1(-std::exp(-0.5 * x) / std::sqrt(std::numbers::pi)), 0.0, 1.0);
    r.reject = r.statistic >= r.threshold;
    return r;
}

} // namespace detail

/// Rejects H0: beta = 0 when max_j M_j^2 >= 2 log p - log log p + q_alpha.
inline GlobalTestResult global_test(const Vector& m_stats, double alpha)
{
    std::vector<Index> labels(static_cast<std::size_t>(m_stats.size()));
    for (std::size_t k = 0; k < labels.size(); ++k) labels[k] = static_cast<Index>(k);
    return detail::max_square_test({m_stats.data(), static_cast<std::size_t>(m_stats.size())}, alpha, labels);
}

/// Tests H0: beta_G = 0 with |G| in place of p. `group` holds zero-based indices.
inline GlobalTestResult group_global_test(const Vector& m_stats, std::span<const Index> group, double alpha)
{
    if (group.empty()) {
        throw invalid_input("group is empty");
    }
    std::vector<bool> seen(static_cast<std::size_t>(m_stats.size()), false);
    std::vector<double> values;
    values.reserve(group.size());
    for (Index j : group) {
        if (j < 0 || j >= m_stats.size()) {
            throw invalid_input("group index " + std::to_string(j + 1) + " out of range");
        }
        if (seen[static_cast<std::size_t>(j)]) {
            throw invalid_input("group index " + std::to_string(j + 1) + " repeated");
        }
        seen[static_cast<std::size_t>(j)] = true;
        values.push_back(m_stats[j]);
    }
    return detail::max_square_test(values, alpha, group);
}

enum class MultipleMode
{
    fdr,
    fdv
};

struct MultipleTestResult
{
    double threshold = 0.0;
    std::vector<Index> rejected; // zero-based, ascending
    double target = 0.0;         // alpha (FDR) or r (FDV)
    MultipleMode mode = MultipleMode::fdr;
    bool fallback_used = false;
    double search_bound = 0.0;   // b_p for FDR mode
};

/// b_p = sqrt(2 log p - 2 log log p).
inline double fdr_search_bound(Index p)
{
    const double lp = std::log(static_cast<double>(p));
    return std::sqrt(2.0 * lp - 2.0 * std::log(lp));
}

namespace detail {

inline std::vector<Index> at_or_above(const Vector& stats, double t)
{
    std::vector<Index> out;
    for (Index j = 0; j < stats.size(); ++j) {
        if (std::abs(stats[j]) >= t) out.push_back(j);
    }
    return out;
}

inline std::size_t count_at_or_above(std::span<const double> sorted_abs, double t)
{
    return static_cast<std::size_t>(sorted_abs.end() - std::lower_bound(sorted_abs.begin(), sorted_abs.end(), t));
}

} // namespace detail

/// Threshold t_hat = inf{0 <= t <= b_p : p G(t) / max(R(t), 1) <= alpha},
/// R(t) = #{j : |M_j| >= t}; falls back to sqrt(2 log p) when the set is empty.
///
/// R is constant on each interval between consecutive distinct |M_j|, and the
/// criterion decreases in t there, so the infimum on each piece is either its
/// left end or G^{-1}(alpha R / p). The pieces are scanned left to right.
inline MultipleTestResult lmt_fdr(const Vector& m_stats, double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw invalid_input("FDR level must lie in (0,1)");
    }
    const Index p = m_stats.size();
    if (p < min_test_dimension) {
        throw unsupported_dimension("multiple testing needs at least " + std::to_string(min_test_dimension) +
                                    " coordinates, got " + std::to_string(p));
    }
    detail::check_finite({m_stats.data(), static_cast<std::size_t>(p)}, "test statistics");

    MultipleTestResult result;
    result.mode = MultipleMode::fdr;
    result.target = alpha;
    result.search_bound = fdr_search_bound(p);
    const double bp = result.search_bound;
    const double pd = static_cast<double>(p);

    std::vector<double> sorted(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) sorted[static_cast<std::size_t>(j)] = std::abs(m_stats[j]);
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> cuts(sorted.begin(), std::unique(sorted.begin(), sorted.end()));

    auto criterion = [&](double t) {
        const double r = static_cast<double>(detail::count_at_or_above(sorted, t));
        return pd * normal::two_sided_tail(t) / std::max(r, 1.0);
    };

    std::optional<double> found;
    double left = 0.0;
    for (std::size_t piece = 0; piece <= cuts.size() && left <= bp; ++piece) {
        const double right = piece < cuts.size() ? std::min(cuts[piece], bp) : bp;
        const double r = piece < cuts.size() ? static_cast<double>(detail::count_at_or_above(sorted, cuts[piece])) : 0.0;
        const double level = std::min(alpha * std::max(r, 1.0) / pd, 1.0);
        double t = std::max(left, normal::two_sided_tail_inverse(level));
        if (t <= right) {
            // Nudge past rounding in G(G^{-1}(x)).
            while (criterion(t) > alpha && t < right) t = std::nextafter(t, std::numeric_limits<double>::infinity());
            found = t;
            break;
        }
        if (piece < cuts.size()) left = cuts[piece];
    }

    if (found) {
        result.threshold = *found;
    } else {
        result.fallback_used = true;
        result.threshold = std::sqrt(2.0 * std::log(pd));
    }
    result.rejected = detail::at_or_above(m_stats, result.threshold);
    return result;
}

/// Threshold G^{-1}(r / p); the expected number of false rejections is about r.
inline MultipleTestResult lmt_fdv(const Vector& m_stats, double r)
{
    const Index p = m_stats.size();
    if (p < 1) {
        throw invalid_input("no statistics");
    }
    if (!(r > 0.0 && r < static_cast<double>(p))) {
        throw invalid_input("FDV target r must lie in (0, p)");
    }
    detail::check_finite({m_stats.data(), static_cast<std::size_t>(p)}, "test statistics");
    MultipleTestResult result;
    result.mode = MultipleMode::fdv;
    result.target = r;
    result.threshold = normal::two_sided_tail_inverse(r / static_cast<double>(p));
    result.rejected = detail::at_or_above(m_stats, result.threshold);
    return result;
}

/// T_j = (M_j^(1) - M_j^(2)) / sqrt(2).
inline Vector two_sample_stats(const DebiasedFit& first, const DebiasedFit& second)
{
    if (first.m_stats.size() != second.m_stats.size()) {
        throw invalid_input("two-sample fits differ in dimension");
    }
    return (first.m_stats - second.m_stats) / std::numbers::sqrt2;
}

inline GlobalTestResult two_sample_global(const Vector& t_stats, double alpha)
{
    return global_test(t_stats, alpha);
}

inline MultipleTestResult two_sample_lmt(const Vector& t_stats, double alpha)
{
    return lmt_fdr(t_stats, alpha);
}

inline MultipleTestResult two_sample_fdv(const Vector& t_stats, double r)
{
    return lmt_fdv(t_stats, r);
}

/// sqrt((1/n) log(1 + p log(eta^2 + 1) / k^2)), eta = 1 - alpha - delta: the
/// sup-norm signal size below which no level-alpha test keeps type II error
/// under delta. Some derivations carry an extra 1/6 inside the root; this uses
/// the constant-free form.
inline double separation_radius(Index n, Index p, Index k, double alpha, double delta)
{
    if (n < 1 || p < 1 || k < 1) {
        throw invalid_input("separation radius needs n, p, k >= 1");
    }
    if (!(alpha > 0.0 && delta > 0.0) || !(alpha + delta < 1.0)) {
        throw invalid_input("separation radius needs alpha, delta > 0 and alpha + delta < 1");
    }
    const double eta = 1.0 - alpha - delta;
    const double kd = static_cast<double>(k);
    const double inner = std::log1p(static_cast<double>(p) * std::log1p(eta * eta) / (kd * kd));
    return std::sqrt(inner / static_cast<double>(n));
}

} // namespace hdlt

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdlt/model.hpp"
#include "hdlt/parallel.hpp"
#include "hdlt/solvers.hpp"

namespace hdlt {

/// Lower clamp applied to fdot(x_i^T beta_hat) before it is inverted.
inline constexpr double weight_floor = 1e-10;

/// Relative size below which <v, x_j>_n counts as zero.
inline constexpr double degeneracy_ratio = 1e-12;

struct Weights
{
    Vector values;
    std::size_t clamped = 0;
};

/// w_i = max(fdot(x_i^T beta), weight_floor).
inline Weights link_weights(const Dataset& data, const Vector& beta, const LinkFunction& link)
{
    if (beta.size() != data.p()) {
        throw invalid_input("beta has length " + std::to_string(beta.size()) + ", expected " +
                            std::to_string(data.p()));
    }
    const Vector u = data.X() * beta;
    Weights w{Vector(data.n()), 0};
    for (Index i = 0; i < data.n(); ++i) {
        const double fdot = eval_link(link, u[i]).fdot;
        if (fdot < weight_floor) ++w.clamped;
        w.values[i] = std::max(fdot, weight_floor);
    }
    return w;
}

/// <a, b>_n = sum_i w_i a_i b_i.
inline double weighted_inner(const Vector& a, const Vector& b, const Vector& weights)
{
    if (a.size() != b.size() || a.size() != weights.size()) {
        throw invalid_input("weighted inner product: length mismatch");
    }
    return (a.array() * b.array() * weights.array()).sum();
}

inline double weighted_norm(const Vector& a, const Vector& weights)
{
    return std::sqrt(weighted_inner(a, a, weights));
}

/// Score vector chosen for one coordinate, with the quantities that drove the choice.
struct ScorePack
{
    Index j = 0;
    Vector v;                   // W^{-1} eta_hat_j(lambda_j)
    double lambda_j = 0.0;      // 0 when no node-wise regression was run
    double tau_j = 0.0;         // ||v||_n / |<v, x_j>_n|
    double zeta_j = 0.0;        // max_{k != j} |<v, x_k>_n| / ||v||_n
    double zeta_star = 0.0;     // bound applied in the first step (after any reset)
    bool zeta_reset = false;    // no grid point met the initial bound
    std::size_t step1_index = 0;
    std::size_t selected_index = 0;
    std::vector<double> zeta_path; // per grid point; NaN where degenerate
    std::vector<double> tau_path;
    bool nodewise_converged = true;
};

/// Default bound sqrt(2 log p) on zeta_j.
inline double default_zeta_star(Index p)
{
    return std::sqrt(2.0 * std::log(static_cast<double>(p)));
}

/// Shared state for score selection on one design and one weight vector:
/// the node-wise Gram matrix and X^T W^{-1} X, from which zeta_j(lambda)
/// and tau_j(lambda) follow without materializing v_j(lambda).
class ScoreContext
{
public:
    ScoreContext(const Dataset& data, Vector weights)
        : data_(data), weights_(std::move(weights)), nodewise_(data.X())
    {
        if (weights_.size() != data.n()) {
            throw invalid_input("weights length does not match sample count");
        }
        if (!(weights_.array() > 0.0).all() || !weights_.allFinite()) {
            throw invalid_input("weights must be positive and finite");
        }
        inverse_weights_ = weights_.cwiseInverse();
        weighted_gram_ = data.X().transpose() * inverse_weights_.asDiagonal() * data.X();
    }

    const Dataset& data() const noexcept { return data_; }
    const Vector& weights() const noexcept { return weights_; }
    const NodewiseProblem& nodewise() const noexcept { return nodewise_; }

    /// v_j = W^{-1} x_j, used when the precision matrix is known to be the
    /// identity and whenever p = 1.
    ScorePack direct_score(Index j) const
    {
        check_index(j);
        ScorePack pack;
        pack.j = j;
        pack.v = data_.X().col(j).cwiseProduct(inverse_weights_);
        const double norm_v = weighted_norm(pack.v, weights_);
        const double inner_jj = weighted_inner(pack.v, data_.X().col(j), weights_);
        if (!(std::abs(inner_jj) > degeneracy_ratio * norm_v * column_norm(j))) {
            throw degenerate_coordinate(static_cast<std::size_t>(j),
                                        "coordinate " + std::to_string(j + 1) + ": <v, x_j>_n vanishes");
        }
        pack.tau_j = norm_v / std::abs(inner_jj);
        const Index p = data_.p();
        if (p > 1) {
            pack.zeta_star = default_zeta_star(p);
            const double n = static_cast<double>(data_.n());
            for (Index k = 0; k < p; ++k) {
                if (k != j) pack.zeta_j = std::max(pack.zeta_j, std::abs(nodewise_.gram()(k, j)) * n / norm_v);
            }
        }
        pack.zeta_path = {pack.zeta_j};
        pack.tau_path = {pack.tau_j};
        return pack;
    }

    /// Grid realization of the two-step lambda search for v_j:
    ///   1. take the largest lambda with zeta_j(lambda) <= zeta_star; if none
    ///      qualifies, first reset zeta_star to (1 + kappa1) min zeta_j;
    ///      set tau_star = tau_j at that lambda.
    ///   2. take the smallest lambda with tau_j(lambda) <= (1 + kappa0) tau_star.
    /// Grid points where <v, x_j>_n vanishes are skipped.
    ScorePack select(Index j, std::span<const double> grid, double kappa0, double kappa1,
                     std::optional<double> zeta_star = std::nullopt, double tol = default_tol,
                     std::size_t max_sweeps = default_max_iter) const
    {
        check_index(j);
        if (grid.empty()) {
            throw invalid_input("score selection needs a nonempty lambda grid");
        }
        if (!(kappa0 >= 0.0 && kappa0 <= 1.0)) {
            throw invalid_input("kappa0 must lie in [0,1]");
        }
        if (!(kappa1 > 0.0 && kappa1 <= 1.0)) {
            throw invalid_input("kappa1 must lie in (0,1]");
        }
        for (double lambda : grid) detail::check_lambda(lambda);
        if (data_.p() == 1) {
            return direct_score(j);
        }

        const std::size_t count = grid.size();
        const Index p = data_.p();
        const double n = static_cast<double>(data_.n());
        const double xj_norm = column_norm(j);
        ScorePack pack;
        pack.j = j;
        pack.zeta_path.assign(count, std::numeric_limits<double>::quiet_NaN());
        pack.tau_path.assign(count, std::numeric_limits<double>::quiet_NaN());
        std::vector<Vector> coefficients(count);

        Vector b = Vector::Zero(p);
        for (std::size_t g = 0; g < count; ++g) {
            const auto stats = nodewise_.solve(j, grid[g], b, tol, max_sweeps);
            pack.nodewise_converged = pack.nodewise_converged && stats.converged;
            coefficients[g] = b;

            // <v, x_k>_n = x_k^T eta_hat since the weights cancel against W^{-1}.
            const Vector inner = nodewise_.gradient_residual(j, b) * n;
            const double norm_v = std::sqrt(weighted_norm_sq(j, b));
            if (!(std::abs(inner[j]) > degeneracy_ratio * norm_v * xj_norm) || !(norm_v > 0.0)) {
                continue;
            }
            double zeta = 0.0;
            for (Index k = 0; k < p; ++k) {
                if (k != j) zeta = std::max(zeta, std::abs(inner[k]));
            }
            pack.zeta_path[g] = zeta / norm_v;
            pack.tau_path[g] = norm_v / std::abs(inner[j]);
        }

        auto valid = [&](std::size_t g) { return !std::isnan(pack.tau_path[g]); };
        // "Larger lambda wins" among equal candidates, for both steps.
        auto better_max = [&](std::size_t g, std::optional<std::size_t> cur) {
            return !cur || grid[g] > grid[*cur];
        };
        auto better_min = [&](std::size_t g, std::optional<std::size_t> cur) {
            return !cur || grid[g] < grid[*cur];
        };

        double bound = zeta_star.value_or(default_zeta_star(p));
        std::optional<std::size_t> step1;
        double min_zeta = std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < count; ++g) {
            if (!valid(g)) continue;
            min_zeta = std::min(min_zeta, pack.zeta_path[g]);
            if (pack.zeta_path[g] <= bound && better_max(g, step1)) step1 = g;
        }
        if (!std::isfinite(min_zeta)) {
            throw degenerate_coordinate(static_cast<std::size_t>(j),
                                        "coordinate " + std::to_string(j + 1) +
                                            ": <v, x_j>_n vanishes at every grid lambda");
        }
        if (!step1) {
            pack.zeta_reset = true;
            bound = (1.0 + kappa1) * min_zeta;
            for (std::size_t g = 0; g < count; ++g) {
                if (valid(g) && pack.zeta_path[g] <= bound && better_max(g, step1)) step1 = g;
            }
        }
        pack.zeta_star = bound;
        pack.step1_index = *step1;
        const double tau_star = pack.tau_path[*step1];

        std::optional<std::size_t> step2;
        for (std::size_t g = 0; g < count; ++g) {
            if (valid(g) && pack.tau_path[g] <= (1.0 + kappa0) * tau_star && better_min(g, step2)) step2 = g;
        }
        // Exact ties in tau (an unchanged eta between grid points) go to the
        // larger lambda.
        std::size_t chosen = *step2;
        for (std::size_t g = 0; g < count; ++g) {
            if (valid(g) && pack.tau_path[g] == pack.tau_path[*step2] && grid[g] > grid[chosen]) chosen = g;
        }
        pack.selected_index = chosen;
        pack.lambda_j = grid[chosen];
        const Vector eta = nodewise_.residual(j, coefficients[chosen]);
        pack.v = eta.cwiseProduct(inverse_weights_);
        // Final values straight from v, free of the Gram-form shortcuts above.
        const double norm_v = weighted_norm(pack.v, weights_);
        const Vector inner = data_.X().transpose() * eta;
        double zeta = 0.0;
        for (Index k = 0; k < p; ++k) {
            if (k != j) zeta = std::max(zeta, std::abs(inner[k]));
        }
        pack.tau_j = norm_v / std::abs(inner[j]);
        pack.zeta_j = zeta / norm_v;
        return pack;
    }

private:
    void check_index(Index j) const
    {
        if (j < 0 || j >= data_.p()) {
            throw invalid_input("coordinate index " + std::to_string(j) + " out of range");
        }
    }

    double column_norm(Index j) const
    {
        return std::sqrt(data_.X().col(j).cwiseAbs2().dot(weights_));
    }

    /// ||W^{-1} eta||_n^2 = eta^T W^{-1} eta for eta = x_j - X b.
    double weighted_norm_sq(Index j, const Vector& b) const
    {
        const double ajj = weighted_gram_(j, j);
        double cross = 0.0;
        double quad = 0.0;
        std::vector<Index> support;
        for (Index k = 0; k < b.size(); ++k) {
            if (b[k] != 0.0) support.push_back(k);
        }
        for (Index k : support) {
            cross += b[k] * weighted_gram_(k, j);
            double row = 0.0;
            for (Index l : support) row += weighted_gram_(k, l) * b[l];
            quad += b[k] * row;
        }
        const double value = ajj - 2.0 * cross + quad;
        if (value > 1e-8 * ajj) {
            return value;
        }
        // Heavy cancellation: evaluate directly.
        const Vector eta = nodewise_.residual(j, b);
        return eta.cwiseAbs2().dot(inverse_weights_);
    }

    const Dataset& data_;
    Vector weights_;
    Vector inverse_weights_;
    NodewiseProblem nodewise_;
    Matrix weighted_gram_;
};

/// Score vector for coordinate j (zero-based) on the given grid.
inline ScorePack select_score_vector(const Dataset& data, Index j, const Vector& weights,
                                     std::span<const double> grid, double kappa0, double kappa1,
                                     std::optional<double> zeta_star = std::nullopt)
{
    return ScoreContext(data, weights).select(j, grid, kappa0, kappa1, zeta_star);
}

struct DebiasedFit
{
    Vector beta_check;
    Vector tau;
    Vector m_stats;   // beta_check / tau
    Vector beta_init;
    Vector weights;   // fdot(X beta_init), floored
    std::size_t clamped_weights = 0;
};

/// beta_check_j = beta_j + sum_i v_ij (y_i - f(u_i)) / sum_i v_ij fdot(u_i) X_ij,
/// u = X beta_init, with scores[j] the pack of coordinate j. The response may
/// be any real vector here; the Dataset overload below is the usual entry.
inline DebiasedFit debias(const Matrix& X, const Vector& response, const Vector& beta_init,
                          std::span<const ScorePack> scores, const LinkFunction& link = LinkFunction::logistic())
{
    const Index n = X.rows();
    const Index p = X.cols();
    if (response.size() != n || beta_init.size() != p) {
        throw invalid_input("debias inputs disagree in dimension");
    }
    if (static_cast<Index>(scores.size()) != p) {
        throw invalid_input("debias needs one score pack per coordinate");
    }
    const Vector u = X * beta_init;
    Vector weights(n), resid(n);
    std::size_t clamped = 0;
    for (Index i = 0; i < n; ++i) {
        const LinkValue lv = eval_link(link, u[i]);
        weights[i] = lv.fdot;
        if (weights[i] < weight_floor) {
            weights[i] = weight_floor;
            ++clamped;
        }
        resid[i] = response[i] - lv.f;
    }

    DebiasedFit fit;
    fit.beta_init = beta_init;
    fit.weights = weights;
    fit.clamped_weights = clamped;
    fit.beta_check.resize(p);
    fit.tau.resize(p);
    fit.m_stats.resize(p);
    for (Index j = 0; j < p; ++j) {
        const ScorePack& pack = scores[static_cast<std::size_t>(j)];
        if (pack.j != j || pack.v.size() != n) {
            throw invalid_input("score pack " + std::to_string(j) + " does not match coordinate order");
        }
        const double numer = pack.v.dot(resid);
        const double denom = weighted_inner(pack.v, X.col(j), weights);
        const double scale = weighted_norm(pack.v, weights) * weighted_norm(X.col(j), weights);
        if (!(std::abs(denom) > degeneracy_ratio * scale)) {
            throw degenerate_coordinate(static_cast<std::size_t>(j),
                                        "coordinate " + std::to_string(j + 1) + ": debiasing denominator vanishes");
        }
        fit.beta_check[j] = beta_init[j] + numer / denom;
        fit.tau[j] = pack.tau_j;
        fit.m_stats[j] = fit.beta_check[j] / fit.tau[j];
    }
    return fit;
}

inline DebiasedFit debias(const Dataset& data, const Vector& beta_init, std::span<const ScorePack> scores,
                          const LinkFunction& link = LinkFunction::logistic())
{
    return debias(data.X(), data.y(), beta_init, scores, link);
}

/// Knobs of the fit -> score -> debias pipeline.
struct InferenceOptions
{
    double lambda_const = 1.0;          // initial lambda = lambda_const * sqrt(log p / n)
    std::optional<double> lambda;       // explicit initial lambda, overrides lambda_const
    std::size_t grid_size = 50;
    double grid_ratio = 1e-3;
    double kappa0 = 0.0;
    double kappa1 = 0.5;
    std::optional<double> zeta_star;    // default sqrt(2 log p)
    bool sample_split = false;          // fit on the first half, debias on the second
    bool omega_identity = false;        // v_j = W^{-1} x_j, no node-wise regressions
    LinkFunction link;
    double tol = default_tol;
    std::size_t max_iter = default_max_iter;

    void validate() const
    {
        if (!(lambda_const >= 0.0) || !std::isfinite(lambda_const)) {
            throw invalid_input("lambda constant must be finite and nonnegative");
        }
        if (lambda) detail::check_lambda(*lambda);
        if (grid_size < 2) throw invalid_input("grid size must be at least 2");
        if (!(grid_ratio > 0.0 && grid_ratio < 1.0)) throw invalid_input("grid ratio must lie in (0,1)");
        if (!(kappa0 >= 0.0 && kappa0 <= 1.0)) throw invalid_input("kappa0 must lie in [0,1]");
        if (!(kappa1 > 0.0 && kappa1 <= 1.0)) throw invalid_input("kappa1 must lie in (0,1]");
        if (zeta_star && !(*zeta_star > 0.0)) throw invalid_input("zeta_star must be positive");
        if (!(tol > 0.0)) throw invalid_input("tolerance must be positive");
        if (max_iter == 0) throw invalid_input("max_iter must be positive");
    }
};

struct InferenceResult
{
    DebiasedFit fit;
    LassoFit initial;
    std::vector<ScorePack> scores;
    Index fit_samples = 0;    // samples used for beta_hat
    Index debias_samples = 0; // samples used for scores and correction
    std::size_t nonconverged_nodewise = 0;
};

/// Fits beta_hat, selects a score vector for every coordinate and debiases.
/// With sample splitting the first floor(n/2) samples fit beta_hat and the
/// remaining ones carry the rest of the pipeline.
inline InferenceResult run_inference(const Dataset& data, const InferenceOptions& options, std::size_t workers = 1)
{
    options.validate();
    std::optional<Dataset> first, second;
    if (options.sample_split) {
        if (data.n() < 4) throw invalid_input("sample splitting needs at least 4 samples");
        const Index half = data.n() / 2;
        first.emplace(data.rows(0, half));
        second.emplace(data.rows(half, data.n() - half));
    }
    const Dataset& fit_data = first ? *first : data;
    const Dataset& debias_data = second ? *second : data;
    const Index p = data.p();

    InferenceResult result;
    result.fit_samples = fit_data.n();
    result.debias_samples = debias_data.n();
    const double lambda = options.lambda.value_or(
        options.lambda_const *
        std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(fit_data.n())));
    result.initial = fit_logistic_lasso(fit_data, lambda, options.link, options.tol, options.max_iter);

    const Weights w = link_weights(debias_data, result.initial.beta_hat, options.link);
    const ScoreContext context(debias_data, w.values);
    result.scores.resize(static_cast<std::size_t>(p));
    const bool direct = options.omega_identity || p == 1;
    parallel_for(static_cast<std::size_t>(p), workers, [&](std::size_t jj) {
        const Index j = static_cast<Index>(jj);
        if (direct) {
            result.scores[jj] = context.direct_score(j);
        } else {
            const auto grid = lambda_path(debias_data, j, options.grid_size, options.grid_ratio);
            result.scores[jj] =
                context.select(j, grid, options.kappa0, options.kappa1, options.zeta_star, options.tol, options.max_iter);
        }
    });
    for (const auto& pack : result.scores) {
        if (!pack.nodewise_converged) ++result.nonconverged_nodewise;
    }
    result.fit = debias(debias_data, result.initial.beta_hat, result.scores, options.link);
    return result;
}

} // namespace hdlt

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hdlt/model.hpp"

namespace hdlt {

inline constexpr double default_tol = 1e-7;
inline constexpr std::size_t default_max_iter = 10000;

inline double soft_threshold(double z, double gamma)
{
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

/// Largest violation of the lasso optimality conditions for
/// min L(b) + lambda ||b||_1 given grad = dL/db at b.
inline double kkt_residual(const Vector& grad, const Vector& beta, double lambda)
{
    double worst = 0.0;
    for (Index k = 0; k < beta.size(); ++k) {
        const double v = beta[k] != 0.0 ? std::abs(grad[k] + std::copysign(lambda, beta[k]))
                                         : std::max(std::abs(grad[k]) - lambda, 0.0);
        worst = std::max(worst, v);
    }
    return worst;
}

struct LassoFit
{
    Vector beta_hat;
    double lambda = 0.0;
    std::size_t iterations = 0; // coordinate sweeps
    double kkt_residual = 0.0;
    bool converged = false;
    std::vector<double> objective_trace; // penalized objective after each accepted step
};

struct NodewiseFit
{
    Vector gamma_hat; // length p-1, coordinates of X_{-j} in column order
    Vector residual;  // x_j - X_{-j} gamma_hat
    double lambda = 0.0;
    std::size_t iterations = 0;
    double kkt_residual = 0.0;
    bool converged = true;
};

namespace detail {

inline void check_lambda(double lambda)
{
    if (!std::isfinite(lambda) || lambda < 0.0) {
        throw invalid_input("lambda must be finite and nonnegative");
    }
}

inline double penalized_objective(const Dataset& data, const Vector& u, const Vector& beta, double lambda,
                                  const LinkFunction& link)
{
    double total = 0.0;
    for (Index i = 0; i < data.n(); ++i) {
        total += link_antiderivative(link, u[i]) - data.y()[i] * u[i];
    }
    return total / static_cast<double>(data.n()) + lambda * beta.lpNorm<1>();
}

} // namespace detail

/// L1-penalized negative log-likelihood minimizer.
///
/// Proximal Newton: each outer step builds the weighted quadratic model of the
/// loss at the current iterate, solves its lasso by cyclic coordinate descent,
/// then backtracks along the resulting direction until the penalized objective
/// shows Armijo decrease. Stops once the KKT residual of the original problem
/// is at most `tol`, or after `max_iter` total coordinate sweeps.
inline LassoFit fit_logistic_lasso(const Dataset& data, double lambda,
                                   const LinkFunction& link = LinkFunction::logistic(), double tol = default_tol,
                                   std::size_t max_iter = default_max_iter, const Vector* warm_start = nullptr)
{
    detail::check_lambda(lambda);
    if (!(tol > 0.0)) {
        throw invalid_input("solver tolerance must be positive");
    }
    const Matrix& X = data.X();
    const Vector& y = data.y();
    const Index n = data.n();
    const Index p = data.p();
    const double inv_n = 1.0 / static_cast<double>(n);

    LassoFit fit;
    fit.lambda = lambda;
    fit.beta_hat = warm_start ? *warm_start : Vector::Zero(p);
    if (fit.beta_hat.size() != p) {
        throw invalid_input("warm start has wrong length");
    }

    Vector u = X * fit.beta_hat;
    Vector mu(n), w(n), grad(p), hdiag(p), d(p), z(n);
    double objective = detail::penalized_objective(data, u, fit.beta_hat, lambda, link);
    fit.objective_trace.push_back(objective);

    constexpr double armijo = 1e-4;
    constexpr int max_halvings = 60;

    while (true) {
        for (Index i = 0; i < n; ++i) {
            const LinkValue lv = eval_link(link, u[i]);
            mu[i] = lv.f - y[i];
            w[i] = std::max(lv.fdot, 1e-12);
        }
        grad.noalias() = X.transpose() * mu * inv_n;
        fit.kkt_residual = kkt_residual(grad, fit.beta_hat, lambda);
        if (fit.kkt_residual <= tol) {
            fit.converged = true;
            break;
        }
        if (fit.iterations >= max_iter) {
            break;
        }

        for (Index k = 0; k < p; ++k) {
            hdiag[k] = X.col(k).cwiseAbs2().dot(w) * inv_n;
        }

        // Coordinate descent on the quadratic model, over the step d.
        d.setZero();
        z.setZero();
        const double inner_tol = std::max(0.05 * fit.kkt_residual, 1e-3 * tol);
        while (fit.iterations < max_iter) {
            ++fit.iterations;
            double biggest = 0.0;
            for (Index k = 0; k < p; ++k) {
                if (hdiag[k] <= 0.0) continue;
                const double gk = grad[k] + X.col(k).cwiseProduct(w).dot(z) * inv_n;
                const double current = fit.beta_hat[k] + d[k];
                const double updated = soft_threshold(current - gk / hdiag[k], lambda / hdiag[k]);
                const double delta = updated - current;
                if (delta != 0.0) {
                    d[k] += delta;
                    z.noalias() += delta * X.col(k);
                    biggest = std::max(biggest, hdiag[k] * std::abs(delta));
                }
            }
            if (biggest <= inner_tol) break;
        }

        const Vector candidate_full = fit.beta_hat + d;
        const double decrease = grad.dot(d) + lambda * (candidate_full.lpNorm<1>() - fit.beta_hat.lpNorm<1>());
        double step = 1.0;
        bool accepted = false;
        for (int h = 0; h < max_halvings; ++h) {
            const Vector candidate = fit.beta_hat + step * d;
            const Vector u_candidate = u + step * z;
            const double trial = detail::penalized_objective(data, u_candidate, candidate, lambda, link);
            if (std::isfinite(trial) && trial <= objective + armijo * step * decrease) {
                fit.beta_hat = candidate;
                u = u_candidate;
                objective = trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // No representable decrease left; the residual above is final.
            break;
        }
        fit.objective_trace.push_back(objective);
    }
    return fit;
}

/// Node-wise lasso problems min_b ||x_j - X_{-j} b||^2/(2n) + lambda ||b||_1
/// for every j of one design, solved by coordinate descent on the shared Gram
/// matrix X^T X / n.
class NodewiseProblem
{
public:
    explicit NodewiseProblem(const Matrix& X)
        : X_(X), gram_(X.transpose() * X / static_cast<double>(X.rows()))
    {}

    const Matrix& gram() const noexcept { return gram_; }
    const Matrix& design() const noexcept { return X_; }
    Index p() const noexcept { return gram_.cols(); }

    /// Smallest lambda whose solution is zero: max_{k != j} |x_k^T x_j| / n.
    double lambda_max(Index j) const
    {
        double best = 0.0;
        for (Index k = 0; k < p(); ++k) {
            if (k != j) best = std::max(best, std::abs(gram_(k, j)));
        }
        return best;
    }

    struct SolveStats
    {
        std::size_t sweeps = 0;
        double kkt_residual = 0.0;
        bool converged = false;
    };

    /// Solves in place. `b` has length p with b[j] held at zero; its incoming
    /// value is the warm start.
    SolveStats solve(Index j, double lambda, Vector& b, double tol = default_tol,
                     std::size_t max_sweeps = default_max_iter) const
    {
        detail::check_lambda(lambda);
        check_index(j);
        const Index dim = p();
        b[j] = 0.0;
        Vector r = gradient_residual(j, b);

        std::vector<Index> active;
        SolveStats stats;
        auto update = [&](Index k) {
            const double g = gram_(k, k);
            if (g <= 0.0) return;
            const double updated = soft_threshold(g * b[k] + r[k], lambda) / g;
            const double delta = updated - b[k];
            if (delta != 0.0) {
                b[k] = updated;
                r.noalias() -= delta * gram_.col(k);
            }
        };

        while (stats.sweeps < max_sweeps) {
            ++stats.sweeps;
            for (Index k = 0; k < dim; ++k) {
                if (k != j) update(k);
            }
            active.clear();
            for (Index k = 0; k < dim; ++k) {
                if (k != j && b[k] != 0.0) active.push_back(k);
            }

            while (!active.empty() && stats.sweeps < max_sweeps) {
                ++stats.sweeps;
                double biggest = 0.0;
                for (const Index k : active) {
                    const double before = b[k];
                    update(k);
                    biggest = std::max(biggest, gram_(k, k) * std::abs(b[k] - before));
                }
                if (biggest <= tol) break;
            }

            r = gradient_residual(j, b);
            stats.kkt_residual = kkt(j, b, r, lambda);
            if (stats.kkt_residual <= tol) {
                stats.converged = true;
                break;
            }
        }
        return stats;
    }

    NodewiseFit fit(Index j, double lambda, double tol = default_tol, std::size_t max_sweeps = default_max_iter,
                    const Vector* warm_start = nullptr) const
    {
        check_index(j);
        Vector b = warm_start ? *warm_start : Vector::Zero(p());
        const SolveStats stats = solve(j, lambda, b, tol, max_sweeps);
        NodewiseFit fit;
        fit.lambda = lambda;
        fit.iterations = stats.sweeps;
        fit.kkt_residual = stats.kkt_residual;
        fit.converged = stats.converged;
        fit.gamma_hat = drop(b, j);
        fit.residual = residual(j, b);
        return fit;
    }

    /// eta_j = x_j - X b for a full-length b with b[j] = 0.
    Vector residual(Index j, const Vector& b) const
    {
        Vector eta = X_.col(j);
        for (Index k = 0; k < p(); ++k) {
            if (k != j && b[k] != 0.0) eta.noalias() -= b[k] * X_.col(k);
        }
        return eta;
    }

    /// Entry k is (1/n) x_k^T (x_j - X b).
    Vector gradient_residual(Index j, const Vector& b) const
    {
        Vector r = gram_.col(j);
        for (Index k = 0; k < p(); ++k) {
            if (k != j && b[k] != 0.0) r.noalias() -= b[k] * gram_.col(k);
        }
        return r;
    }

    static Vector drop(const Vector& b, Index j)
    {
        Vector out(b.size() - 1);
        out << b.head(j), b.tail(b.size() - j - 1);
        return out;
    }

private:
    void check_index(Index j) const
    {
        if (j < 0 || j >= p()) {
            throw invalid_input("node-wise column index " + std::to_string(j) + " out of range");
        }
    }

    double kkt(Index j, const Vector& b, const Vector& r, double lambda) const
    {
        double worst = 0.0;
        for (Index k = 0; k < p(); ++k) {
            if (k == j) continue;
            const double v = b[k] != 0.0 ? std::abs(r[k] - std::copysign(lambda, b[k]))
                                         : std::max(std::abs(r[k]) - lambda, 0.0);
            worst = std::max(worst, v);
        }
        return worst;
    }

    const Matrix& X_;
    Matrix gram_;
};

/// Lasso of column j on the remaining columns. With p = 1 there is nothing to
/// regress on: gamma_hat is empty and the residual is x_1.
inline NodewiseFit fit_nodewise_lasso(const Dataset& data, Index j, double lambda, double tol = default_tol,
                                      std::size_t max_sweeps = default_max_iter)
{
    detail::check_lambda(lambda);
    if (j < 0 || j >= data.p()) {
        throw invalid_input("node-wise column index " + std::to_string(j) + " out of range");
    }
    if (data.p() == 1) {
        NodewiseFit fit;
        fit.gamma_hat = Vector(0);
        fit.residual = data.X().col(0);
        fit.lambda = lambda;
        return fit;
    }
    return NodewiseProblem(data.X()).fit(j, lambda, tol, max_sweeps);
}

/// Descending log-spaced grid from lambda_max to ratio * lambda_max, both ends exact.
inline std::vector<double> log_grid(double lambda_max, std::size_t grid_size, double ratio)
{
    if (grid_size < 2) {
        throw invalid_input("lambda grid needs at least 2 points");
    }
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw invalid_input("lambda grid ratio must lie in (0,1)");
    }
    if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) {
        throw invalid_input("lambda_max must be positive and finite");
    }
    std::vector<double> grid(grid_size);
    const double last = static_cast<double>(grid_size - 1);
    const double log_ratio = std::log(ratio);
    grid.front() = lambda_max;
    for (std::size_t k = 1; k + 1 < grid_size; ++k) {
        grid[k] = lambda_max * std::exp(log_ratio * static_cast<double>(k) / last);
    }
    grid.back() = ratio * lambda_max;
    return grid;
}

namespace detail {

inline void check_no_zero_columns(const Matrix& X)
{
    for (Index k = 0; k < X.cols(); ++k) {
        if ((X.col(k).array() == 0.0).all()) {
            throw invalid_input("column " + std::to_string(k + 1) + " is identically zero");
        }
    }
}

} // namespace detail

/// Penalty grid for the node-wise problem of column `node`, or for the whole
/// logistic model when `node` is empty. lambda_max comes from the KKT bound at
/// zero; when that bound is itself zero (an exactly orthogonal column, or a
/// zero score), ||x_j||^2/n (resp. max_k ||x_k||^2/(4n)) stands in so the grid
/// stays well defined.
inline std::vector<double> lambda_path(const Dataset& data, std::optional<Index> node, std::size_t grid_size,
                                       double ratio, const LinkFunction& link = LinkFunction::logistic())
{
    detail::check_no_zero_columns(data.X());
    const double inv_n = 1.0 / static_cast<double>(data.n());
    double lambda_max = 0.0;
    if (node) {
        const Index j = *node;
        if (j < 0 || j >= data.p()) {
            throw invalid_input("node-wise column index " + std::to_string(j) + " out of range");
        }
        const Vector xj = data.X().col(j);
        for (Index k = 0; k < data.p(); ++k) {
            if (k != j) lambda_max = std::max(lambda_max, std::abs(data.X().col(k).dot(xj)) * inv_n);
        }
        if (lambda_max == 0.0) lambda_max = xj.squaredNorm() * inv_n;
    } else {
        const double f0 = eval_link(link, 0.0).f;
        const Vector score = data.X().transpose() * (data.y().array() - f0).matrix() * inv_n;
        lambda_max = score.lpNorm<Eigen::Infinity>();
        if (lambda_max == 0.0) lambda_max = data.X().colwise().squaredNorm().maxCoeff() * inv_n / 4.0;
    }
    return log_grid(lambda_max, grid_size, ratio);
}

} // namespace hdlt

#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the solver, debiasing or testing code under test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hdlt/model.hpp"

namespace oracle {

using hdlt::Index;
using hdlt::Matrix;
using hdlt::Vector;

inline double sigmoid(double u) { return u >= 0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u)); }

inline Matrix gaussian_matrix(std::mt19937_64& gen, Index n, Index p)
{
    std::normal_distribution<double> z;
    Matrix X(n, p);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) X(i, j) = z(gen);
    return X;
}

/// Logistic data with N(0,1) covariates and the given coefficients.
inline hdlt::Dataset logistic_data(std::mt19937_64& gen, Index n, const Vector& beta)
{
    Matrix X = gaussian_matrix(gen, n, beta.size());
    std::uniform_real_distribution<double> u;
    Vector y(n);
    for (Index i = 0; i < n; ++i) y[i] = u(gen) < sigmoid(X.row(i).dot(beta)) ? 1.0 : 0.0;
    return hdlt::Dataset(std::move(X), std::move(y));
}

/// Logistic negative log-likelihood (mean) written out from scratch.
inline double nll(const Matrix& X, const Vector& y, const Vector& beta)
{
    long double total = 0;
    for (Index i = 0; i < X.rows(); ++i) {
        const long double u = X.row(i).dot(beta);
        total += std::log1p(std::exp(-std::fabs(static_cast<double>(u)))) + std::max<long double>(u, 0) - y[i] * u;
    }
    return static_cast<double>(total / X.rows());
}

inline Vector nll_grad(const Matrix& X, const Vector& y, const Vector& beta)
{
    Vector r(X.rows());
    for (Index i = 0; i < X.rows(); ++i) r[i] = sigmoid(X.row(i).dot(beta)) - y[i];
    return X.transpose() * r / static_cast<double>(X.rows());
}

inline double soft(double z, double g) { return z > g ? z - g : (z < -g ? z + g : 0.0); }

/// Accelerated proximal gradient with a fixed 1/L step, L = ||X||_2^2 / (4n),
/// and gradient-mapping restarts. Runs until the gradient mapping is below tol.
inline Vector prox_gradient_lasso(const Matrix& X, const Vector& y, double lambda, double tol = 1e-10,
                                  std::size_t max_iter = 2'000'000)
{
    const double n = static_cast<double>(X.rows());
    const double L = Eigen::JacobiSVD<Matrix>(X).singularValues()(0);
    const double step = 4.0 * n / (L * L);
    Vector beta = Vector::Zero(X.cols()), z = beta, prev = beta;
    double t = 1.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        const Vector g = nll_grad(X, y, z);
        Vector next(beta.size());
        for (Index k = 0; k < beta.size(); ++k) next[k] = soft(z[k] - step * g[k], step * lambda);
        const double mapping = (next - z).lpNorm<Eigen::Infinity>() / step;
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        if ((z - next).dot(next - beta) > 0.0) {
            // restart momentum
            z = beta;
            t = 1.0;
            continue;
        }
        prev = beta;
        beta = next;
        z = beta + ((t - 1.0) / t_next) * (beta - prev);
        t = t_next;
        if (mapping < tol) break;
    }
    return beta;
}

/// Unpenalized MLE by Newton's method with step halving.
inline Vector newton_mle(const Matrix& X, const Vector& y, std::size_t max_iter = 200)
{
    const double n = static_cast<double>(X.rows());
    Vector beta = Vector::Zero(X.cols());
    for (std::size_t it = 0; it < max_iter; ++it) {
        Vector w(X.rows());
        for (Index i = 0; i < X.rows(); ++i) {
            const double s = sigmoid(X.row(i).dot(beta));
            w[i] = s * (1 - s);
        }
        const Matrix H = X.transpose() * w.asDiagonal() * X / n;
        const Vector g = nll_grad(X, y, beta);
        const Vector d = H.ldlt().solve(g);
        double s = 1.0;
        const double f0 = nll(X, y, beta);
        while (nll(X, y, beta - s * d) > f0 && s > 1e-10) s *= 0.5;
        beta -= s * d;
        if (g.lpNorm<Eigen::Infinity>() < 1e-14) break;
    }
    return beta;
}

/// Naive coordinate descent on ||x_j - X_{-j} b||^2/(2n) + lambda ||b||_1 with
/// a fresh random update order every sweep, residual form.
inline Vector shuffled_cd(const Matrix& X, Index j, double lambda, std::mt19937_64& gen, double tol = 1e-13)
{
    const Index n = X.rows(), p = X.cols();
    std::vector<Index> others;
    for (Index k = 0; k < p; ++k)
        if (k != j) others.push_back(k);
    Vector b = Vector::Zero(p - 1);
    Vector r = X.col(j);
    for (int sweep = 0; sweep < 1'000'000; ++sweep) {
        std::vector<std::size_t> order(others.size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), gen);
        double biggest = 0.0;
        for (const std::size_t a : order) {
            const Index k = others[a];
            const double sq = X.col(k).squaredNorm() / n;
            const double z = X.col(k).dot(r) / n + sq * b[static_cast<Index>(a)];
            const double nb = soft(z, lambda) / sq;
            const double d = nb - b[static_cast<Index>(a)];
            if (d != 0.0) {
                r -= d * X.col(k);
                b[static_cast<Index>(a)] = nb;
                biggest = std::max(biggest, std::abs(d));
            }
        }
        if (biggest < tol) break;
    }
    return b;
}

/// Neumaier-compensated sum of w_i a_i b_i in long double.
inline double compensated_inner(const Vector& a, const Vector& b, const Vector& w)
{
    long double sum = 0, c = 0;
    for (Index i = 0; i < a.size(); ++i) {
        const long double term = static_cast<long double>(w[i]) * a[i] * b[i];
        const long double t = sum + term;
        if (std::fabs(sum) >= std::fabs(term)) {
            c += (sum - t) + term;
        } else {
            c += (term - t) + sum;
        }
        sum = t;
    }
    return static_cast<double>(sum + c);
}

/// Standard normal CDF and two-sided tail via the complementary error function.
inline double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double two_tail(double t) { return std::erfc(t / std::sqrt(2.0)); }

/// Kolmogorov-Smirnov distance of a sample to N(0,1).
inline double ks_normal(std::vector<double> xs)
{
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double F = phi_cdf(xs[i]);
        d = std::max({d, F - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - F});
    }
    return d;
}

} // namespace oracle

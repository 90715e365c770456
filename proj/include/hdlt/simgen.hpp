#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hdlt/model.hpp"
#include "hdlt/rng.hpp"

namespace hdlt {

enum class CovarianceKind
{
    identity,
    block,          // equicorrelated diagonal blocks
    toeplitz_block, // identical linearly decaying Toeplitz blocks, times a scale
    custom
};

struct CovarianceSpec
{
    CovarianceKind kind = CovarianceKind::identity;
    Index p = 0;
    double value = 0.7;   // block: within-block correlation
    Index num_blocks = 10;
    double scale = 1.0;   // toeplitz_block: overall multiplier
    Matrix matrix;        // custom

    static CovarianceSpec identity(Index p) { return {CovarianceKind::identity, p, 0.7, 10, 1.0, Matrix()}; }
    static CovarianceSpec block(Index p, double value, Index num_blocks)
    {
        return {CovarianceKind::block, p, value, num_blocks, 1.0, Matrix()};
    }
    static CovarianceSpec toeplitz_block(Index p, Index num_blocks, double scale)
    {
        return {CovarianceKind::toeplitz_block, p, 0.0, num_blocks, scale, Matrix()};
    }
    static CovarianceSpec custom(Matrix m)
    {
        const Index p = m.rows();
        return {CovarianceKind::custom, p, 0.0, 1, 1.0, std::move(m)};
    }
};

/// Realizes the covariance matrix, checking positive definiteness.
///
/// toeplitz_block: each m x m block (m = p / num_blocks) has unit diagonal and
/// (m - 1 - |i - j|) / (10 (m - 1)) off the diagonal, so the first
/// off-diagonal is just under 0.1 and the corner is 0; the whole matrix is
/// then multiplied by `scale`.
inline Matrix build_covariance(const CovarianceSpec& spec)
{
    const Index p = spec.p;
    if (p < 1) {
        throw invalid_input("covariance dimension must be positive");
    }
    Matrix sigma = Matrix::Identity(p, p);
    switch (spec.kind) {
    case CovarianceKind::identity:
        break;
    case CovarianceKind::block:
    case CovarianceKind::toeplitz_block: {
        if (spec.num_blocks < 1 || p % spec.num_blocks != 0) {
            throw invalid_input("dimension " + std::to_string(p) + " is not divisible into " +
                                std::to_string(spec.num_blocks) + " equal blocks");
        }
        if (!std::isfinite(spec.value) || !(spec.scale > 0.0) || !std::isfinite(spec.scale)) {
            throw invalid_input("covariance parameters must be finite with a positive scale");
        }
        const Index m = p / spec.num_blocks;
        for (Index blk = 0; blk < spec.num_blocks; ++blk) {
            const Index base = blk * m;
            for (Index a = 0; a < m; ++a) {
                for (Index b = 0; b < m; ++b) {
                    if (a == b) continue;
                    double entry = spec.value;
                    if (spec.kind == CovarianceKind::toeplitz_block) {
                        const auto gap = static_cast<double>(std::abs(a - b));
                        entry = (static_cast<double>(m - 1) - gap) / (10.0 * static_cast<double>(m - 1));
                    }
                    sigma(base + a, base + b) = entry;
                }
            }
        }
        if (spec.kind == CovarianceKind::toeplitz_block) sigma *= spec.scale;
        break;
    }
    case CovarianceKind::custom: {
        if (spec.matrix.rows() != p || spec.matrix.cols() != p) {
            throw invalid_input("custom covariance must be p x p");
        }
        if (!spec.matrix.allFinite()) {
            throw invalid_input("custom covariance has non-finite entries");
        }
        const double asym = (spec.matrix - spec.matrix.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-12 * std::max(1.0, spec.matrix.cwiseAbs().maxCoeff())) {
            throw invalid_input("custom covariance is not symmetric");
        }
        sigma = 0.5 * (spec.matrix + spec.matrix.transpose());
        break;
    }
    }
    if (Eigen::LLT<Matrix>(sigma).info() != Eigen::Success) {
        throw invalid_input("covariance matrix is not positive definite");
    }
    return sigma;
}

struct CoefficientSpec
{
    Index p = 0;
    Index k = 0;
    double rho = 0.0;
    std::vector<Index> fixed_support; // zero-based; empty means a random support
};

/// k entries of magnitude rho on the support, signs alternating +, -, ...
/// over the support in index order (an odd k gets the extra +).
inline Vector gen_coefficients(const CoefficientSpec& spec, Stream& rng)
{
    if (spec.p < 1) throw invalid_input("coefficient dimension must be positive");
    if (spec.k < 0 || spec.k > spec.p) {
        throw invalid_input("sparsity " + std::to_string(spec.k) + " exceeds dimension " + std::to_string(spec.p));
    }
    if (!std::isfinite(spec.rho)) throw invalid_input("signal magnitude must be finite");

    std::vector<Index> support;
    if (!spec.fixed_support.empty()) {
        support = spec.fixed_support;
        std::sort(support.begin(), support.end());
        if (static_cast<Index>(support.size()) != spec.k ||
            std::adjacent_find(support.begin(), support.end()) != support.end() || support.front() < 0 ||
            support.back() >= spec.p) {
            throw invalid_input("fixed support must list k distinct indices within range");
        }
    } else {
        std::vector<Index> pool(static_cast<std::size_t>(spec.p));
        for (Index j = 0; j < spec.p; ++j) pool[static_cast<std::size_t>(j)] = j;
        for (Index i = 0; i < spec.k; ++i) {
            const auto pick = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(spec.p - i)));
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick)]);
        }
        support.assign(pool.begin(), pool.begin() + spec.k);
        std::sort(support.begin(), support.end());
    }
    Vector beta = Vector::Zero(spec.p);
    for (std::size_t s = 0; s < support.size(); ++s) {
        beta[support[s]] = (s % 2 == 0) ? spec.rho : -spec.rho;
    }
    return beta;
}

enum class DesignMode
{
    gaussian,
    truncated, // rows conditioned on |x_i^T beta| < bound
    bounded    // rows conditioned on ||x_i||_inf <= bound
};

struct DesignSpec
{
    CovarianceSpec covariance;
    DesignMode mode = DesignMode::gaussian;
    double bound = 3.0;
    Index n = 0;
    LinkFunction link;
};

inline constexpr std::size_t max_consecutive_rejections = 1'000'000;

/// Draws datasets for one design; the Cholesky factor is computed once.
class DesignSampler
{
public:
    explicit DesignSampler(DesignSpec spec)
        : spec_(std::move(spec)), factor_(build_covariance(spec_.covariance).llt().matrixL())
    {
        if (spec_.n < 2) throw invalid_input("design needs at least 2 samples");
        if (spec_.mode != DesignMode::gaussian && (!(spec_.bound > 0.0) || !std::isfinite(spec_.bound))) {
            throw invalid_input("truncation bound must be positive and finite");
        }
    }

    const DesignSpec& spec() const noexcept { return spec_; }
    Index p() const noexcept { return factor_.rows(); }

    /// Rows are i.i.d. N(0, Sigma), conditioned per the mode by rejection;
    /// y_i ~ Bernoulli(f(x_i^T beta)).
    Dataset draw(const Vector& beta, Stream& rng) const
    {
        const Index p = this->p();
        if (beta.size() != p) {
            throw invalid_input("coefficient length " + std::to_string(beta.size()) + " does not match design dimension " +
                                std::to_string(p));
        }
        Matrix X(spec_.n, p);
        Vector y(spec_.n);
        Vector z(p), x(p);
        std::size_t attempts = 0, accepted = 0;
        for (Index i = 0; i < spec_.n; ++i) {
            std::size_t rejected_in_row = 0;
            while (true) {
                for (Index k = 0; k < p; ++k) z[k] = rng.normal();
                x.noalias() = factor_.triangularView<Eigen::Lower>() * z;
                ++attempts;
                if (accept(x, beta)) break;
                if (++rejected_in_row >= max_consecutive_rejections) {
                    throw sampling_stall("truncated sampling stalled at row " + std::to_string(i + 1) +
                                         "; acceptance estimate " +
                                         std::to_string(static_cast<double>(accepted) / static_cast<double>(attempts)));
                }
            }
            ++accepted;
            X.row(i) = x.transpose();
            y[i] = rng.uniform() < eval_link(spec_.link, x.dot(beta)).f ? 1.0 : 0.0;
        }
        return Dataset(std::move(X), std::move(y));
    }

private:
    bool accept(const Vector& x, const Vector& beta) const
    {
        switch (spec_.mode) {
        case DesignMode::gaussian: return true;
        case DesignMode::truncated: return std::abs(x.dot(beta)) < spec_.bound;
        case DesignMode::bounded: return x.lpNorm<Eigen::Infinity>() <= spec_.bound;
        }
        return true;
    }

    DesignSpec spec_;
    Matrix factor_;
};

inline Dataset gen_design(const DesignSpec& spec, const Vector& beta, Stream& rng)
{
    return DesignSampler(spec).draw(beta, rng);
}

/// Two independent samples, each drawn from its own stream.
inline std::pair<Dataset, Dataset> gen_two_sample(const DesignSpec& spec1, const DesignSpec& spec2, const Vector& beta1,
                                                  const Vector& beta2, Stream& rng1, Stream& rng2)
{
    if (spec1.covariance.p != spec2.covariance.p || beta1.size() != beta2.size()) {
        throw invalid_input("two-sample designs differ in dimension");
    }
    Dataset first = gen_design(spec1, beta1, rng1);
    Dataset second = gen_design(spec2, beta2, rng2);
    return {std::move(first), std::move(second)};
}

} // namespace hdlt

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hdlt/error.hpp"
#include "hdlt/normal.hpp"

namespace hdlt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// n x p design plus a binary response. Immutable after construction.
///
/// No intercept column is ever added; callers that want one must append it
/// to X themselves.
class Dataset
{
public:
    Dataset(Matrix X, Vector y)
        : X_(std::move(X)), y_(std::move(y))
    {
        if (X_.rows() < 2) {
            throw invalid_input("dataset needs at least 2 samples");
        }
        if (X_.cols() < 1) {
            throw invalid_input("dataset needs at least 1 covariate");
        }
        if (y_.size() != X_.rows()) {
            throw invalid_input("response length " + std::to_string(y_.size()) +
                                " does not match " + std::to_string(X_.rows()) + " design rows");
        }
        if (!X_.allFinite()) {
            throw invalid_input("design matrix contains non-finite entries");
        }
        for (Index i = 0; i < y_.size(); ++i) {
            if (y_[i] != 0.0 && y_[i] != 1.0) {
                throw invalid_input("response entry " + std::to_string(i + 1) + " is not 0 or 1");
            }
        }
    }

    const Matrix& X() const noexcept { return X_; }
    const Vector& y() const noexcept { return y_; }
    Index n() const noexcept { return X_.rows(); }
    Index p() const noexcept { return X_.cols(); }

    /// Contiguous block of samples [begin, begin + count).
    Dataset rows(Index begin, Index count) const
    {
        return Dataset(X_.middleRows(begin, count), y_.segment(begin, count));
    }

private:
    Matrix X_;
    Vector y_;
};

enum class LinkKind
{
    logistic,
    probit,
    generalized_logistic,
    affine_tanh
};

/// Inverse link f of the single-index model y = f(beta^T x) + eps.
///
/// Every member maps R into (0,1) with a positive, Lipschitz derivative.
/// `affine_tanh` is f(u) = tanh(a u + b)/2 + 1/2 and coincides with the
/// logistic link at (a, b) = (1/2, 0).
struct LinkFunction
{
    LinkKind kind = LinkKind::logistic;
    double shape = 1.0;  // generalized-logistic exponent
    double slope = 0.5;  // affine-tanh a
    double offset = 0.0; // affine-tanh b

    static LinkFunction logistic() { return {}; }
    static LinkFunction probit() { return {LinkKind::probit}; }

    static LinkFunction generalized_logistic(double alpha)
    {
        if (!(alpha > 0.0) || !std::isfinite(alpha)) {
            throw invalid_input("generalized logistic exponent must be positive and finite");
        }
        return {LinkKind::generalized_logistic, alpha};
    }

    static LinkFunction affine_tanh(double a, double b)
    {
        if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
            throw invalid_input("affine tanh link needs finite a > 0 and finite b");
        }
        return {LinkKind::affine_tanh, 1.0, a, b};
    }

    /// Round-trips through `parse`: "logistic", "probit", "glogistic:A", "tanh:A,B".
    std::string name() const
    {
        auto num = [](double v) {
            std::string s = std::to_string(v);
            s.erase(s.find_last_not_of('0') + 1);
            if (!s.empty() && s.back() == '.') s.pop_back();
            return s;
        };
        switch (kind) {
        case LinkKind::logistic: return "logistic";
        case LinkKind::probit: return "probit";
        case LinkKind::generalized_logistic: return "glogistic:" + num(shape);
        case LinkKind::affine_tanh: return "tanh:" + num(slope) + "," + num(offset);
        }
        return "logistic";
    }

    static LinkFunction parse(std::string_view text)
    {
        auto to_double = [&](std::string_view s) {
            try {
                std::size_t used = 0;
                const double v = std::stod(std::string(s), &used);
                if (used != s.size()) throw std::invalid_argument("trailing");
                return v;
            } catch (const std::exception&) {
                throw invalid_input("bad link parameter in '" + std::string(text) + "'");
            }
        };
        if (text == "logistic") return logistic();
        if (text == "probit") return probit();
        if (text.starts_with("glogistic:")) {
            return generalized_logistic(to_double(text.substr(10)));
        }
        if (text.starts_with("tanh:")) {
            const auto rest = text.substr(5);
            const auto comma = rest.find(',');
            if (comma == std::string_view::npos) {
                throw invalid_input("tanh link needs 'tanh:a,b'");
            }
            return affine_tanh(to_double(rest.substr(0, comma)), to_double(rest.substr(comma + 1)));
        }
        throw invalid_input("unknown link '" + std::string(text) + "'");
    }

    friend bool operator==(const LinkFunction&, const LinkFunction&) = default;
};

struct LinkValue
{
    double f;
    double fdot;
};

namespace detail {

/// log(1 + e^u) without overflow.
inline double softplus(double u)
{
    return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u)));
}

/// (sigma(u), sigma(-u)) with neither side rounding through 1 - x.
inline std::pair<double, double> sigmoid_pair(double u)
{
    const double e = std::exp(-std::abs(u));
    const double big = 1.0 / (1.0 + e);
    const double small = e / (1.0 + e);
    return u >= 0.0 ? std::pair{big, small} : std::pair{small, big};
}

} // namespace detail

/// f(u) and its derivative. Stable for |u| up to at least 700.
inline LinkValue eval_link(const LinkFunction& link, double u)
{
    if (!std::isfinite(u)) {
        throw invalid_input("link evaluated at a non-finite argument");
    }
    switch (link.kind) {
    case LinkKind::logistic: {
        const auto [s, t] = detail::sigmoid_pair(u);
        return {s, s * t};
    }
    case LinkKind::probit:
        return {normal::cdf(u), normal::pdf(u)};
    case LinkKind::generalized_logistic: {
        const double f = std::exp(-link.shape * detail::softplus(-u));
        return {f, link.shape * f * detail::sigmoid_pair(u).second};
    }
    case LinkKind::affine_tanh: {
        const auto [s, t] = detail::sigmoid_pair(2.0 * (link.slope * u + link.offset));
        return {s, 2.0 * link.slope * s * t};
    }
    }
    return {0.5, 0.25};
}

/// An antiderivative F of f, so that F(u) - y u is the per-sample loss whose
/// gradient is (f(u) - y) x. For the logistic link this is log(1 + e^u); the
/// generalized logistic member is integrated numerically from 0.
inline double link_antiderivative(const LinkFunction& link, double u)
{
    switch (link.kind) {
    case LinkKind::logistic:
        return detail::softplus(u);
    case LinkKind::probit:
        return u * normal::cdf(u) + normal::pdf(u);
    case LinkKind::generalized_logistic: {
        if (u == 0.0) return 0.0;
        auto integrand = [&](double s) { return eval_link(link, s).f; };
        return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, u, 15, 1e-14);
    }
    case LinkKind::affine_tanh:
        return detail::softplus(2.0 * (link.slope * u + link.offset)) / (2.0 * link.slope);
    }
    return detail::softplus(u);
}

/// Negative log-likelihood (logistic link) and gradient at beta.
struct LossState
{
    Vector beta;
    double objective = 0.0;
    Vector gradient;
};

/// objective = (1/n) sum [F(x_i^T beta) - y_i x_i^T beta], gradient = (1/n) X^T (f(X beta) - y).
inline LossState logistic_loss_grad(const Dataset& data, const Vector& beta,
                                    const LinkFunction& link = LinkFunction::logistic())
{
    if (beta.size() != data.p()) {
        throw invalid_input("beta has length " + std::to_string(beta.size()) + ", expected " +
                            std::to_string(data.p()));
    }
    const Vector u = data.X() * beta;
    Vector resid(data.n());
    double total = 0.0;
    for (Index i = 0; i < data.n(); ++i) {
        resid[i] = eval_link(link, u[i]).f - data.y()[i];
        total += link_antiderivative(link, u[i]) - data.y()[i] * u[i];
    }
    const double inv_n = 1.0 / static_cast<double>(data.n());
    return {beta, total * inv_n, data.X().transpose() * resid * inv_n};
}

} // namespace hdlt

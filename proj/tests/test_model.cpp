#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hdlt/model.hpp"
#include "oracles.hpp"

using namespace hdlt;

TEST(Link, LogisticAtZero)
{
    const auto v = eval_link(LinkFunction::logistic(), 0.0);
    EXPECT_DOUBLE_EQ(v.f, 0.5);
    EXPECT_DOUBLE_EQ(v.fdot, 0.25);
}

TEST(Link, LogisticAtTwo)
{
    const auto v = eval_link(LinkFunction::logistic(), 2.0);
    EXPECT_NEAR(v.f, 0.88079707797788, 1e-13);
    EXPECT_NEAR(v.fdot, 0.10499358540351, 1e-13);
    // fifth-order central difference of f
    const double h = 1e-3;
    auto f = [](double u) { return eval_link(LinkFunction::logistic(), u).f; };
    const double fd = (-f(2 + 2 * h) + 8 * f(2 + h) - 8 * f(2 - h) + f(2 - 2 * h)) / (12 * h);
    EXPECT_NEAR(v.fdot, fd, 1e-11);
}

TEST(Link, LogisticAntisymmetryAndExactDerivative)
{
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> U(-40, 40);
    for (int t = 0; t < 1000; ++t) {
        const double u = U(gen);
        const auto a = eval_link(LinkFunction::logistic(), u);
        const auto b = eval_link(LinkFunction::logistic(), -u);
        EXPECT_NEAR(a.f + b.f, 1.0, 1e-15);
        EXPECT_NEAR(a.fdot, a.f * (1.0 - a.f), 1e-15 + 1e-12 * a.fdot);
        EXPECT_NEAR(a.fdot, a.f * b.f, 1e-16);
    }
}

TEST(Link, ExtremeArgumentsStayFinite)
{
    for (double u : {-700.0, -500.0, -50.0, 50.0, 500.0, 700.0}) {
        const auto v = eval_link(LinkFunction::logistic(), u);
        EXPECT_TRUE(std::isfinite(v.f));
        EXPECT_TRUE(std::isfinite(v.fdot));
        EXPECT_GE(v.f, 0.0);
        EXPECT_LE(v.f, 1.0);
        EXPECT_GE(v.fdot, 0.0);
    }
    EXPECT_NEAR(link_antiderivative(LinkFunction::logistic(), 700.0), 700.0, 1e-12);
    EXPECT_GT(link_antiderivative(LinkFunction::logistic(), -700.0), 0.0);
}

TEST(Link, NonFiniteArgumentRejected)
{
    EXPECT_THROW(eval_link(LinkFunction::logistic(), NAN), invalid_input);
    EXPECT_THROW(eval_link(LinkFunction::probit(), INFINITY), invalid_input);
}

TEST(Link, AllMembersInUnitIntervalWithPositiveSlope)
{
    const LinkFunction links[] = {LinkFunction::logistic(), LinkFunction::probit(),
                                  LinkFunction::generalized_logistic(0.4), LinkFunction::generalized_logistic(3.0),
                                  LinkFunction::affine_tanh(1.0, 0.0), LinkFunction::affine_tanh(0.3, -0.7)};
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> U(-8, 8);
    for (const auto& link : links) {
        for (int t = 0; t < 500; ++t) {
            const double u = U(gen);
            const auto v = eval_link(link, u);
            EXPECT_GT(v.f, 0.0) << link.name();
            EXPECT_LT(v.f, 1.0) << link.name();
            EXPECT_GT(v.fdot, 0.0) << link.name();
        }
    }
}

TEST(Link, DerivativesMatchFiniteDifferences)
{
    const LinkFunction links[] = {LinkFunction::probit(), LinkFunction::generalized_logistic(2.5),
                                  LinkFunction::affine_tanh(0.8, 0.3)};
    for (const auto& link : links) {
        for (double u : {-3.0, -0.5, 0.0, 1.2, 4.0}) {
            const double h = 1e-5;
            const double fd = (eval_link(link, u + h).f - eval_link(link, u - h).f) / (2 * h);
            EXPECT_NEAR(eval_link(link, u).fdot, fd, 1e-8) << link.name() << " at " << u;
            // F' = f
            const double Fd = (link_antiderivative(link, u + h) - link_antiderivative(link, u - h)) / (2 * h);
            EXPECT_NEAR(Fd, eval_link(link, u).f, 1e-7) << link.name() << " at " << u;
        }
    }
}

TEST(Link, LipschitzSlopeForLogistic)
{
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> U(-10, 10);
    for (int t = 0; t < 2000; ++t) {
        const double a = U(gen), b = U(gen);
        const double da = eval_link(LinkFunction::logistic(), a).fdot;
        const double db = eval_link(LinkFunction::logistic(), b).fdot;
        EXPECT_LE(std::abs(da - db), std::abs(a - b) + 1e-15);
    }
}

TEST(Link, TanhHalfSlopeIsLogistic)
{
    const auto tanh_link = LinkFunction::affine_tanh(0.5, 0.0);
    for (double u : {-30.0, -2.0, 0.0, 0.7, 12.0}) {
        EXPECT_NEAR(eval_link(tanh_link, u).f, eval_link(LinkFunction::logistic(), u).f, 1e-15);
        EXPECT_NEAR(eval_link(tanh_link, u).fdot, eval_link(LinkFunction::logistic(), u).fdot, 1e-15);
    }
}

TEST(Link, NamesRoundTrip)
{
    for (const char* s : {"logistic", "probit", "glogistic:2.5", "tanh:0.5,-1"}) {
        EXPECT_EQ(LinkFunction::parse(s).name(), s);
    }
    EXPECT_THROW(LinkFunction::parse("cauchit"), invalid_input);
    EXPECT_THROW(LinkFunction::parse("glogistic:-1"), invalid_input);
    EXPECT_THROW(LinkFunction::parse("tanh:1"), invalid_input);
}

TEST(Dataset, Validation)
{
    Matrix X = Matrix::Ones(3, 2);
    EXPECT_NO_THROW(Dataset(X, Vector::Zero(3)));
    Vector y(3);
    y << 0, 1, 0.5;
    EXPECT_THROW(Dataset(X, y), invalid_input);
    Matrix bad = X;
    bad(1, 1) = NAN;
    EXPECT_THROW(Dataset(bad, Vector::Zero(3)), invalid_input);
    EXPECT_THROW(Dataset(Matrix::Ones(1, 2), Vector::Zero(1)), invalid_input);
    EXPECT_THROW(Dataset(Matrix::Ones(3, 0), Vector::Zero(3)), invalid_input);
    EXPECT_THROW(Dataset(X, Vector::Zero(4)), invalid_input);
}

TEST(Loss, ZeroBeta)
{
    std::mt19937_64 gen(1);
    const Dataset d = oracle::logistic_data(gen, 15, Vector::Zero(4));
    const auto s = logistic_loss_grad(d, Vector::Zero(4));
    EXPECT_NEAR(s.objective, std::log(2.0), 1e-15);
    Vector g = Vector::Zero(4);
    for (Index i = 0; i < d.n(); ++i) g += (0.5 - d.y()[i]) * d.X().row(i).transpose();
    g /= 15.0;
    EXPECT_LE((s.gradient - g).lpNorm<Eigen::Infinity>(), 1e-15);
}

TEST(Loss, GradientMatchesFiniteDifferencesOnRandomInstances)
{
    std::mt19937_64 gen(2024);
    std::normal_distribution<double> z;
    for (int inst = 0; inst < 100; ++inst) {
        Vector beta(3);
        for (auto& b : beta) b = z(gen);
        const Dataset d = oracle::logistic_data(gen, 10, beta);
        const auto s = logistic_loss_grad(d, beta);
        EXPECT_NEAR(s.objective, oracle::nll(d.X(), d.y(), beta), 1e-13);
        for (Index k = 0; k < 3; ++k) {
            const double h = 1e-6;
            Vector bp = beta, bm = beta;
            bp[k] += h;
            bm[k] -= h;
            const double fd = (logistic_loss_grad(d, bp).objective - logistic_loss_grad(d, bm).objective) / (2 * h);
            EXPECT_LE(std::abs(fd - s.gradient[k]), 1e-5 * std::max(1.0, std::abs(s.gradient[k])));
        }
    }
}

TEST(Loss, FlipSymmetry)
{
    std::mt19937_64 gen(8);
    Vector beta(5);
    beta << 1, -0.5, 0, 0.2, 2;
    const Dataset d = oracle::logistic_data(gen, 30, beta);
    const Dataset flipped(-d.X(), Vector::Ones(30) - d.y());
    EXPECT_NEAR(logistic_loss_grad(d, beta).objective, logistic_loss_grad(flipped, beta).objective, 1e-14);
}

TEST(Loss, DimensionMismatch)
{
    std::mt19937_64 gen(8);
    const Dataset d = oracle::logistic_data(gen, 5, Vector::Zero(3));
    EXPECT_THROW(logistic_loss_grad(d, Vector::Zero(2)), invalid_input);
}

TEST(Loss, OtherLinksGradientMatchesFiniteDifferences)
{
    std::mt19937_64 gen(99);
    Vector beta(3);
    beta << 0.4, -0.8, 0.1;
    const Dataset d = oracle::logistic_data(gen, 20, beta);
    for (const auto& link : {LinkFunction::probit(), LinkFunction::generalized_logistic(1.7),
                             LinkFunction::affine_tanh(0.9, 0.2)}) {
        const auto s = logistic_loss_grad(d, beta, link);
        for (Index k = 0; k < 3; ++k) {
            const double h = 1e-6;
            Vector bp = beta, bm = beta;
            bp[k] += h;
            bm[k] -= h;
            const double fd =
                (logistic_loss_grad(d, bp, link).objective - logistic_loss_grad(d, bm, link).objective) / (2 * h);
            EXPECT_NEAR(fd, s.gradient[k], 1e-6) << link.name();
        }
    }
}

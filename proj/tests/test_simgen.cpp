#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "hdlt/simgen.hpp"

using namespace hdlt;

namespace {

DesignSpec gaussian_design(CovarianceSpec cov, Index n)
{
    DesignSpec d;
    d.covariance = std::move(cov);
    d.n = n;
    return d;
}

} // namespace

TEST(Stream, SameKeySameSequence)
{
    Stream a(7, 3, "design"), b(7, 3, "design");
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
    EXPECT_EQ(a.draws(), 1000u);
}

TEST(Stream, DistinctKeysDiffer)
{
    const Stream base(7, 3, "design");
    for (Stream other : {Stream(8, 3, "design"), Stream(7, 4, "design"), Stream(7, 3, "coefficients")}) {
        Stream s = base;
        int same = 0;
        for (int i = 0; i < 100; ++i) same += s() == other();
        EXPECT_EQ(same, 0);
    }
}

TEST(Stream, UniformAndNormalMoments)
{
    Stream s(1, 0, "moments");
    const int n = 200000;
    double su = 0, sn = 0, sn2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        su += u;
        const double z = s.normal();
        sn += z;
        sn2 += z * z;
    }
    EXPECT_NEAR(su / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
    EXPECT_NEAR(sn / n, 0.0, 4 / std::sqrt(n));
    EXPECT_NEAR(sn2 / n, 1.0, 4 * std::sqrt(2.0 / n));
}

TEST(Stream, BelowCoversRangeEvenly)
{
    Stream s(2, 0, "below");
    std::vector<int> counts(7, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i) {
        const auto v = s.below(7);
        ASSERT_LT(v, 7u);
        ++counts[v];
    }
    for (int c : counts) EXPECT_NEAR(c, n / 7.0, 4 * std::sqrt(n / 7.0));
}

TEST(Covariance, SingletonBlocksGiveIdentity)
{
    EXPECT_EQ(build_covariance(CovarianceSpec::block(10, 0.7, 10)), Matrix::Identity(10, 10));
    EXPECT_EQ(build_covariance(CovarianceSpec::identity(4)), Matrix::Identity(4, 4));
}

TEST(Covariance, EquicorrelatedPairs)
{
    const Matrix s = build_covariance(CovarianceSpec::block(20, 0.7, 10));
    for (Index a = 0; a < 20; ++a) {
        for (Index b = 0; b < 20; ++b) {
            const double expected = a == b ? 1.0 : (a / 2 == b / 2 ? 0.7 : 0.0);
            EXPECT_EQ(s(a, b), expected) << a << "," << b;
        }
    }
}

TEST(Covariance, ToeplitzBlockRows)
{
    const Matrix s = build_covariance(CovarianceSpec::toeplitz_block(8, 2, 1.0));
    const double row[] = {1.0, 2.0 / 30.0, 1.0 / 30.0, 0.0};
    for (Index blk = 0; blk < 2; ++blk)
        for (Index k = 0; k < 4; ++k) EXPECT_NEAR(s(4 * blk, 4 * blk + k), row[k], 1e-16);
    EXPECT_EQ(s(0, 4), 0.0);
    EXPECT_NEAR(s(1, 2), 2.0 / 30.0, 1e-16);
    const Matrix scaled = build_covariance(CovarianceSpec::toeplitz_block(8, 2, 0.01));
    EXPECT_EQ(scaled, 0.01 * s);
}

TEST(Covariance, ToeplitzFirstOffDiagonalBelowTenth)
{
    const Matrix s = build_covariance(CovarianceSpec::toeplitz_block(200, 10, 1.0));
    EXPECT_NEAR(s(0, 1), 18.0 / 190.0, 1e-16);
    EXPECT_EQ(s(0, 19), 0.0);
    EXPECT_EQ(s(0, 20), 0.0);
}

TEST(Covariance, SymmetricAndPositiveDefinite)
{
    const CovarianceSpec specs[] = {CovarianceSpec::identity(7),         CovarianceSpec::block(100, 0.7, 10),
                                    CovarianceSpec::block(30, -0.1, 3),  CovarianceSpec::toeplitz_block(200, 10, 0.01),
                                    CovarianceSpec::toeplitz_block(12, 1, 3.0)};
    for (const auto& spec : specs) {
        const Matrix s = build_covariance(spec);
        EXPECT_TRUE((s.array() == s.transpose().array()).all());
        EXPECT_EQ(Eigen::LLT<Matrix>(s).info(), Eigen::Success);
    }
}

TEST(Covariance, Errors)
{
    EXPECT_THROW(build_covariance(CovarianceSpec::block(15, 0.7, 10)), invalid_input);
    EXPECT_THROW(build_covariance(CovarianceSpec::block(10, 1.5, 1)), invalid_input);
    EXPECT_THROW(build_covariance(CovarianceSpec::toeplitz_block(10, 2, 0.0)), invalid_input);
    Matrix bad(2, 2);
    bad << 1, 2, 2, 1;
    EXPECT_THROW(build_covariance(CovarianceSpec::custom(bad)), invalid_input);
    Matrix asym(2, 2);
    asym << 1, 0.1, 0.2, 1;
    EXPECT_THROW(build_covariance(CovarianceSpec::custom(asym)), invalid_input);
    EXPECT_THROW(build_covariance(CovarianceSpec::identity(0)), invalid_input);
}

TEST(Coefficients, NullVector)
{
    Stream s(1, 0, "coefficients");
    EXPECT_EQ(gen_coefficients({50, 0, 0.75, {}}, s), Vector::Zero(50));
}

TEST(Coefficients, TwoSignalsOppositeSigns)
{
    for (std::uint64_t rep = 0; rep < 50; ++rep) {
        Stream s(3, rep, "coefficients");
        const Vector b = gen_coefficients({100, 2, 0.75, {}}, s);
        EXPECT_EQ((b.array() != 0.0).count(), 2);
        EXPECT_EQ((b.array() == 0.75).count(), 1);
        EXPECT_EQ((b.array() == -0.75).count(), 1);
    }
}

TEST(Coefficients, SparsityMagnitudeAndSignBalance)
{
    for (Index k : {1, 5, 20, 99}) {
        Stream s(4, static_cast<std::uint64_t>(k), "coefficients");
        const Vector b = gen_coefficients({100, k, 3.0, {}}, s);
        EXPECT_EQ((b.array() != 0.0).count(), k);
        EXPECT_EQ((b.array() == 3.0).count(), (k + 1) / 2);
        EXPECT_EQ((b.array() == -3.0).count(), k / 2);
    }
}

TEST(Coefficients, RandomSupportIsSpreadOut)
{
    std::vector<int> hits(20, 0);
    for (std::uint64_t rep = 0; rep < 4000; ++rep) {
        Stream s(5, rep, "coefficients");
        const Vector b = gen_coefficients({20, 3, 1.0, {}}, s);
        for (Index j = 0; j < 20; ++j) hits[static_cast<std::size_t>(j)] += b[j] != 0.0;
    }
    // each index is on the support with probability 3/20
    for (int h : hits) EXPECT_NEAR(h, 600.0, 4 * std::sqrt(4000 * 0.15 * 0.85));
}

TEST(Coefficients, FixedSupportIsDeterministic)
{
    Stream a(9, 0, "coefficients"), b(9, 0, "coefficients"), c(10, 5, "other");
    const CoefficientSpec spec{10, 4, 3.0, {0, 1, 2, 3}};
    const Vector va = gen_coefficients(spec, a);
    Vector expected = Vector::Zero(10);
    expected.head(4) << 3, -3, 3, -3;
    EXPECT_EQ(va, expected);
    EXPECT_EQ(gen_coefficients(spec, b), va);
    EXPECT_EQ(gen_coefficients(spec, c), va);
}

TEST(Coefficients, Errors)
{
    Stream s(1, 0, "coefficients");
    EXPECT_THROW(gen_coefficients({5, 6, 1.0, {}}, s), invalid_input);
    EXPECT_THROW(gen_coefficients({5, 2, 1.0, {1, 1}}, s), invalid_input);
    EXPECT_THROW(gen_coefficients({5, 2, 1.0, {1, 5}}, s), invalid_input);
    EXPECT_THROW(gen_coefficients({5, 2, 1.0, {1}}, s), invalid_input);
}

TEST(Design, IdentityMomentsAndBalancedResponse)
{
    const Index n = 10000;
    Stream s(11, 0, "design");
    const Dataset d = gen_design(gaussian_design(CovarianceSpec::identity(2), n), Vector::Zero(2), s);
    for (Index k = 0; k < 2; ++k) {
        const double mean = d.X().col(k).mean();
        const double var = (d.X().col(k).array() - mean).square().sum() / (n - 1);
        EXPECT_LE(std::abs(mean), 4 / std::sqrt(static_cast<double>(n)));
        EXPECT_NEAR(var, 1.0, 0.1);
    }
    EXPECT_NEAR(d.y().mean(), 0.5, 4 / (2 * std::sqrt(static_cast<double>(n))));
}

TEST(Design, EmpiricalCovarianceWithinFiveStandardErrors)
{
    const Index n = 100000;
    Matrix cov(6, 6);
    cov << 1.0, 0.7, 0.7, 0.0, 0.0, 0.0,
           0.7, 1.0, 0.7, 0.0, 0.0, 0.0,
           0.7, 0.7, 1.0, 0.0, 0.0, 0.0,
           0.0, 0.0, 0.0, 2.0, -0.5, 0.3,
           0.0, 0.0, 0.0, -0.5, 1.0, 0.1,
           0.0, 0.0, 0.0, 0.3, 0.1, 0.5;
    for (const CovarianceSpec& spec : {CovarianceSpec::block(6, 0.7, 2), CovarianceSpec::custom(cov),
                                       CovarianceSpec::toeplitz_block(6, 1, 0.01)}) {
        const Matrix sigma = build_covariance(spec);
        Stream s(12, 0, "design");
        const Dataset d = gen_design(gaussian_design(spec, n), Vector::Zero(6), s);
        const Matrix emp = d.X().transpose() * d.X() / static_cast<double>(n);
        for (Index a = 0; a < 6; ++a) {
            for (Index b = 0; b < 6; ++b) {
                const double se = std::sqrt((sigma(a, a) * sigma(b, b) + sigma(a, b) * sigma(a, b)) / n);
                EXPECT_LE(std::abs(emp(a, b) - sigma(a, b)), 5 * se) << a << "," << b;
            }
        }
    }
}

TEST(Design, TruncationHoldsForEveryRow)
{
    Vector beta = Vector::Zero(20);
    beta.head(4) << 3, -3, 3, -3;
    DesignSpec spec = gaussian_design(CovarianceSpec::block(20, 0.7, 10), 500);
    spec.mode = DesignMode::truncated;
    spec.bound = 3.0;
    Stream s(13, 0, "design");
    const Dataset d = gen_design(spec, beta, s);
    const Vector u = d.X() * beta;
    EXPECT_LT(u.cwiseAbs().maxCoeff(), 3.0);
}

TEST(Design, BoundedRowsRespectSupNorm)
{
    DesignSpec spec = gaussian_design(CovarianceSpec::identity(5), 300);
    spec.mode = DesignMode::bounded;
    spec.bound = 1.5;
    Stream s(14, 0, "design");
    const Dataset d = gen_design(spec, Vector::Ones(5), s);
    EXPECT_LE(d.X().cwiseAbs().maxCoeff(), 1.5);
}

TEST(Design, StallIsReported)
{
    DesignSpec spec = gaussian_design(CovarianceSpec::identity(2), 10);
    spec.mode = DesignMode::truncated;
    spec.bound = 1e-12;
    Stream s(15, 0, "design");
    try {
        gen_design(spec, Vector::Constant(2, 1e6), s);
        FAIL() << "expected a sampling stall";
    } catch (const sampling_stall& e) {
        EXPECT_NE(std::string(e.what()).find("acceptance estimate"), std::string::npos);
    }
}

TEST(Design, SameStreamSameDataset)
{
    const DesignSpec spec = gaussian_design(CovarianceSpec::toeplitz_block(40, 4, 0.01), 60);
    const Vector beta = Vector::LinSpaced(40, -1, 1);
    Stream a(16, 2, "design"), b(16, 2, "design"), c(16, 3, "design");
    const Dataset da = gen_design(spec, beta, a);
    const Dataset db = gen_design(spec, beta, b);
    const Dataset dc = gen_design(spec, beta, c);
    EXPECT_EQ(da.X(), db.X());
    EXPECT_EQ(da.y(), db.y());
    EXPECT_NE(da.X(), dc.X());
}

TEST(Design, Errors)
{
    EXPECT_THROW(DesignSampler(gaussian_design(CovarianceSpec::identity(3), 1)), invalid_input);
    DesignSpec t = gaussian_design(CovarianceSpec::identity(3), 10);
    t.mode = DesignMode::truncated;
    t.bound = 0.0;
    EXPECT_THROW(DesignSampler{t}, invalid_input);
    Stream s(1, 0, "design");
    EXPECT_THROW(gen_design(gaussian_design(CovarianceSpec::identity(3), 10), Vector::Zero(4), s), invalid_input);
}

TEST(TwoSample, SwappedArgumentsMirrorThePair)
{
    const DesignSpec s1 = gaussian_design(CovarianceSpec::identity(5), 30);
    const DesignSpec s2 = gaussian_design(CovarianceSpec::block(5, 0.3, 1), 45);
    const Vector b1 = Vector::Constant(5, 0.5), b2 = Vector::Zero(5);
    Stream r1(17, 0, "design"), r2(17, 0, "design2");
    const auto [x1, x2] = gen_two_sample(s1, s2, b1, b2, r1, r2);
    Stream q1(17, 0, "design"), q2(17, 0, "design2");
    const auto [y2, y1] = gen_two_sample(s2, s1, b2, b1, q2, q1);
    EXPECT_EQ(x1.X(), y1.X());
    EXPECT_EQ(x1.y(), y1.y());
    EXPECT_EQ(x2.X(), y2.X());
    EXPECT_EQ(x2.y(), y2.y());
    EXPECT_EQ(x1.n(), 30);
    EXPECT_EQ(x2.n(), 45);
    EXPECT_NE(x1.X().topRows(30), x2.X().topRows(30));
}

TEST(TwoSample, DimensionMismatch)
{
    Stream r1(1, 0, "a"), r2(1, 0, "b");
    EXPECT_THROW(gen_two_sample(gaussian_design(CovarianceSpec::identity(3), 10),
                                gaussian_design(CovarianceSpec::identity(4), 10), Vector::Zero(3), Vector::Zero(4), r1,
                                r2),
                 invalid_input);
}

#include <sparseclust/model.hpp>
#include <sparseclust/rng.hpp>

#include <gtest/gtest.h>

#include <map>

using namespace sparseclust;

namespace {

ModelParams params(Index n, Index p, Index s, double delta)
{
    ModelParams mp;
    mp.n = n;
    mp.p = p;
    mp.s = s;
    mp.delta = delta;
    return mp;
}

Labels labels(std::initializer_list<int> v)
{
    Eigen::VectorXi z(static_cast<Index>(v.size()));
    Index i = 0;
    for (int x : v) z(i++) = x;
    return Labels(z);
}

} // namespace

TEST(Rng, SameSeedSameStream)
{
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const double x = a.normal();
        EXPECT_EQ(x, b.normal());
        if (i == 0) {
            EXPECT_NE(x, c.normal());
        }
    }
}

TEST(Rng, UniformAndBelowRanges)
{
    Rng r(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        EXPECT_LT(r.below(7), 7U);
    }
}

TEST(Rng, NormalMoments)
{
    Rng r(11);
    const int N = 200000;
    double s1 = 0, s2 = 0;
    for (int i = 0; i < N; ++i) {
        const double x = r.normal();
        s1 += x;
        s2 += x * x;
    }
    EXPECT_NEAR(s1 / N, 0.0, 0.01);
    EXPECT_NEAR(s2 / N, 1.0, 0.02);
}

TEST(Rng, DerivedSeedsDiffer)
{
    EXPECT_NE(derive_seed(1, 0, 0), derive_seed(1, 0, 1));
    EXPECT_NE(derive_seed(1, 0, 1), derive_seed(1, 1, 0));
    EXPECT_EQ(derive_seed(9, 3, 4), derive_seed(9, 3, 4));
}

TEST(ModelParams, Validation)
{
    EXPECT_NO_THROW(params(1, 1, 1, 0.0).validate());
    EXPECT_THROW(params(0, 3, 1, 1.0).validate(), std::invalid_argument);
    EXPECT_THROW(params(5, 3, 4, 1.0).validate(), std::invalid_argument);
    EXPECT_THROW(params(5, 3, 0, 1.0).validate(), std::invalid_argument);
    EXPECT_THROW(params(5, 3, 1, -1.0).validate(), std::invalid_argument);
    auto mp = params(5, 3, 1, 1.0);
    mp.kappa = 0.0;
    EXPECT_THROW(mp.validate(), std::invalid_argument);
}

TEST(Labels, RejectsValuesOtherThanPlusMinusOne)
{
    EXPECT_THROW(labels({1, 0, -1}), std::invalid_argument);
    EXPECT_THROW(labels({2}), std::invalid_argument);
    EXPECT_NO_THROW(labels({1, -1}));
}

TEST(SparseMean, SupportIsSortedNonzeros)
{
    Eigen::VectorXd v(5);
    v << 0, 2, 0, -1, 0;
    const SparseMean m(v);
    EXPECT_EQ(m.support, (IndexSet{1, 3}));
    EXPECT_FALSE(m.is_zero());
    EXPECT_TRUE(SparseMean(Eigen::VectorXd::Zero(3)).is_zero());
}

TEST(SampleModel, NoiselessHookGivesExactSignal)
{
    const auto mp = params(6, 4, 2, 3.0);
    const GroundTruth t = sample_prior(mp, 5);
    const Dataset d = sample_model(mp, t.theta, t.z, 5, NoiseMode::zero);
    const Eigen::MatrixXd expect = t.theta.theta * t.z.as_double().transpose();
    EXPECT_EQ((d.X - expect).cwiseAbs().maxCoeff(), 0.0);
    ASSERT_TRUE(d.truth.has_value());
    EXPECT_EQ(d.truth->z, t.z);
}

TEST(SampleModel, ZeroThetaIsUnitNoise)
{
    const auto mp = params(20000, 3, 1, 0.0);
    const Dataset d = sample_model(mp, SparseMean(Eigen::VectorXd::Zero(3)), Labels::constant(20000), 3);
    for (Index j = 0; j < 3; ++j) {
        const double mean = d.X.row(j).mean();
        const double var = (d.X.row(j).array() - mean).square().mean();
        EXPECT_NEAR(var, 1.0, 0.05);
    }
}

TEST(SampleModel, LawOfLargeNumbersRecoversTheta)
{
    const auto mp = params(10000, 2, 1, 1.0);
    Eigen::VectorXd th(2);
    th << 1, 0;
    const Labels z = sample_labels(10000, 17);
    const Dataset d = sample_model(mp, SparseMean(th), z, 17);
    const Eigen::VectorXd est = d.X * z.as_double() / 10000.0;
    EXPECT_NEAR(est(0), 1.0, 0.05);
    EXPECT_NEAR(est(1), 0.0, 0.05);
}

TEST(SampleModel, DimensionMismatchThrows)
{
    const auto mp = params(4, 3, 1, 1.0);
    EXPECT_THROW(sample_model(mp, SparseMean(Eigen::VectorXd::Zero(2)), Labels::constant(4), 1), std::invalid_argument);
    EXPECT_THROW(sample_model(mp, SparseMean(Eigen::VectorXd::Zero(3)), Labels::constant(5), 1), std::invalid_argument);
}

TEST(SampleModel, SameSeedBitIdentical)
{
    const auto mp = params(30, 10, 3, 2.0);
    const GroundTruth t = sample_prior(mp, 99);
    const Dataset a = sample_model(mp, t.theta, t.z, 99);
    const Dataset b = sample_model(mp, t.theta, t.z, 99);
    EXPECT_TRUE(a.X == b.X);
    const Dataset c = sample_model(mp, t.theta, t.z, 100);
    EXPECT_FALSE(a.X == c.X);
}

TEST(SamplePrior, NormAndSparsityExactOnEveryDraw)
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto mp = params(5, 12, 1 + static_cast<Index>(seed % 12), 0.5 + static_cast<double>(seed % 7));
        const GroundTruth t = sample_prior(mp, seed);
        EXPECT_EQ(static_cast<Index>(t.theta.support.size()), mp.s);
        EXPECT_NEAR(t.theta.theta.norm(), mp.delta, 1e-12);
        const double mag = mp.delta / std::sqrt(static_cast<double>(mp.s));
        for (Index j : t.theta.support) EXPECT_NEAR(std::abs(t.theta.theta(j)), mag, 1e-15);
    }
}

TEST(SamplePrior, FullSupportWhenSEqualsP)
{
    const GroundTruth t = sample_prior(params(3, 6, 6, 1.0), 4);
    EXPECT_EQ(t.theta.support, (IndexSet{0, 1, 2, 3, 4, 5}));
}

TEST(SamplePrior, SubsetsAreUniform)
{
    std::map<IndexSet, int> freq;
    const int N = 10000;
    for (int r = 0; r < N; ++r) ++freq[sample_prior(params(1, 4, 2, 1.0), derive_seed(123, static_cast<std::uint64_t>(r))).theta.support];
    ASSERT_EQ(freq.size(), 6U);
    for (const auto& [sub, c] : freq) EXPECT_NEAR(static_cast<double>(c) / N, 1.0 / 6.0, 0.02);
}

TEST(SamplePrior, SignsAndLabelsBalanced)
{
    int pos = 0, zpos = 0, total = 0, ztotal = 0;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        const GroundTruth t = sample_prior(params(10, 8, 3, 1.0), seed);
        for (Index j : t.theta.support) pos += t.theta.theta(j) > 0, ++total;
        for (Index i = 0; i < 10; ++i) zpos += t.z[i] > 0, ++ztotal;
    }
    EXPECT_NEAR(static_cast<double>(pos) / total, 0.5, 0.02);
    EXPECT_NEAR(static_cast<double>(zpos) / ztotal, 0.5, 0.02);
}

TEST(SampleNull, EqualsSampleModelWithZeroTheta)
{
    const auto mp = params(25, 7, 2, 3.0);
    const Dataset a = sample_null(mp, 8);
    const Dataset b = sample_model(mp, SparseMean(Eigen::VectorXd::Zero(7)), sample_labels(25, 8), 8);
    EXPECT_TRUE(a.X == b.X);
    ASSERT_TRUE(a.truth.has_value());
    EXPECT_TRUE(a.truth->theta.is_zero());
}

TEST(SampleNull, CovarianceIsIdentity)
{
    const Dataset d = sample_null(params(5000, 5, 1, 0.0), 21);
    const Eigen::MatrixXd C = d.X * d.X.transpose() / 5000.0;
    for (Index i = 0; i < 5; ++i)
        for (Index j = 0; j < 5; ++j) EXPECT_NEAR(C(i, j), i == j ? 1.0 : 0.0, 0.1);
    const Dataset big = sample_null(params(10000, 3, 1, 0.0), 22);
    for (Index j = 0; j < 3; ++j) EXPECT_NEAR(big.X.row(j).mean(), 0.0, 0.05);
}

TEST(MisclusteringLoss, Examples)
{
    const Labels z = labels({1, 1, -1, -1});
    EXPECT_EQ(misclustering_loss(z, z), 0.0);
    EXPECT_EQ(misclustering_loss(z.flipped(), z), 0.0);
    EXPECT_DOUBLE_EQ(misclustering_loss(labels({1, -1, -1, -1}), z), 0.25);
}

TEST(MisclusteringLoss, Errors)
{
    EXPECT_THROW(misclustering_loss(labels({1}), labels({1, 1})), std::invalid_argument);
    EXPECT_THROW(misclustering_loss(Labels(Eigen::VectorXi(0)), Labels(Eigen::VectorXi(0))), std::invalid_argument);
}

TEST(MisclusteringLoss, FlipSymmetricAndAtMostHalf)
{
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const Index n = 1 + static_cast<Index>(seed % 13);
        const Labels a = sample_labels(n, seed);
        const Labels b = sample_labels(n, seed + 1000);
        const double l = misclustering_loss(a, b);
        EXPECT_LE(l, 0.5);
        EXPECT_EQ(l, misclustering_loss(a.flipped(), b));
        EXPECT_EQ(l, misclustering_loss(a, b.flipped()));
        EXPECT_EQ(l, misclustering_loss(b, a));
    }
}

TEST(PlantedProjector, Examples)
{
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(3);
    e1(0) = 1;
    Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(3, 3);
    expect(0, 0) = 1;
    EXPECT_TRUE(planted_projector(SparseMean(e1)) == expect);

    const Eigen::MatrixXd half = planted_projector(SparseMean(Eigen::VectorXd::Ones(2)));
    EXPECT_TRUE(half.isApprox(Eigen::MatrixXd::Constant(2, 2, 0.5), 1e-15));

    EXPECT_THROW(planted_projector(SparseMean(Eigen::VectorXd::Zero(2))), std::invalid_argument);
}

TEST(PlantedProjector, IdempotentTraceOne)
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const GroundTruth t = sample_prior(params(2, 9, 4, 2.5), seed);
        const Eigen::MatrixXd P = planted_projector(t.theta);
        EXPECT_LE((P * P - P).norm(), 1e-12);
        EXPECT_NEAR(P.trace(), 1.0, 1e-12);
    }
}

TEST(EqualEntriesMean, FirstSCoordinates)
{
    const SparseMean m = equal_entries_mean(6, 4, 4.0);
    EXPECT_EQ(m.support, (IndexSet{0, 1, 2, 3}));
    EXPECT_NEAR(m.theta.norm(), 4.0, 1e-14);
    EXPECT_DOUBLE_EQ(m.theta(0), 2.0);
}

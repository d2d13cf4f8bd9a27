#include <sparseclust/cluster.hpp>
#include <sparseclust/detect.hpp>
#include <sparseclust/rng.hpp>

#include <gtest/gtest.h>

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

DetectConfig dcfg(Index n, Index p, Index s, double eps = 1.0)
{
    DetectConfig c;
    c.n = n;
    c.p = p;
    c.s = s;
    c.epsilon = eps;
    return c;
}

Eigen::ArrayXd flat(const Eigen::MatrixXd& m) { return Eigen::Map<const Eigen::ArrayXd>(m.data(), m.size()); }

} // namespace

TEST(DetectConfig, Validation)
{
    EXPECT_NO_THROW(dcfg(10, 5, 2).validate());
    EXPECT_THROW(dcfg(10, 5, 2, 0.0).validate(), std::invalid_argument);
    EXPECT_THROW(dcfg(10, 5, 2, 1.5).validate(), std::invalid_argument);
    EXPECT_THROW(dcfg(10, 5, 6).validate(), std::invalid_argument);
}

TEST(SplitTwo, UnitVarianceAndIndependence)
{
    const Dataset d = sample_null(params(2000, 500, 1, 0.0), 1);
    for (double eps : {1.0, 0.5}) {
        const TwoWaySplit sp = split_two(d, eps, 2);
        const Eigen::ArrayXd a = flat(sp.x1.X), b = flat(sp.x2.X);
        const auto var = [](const Eigen::ArrayXd& x) { return (x - x.mean()).square().mean(); };
        EXPECT_NEAR(var(a), 1.0, 0.02);
        EXPECT_NEAR(var(b), 1.0, 0.02);
        const Eigen::ArrayXd ca = a - a.mean(), cb = b - b.mean();
        EXPECT_LE(std::abs((ca * cb).sum() / std::sqrt(ca.square().sum() * cb.square().sum())), 0.02);
    }
}

TEST(SplitTwo, EpsilonOneSumIdentity)
{
    const auto mp = params(20, 8, 2, 3.0);
    const GroundTruth t = sample_prior(mp, 5);
    const Dataset d = sample_model(mp, t.theta, t.z, 5);
    const TwoWaySplit sp = split_two(d, 1.0, 6);
    EXPECT_LE((sp.x1.X + sp.x2.X - std::sqrt(2.0) * d.X).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(SplitTwo, ZeroNoiseHookRescalesOnly)
{
    const auto mp = params(20, 8, 2, 3.0);
    const GroundTruth t = sample_prior(mp, 5);
    const Dataset d = sample_model(mp, t.theta, t.z, 5);
    const double eps = 0.6;
    const TwoWaySplit sp = split_two(d, eps, 6, NoiseMode::zero);
    EXPECT_LE((sp.x1.X - d.X / std::sqrt(1 + 1 / (eps * eps))).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((sp.x2.X - d.X / std::sqrt(1 + eps * eps)).cwiseAbs().maxCoeff(), 1e-14);
    ASSERT_TRUE(sp.x2.truth.has_value());
    EXPECT_NEAR(sp.x2.truth->theta.theta.norm(), 3.0 / std::sqrt(1 + eps * eps), 1e-13);
    EXPECT_THROW(split_two(d, 0.0, 1), std::invalid_argument);
}

TEST(TestStatistic, Examples)
{
    EXPECT_DOUBLE_EQ(top_s_energy(Eigen::Vector3d(3, -2, 1), 2), 13.0);
    const Eigen::Vector3d v(0.5, -1.5, 2);
    EXPECT_DOUBLE_EQ(top_s_energy(v, 3), v.squaredNorm());
    Eigen::VectorXd w = Eigen::VectorXd::Zero(6);
    w(5) = -5;
    EXPECT_DOUBLE_EQ(top_s_energy(w, 1), 25.0);
    EXPECT_THROW(top_s_energy(w, 7), std::invalid_argument);
}

TEST(TestStatistic, FlipInvariantAndMonotoneInS)
{
    const auto mp = params(40, 15, 3, 2.0);
    const GroundTruth t = sample_prior(mp, 8);
    const Dataset d = sample_model(mp, t.theta, t.z, 8);
    const Labels z = sample_labels(40, 9);
    double prev = 0;
    for (Index s = 1; s <= 15; ++s) {
        const double v = test_statistic(d, z, s);
        EXPECT_DOUBLE_EQ(v, test_statistic(d, z.flipped(), s));
        EXPECT_GE(v, prev);
        prev = v;
    }
    EXPECT_THROW(test_statistic(d, sample_labels(39, 1), 2), std::invalid_argument);
}

TEST(DetectionThreshold, Examples)
{
    EXPECT_NEAR(detection_threshold(dcfg(50, 7, 7)), 6.0 * 7 / 50, 1e-14);
    EXPECT_NEAR(detection_threshold(dcfg(100, 200, 5)), 30.0 * std::log(40.0 * std::exp(1.0)) / 100.0, 1e-14);
    EXPECT_NEAR(detection_threshold(dcfg(100, 200, 5)), 1.4067, 1e-4);
    DetectConfig z = dcfg(100, 200, 5);
    z.threshold_mult = 0;
    EXPECT_EQ(detection_threshold(z), 0.0);
}

TEST(DetectionTest, DeterministicAndShapeChecked)
{
    const auto mp = params(100, 200, 5, 4.0);
    const GroundTruth t = sample_prior(mp, 1);
    const Dataset d = sample_model(mp, t.theta, t.z, 1);
    const auto a = detection_test(d, oracle_labeler(), dcfg(100, 200, 5), 2);
    const auto b = detection_test(d, oracle_labeler(), dcfg(100, 200, 5), 2);
    EXPECT_EQ(a.statistic, b.statistic);
    EXPECT_EQ(a.reject, b.reject);
    EXPECT_EQ(a.reject, a.statistic > a.threshold);
    EXPECT_THROW(detection_test(d, oracle_labeler(), dcfg(100, 201, 5), 2), std::invalid_argument);
}

TEST(DetectionTest, LabelerErrorsPropagate)
{
    const Dataset d = sample_null(params(10, 5, 1, 0.0), 1);
    Dataset bare{d.X, std::nullopt};
    EXPECT_THROW(detection_test(bare, oracle_labeler(), dcfg(10, 5, 1), 2), std::invalid_argument);
}

TEST(ErrorRates, OracleLabelerSmallRun)
{
    const auto mp = params(100, 200, 5, 4.0);
    const ErrorRates r = error_rates(60, mp, oracle_labeler(), dcfg(100, 200, 5), 7);
    EXPECT_EQ(r.trials, 60);
    EXPECT_LE(r.type_I, 0.05);
    EXPECT_LE(r.type_II, 0.10);
    EXPECT_LE(r.type_I + r.type_II, 1 + 2 * (r.se_type_I + r.se_type_II));
    EXPECT_NEAR(r.labeler_signal, 4.0 / std::sqrt(2.0), 1e-14);
}

TEST(ErrorRates, RandomLabelerLosesPower)
{
    const auto mp = params(100, 200, 5, 4.0);
    const ErrorRates r = error_rates(40, mp, random_labeler(3), dcfg(100, 200, 5), 8);
    EXPECT_GT(r.type_II, 0.5);
    EXPECT_LE(r.type_I + r.type_II, 1 + 2 * (r.se_type_I + r.se_type_II));
}

TEST(ErrorRates, WrapsSplittingPipeline)
{
    const auto mp = params(100, 200, 5, 4.0);
    const Labeler alg2 = [](const Dataset& d) { return sparse_cluster_splitting(d, 5, 17).zhat; };
    const ErrorRates r = error_rates(10, mp, alg2, dcfg(100, 200, 5), 9);
    EXPECT_GE(r.type_I, 0.0);
    EXPECT_LE(r.type_I, 1.0);
    EXPECT_THROW(error_rates(0, mp, alg2, dcfg(100, 200, 5), 9), std::invalid_argument);
}

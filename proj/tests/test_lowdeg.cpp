#include "oracles.hpp"

#include <sparseclust/errors.hpp>
#include <sparseclust/lowdeg.hpp>
#include <sparseclust/rng.hpp>

#include <gtest/gtest.h>

using namespace sparseclust;

namespace {

LowDegParams ld(Index n, Index p, Index s, double delta, int D)
{
    LowDegParams q;
    q.n = n;
    q.p = p;
    q.s = s;
    q.delta = delta;
    q.D = D;
    return q;
}

} // namespace

TEST(LowDegParams, Validation)
{
    EXPECT_NO_THROW(ld(1, 1, 1, 0, 0).validate());
    EXPECT_THROW(ld(1, 2, 3, 1, 2).validate(), std::invalid_argument);
    EXPECT_THROW(ld(1, 2, 1, 1, -1).validate(), std::invalid_argument);
    auto q = ld(1, 2, 1, 1, 2);
    q.shrink = 1.0;
    EXPECT_THROW(q.validate(), std::invalid_argument);
}

TEST(OverlapMoment, MatchesPairEnumeration)
{
    EXPECT_NEAR(overlap_moment_exact(4, 2, 1), 1.0, 1e-12);
    EXPECT_NEAR(overlap_moment_exact(4, 2, 2), 4.0 / 3.0, 1e-12);
    for (int p = 1; p <= 7; ++p)
        for (int s = 0; s <= p; ++s)
            for (int d = 0; d <= 4; ++d)
                EXPECT_NEAR(overlap_moment_exact(p, s, d), oracle::overlap_moment_pairs(p, s, d), 1e-12)
                    << "p=" << p << " s=" << s << " d=" << d;
}

TEST(OverlapMoment, FullSupport)
{
    for (int d = 0; d <= 5; ++d) EXPECT_NEAR(overlap_moment_exact(6, 6, d), std::pow(6.0, d), 1e-9);
}

TEST(OverlapMoment, Errors)
{
    EXPECT_THROW(overlap_moment_exact(3, 4, 1), std::invalid_argument);
    EXPECT_THROW(overlap_moment_exact(3, 1, -1), std::invalid_argument);
}

TEST(TruncatedExp, MatchesDirectSum)
{
    for (double x : {-3.0, -0.5, 0.0, 0.7, 2.0, 10.0})
        for (int D = 0; D <= 12; ++D) {
            double term = 1, sum = 1;
            for (int d = 1; d <= D; ++d) sum += (term *= x / d);
            EXPECT_NEAR(truncated_exp(x, D), sum, 1e-12 * std::max(1.0, std::abs(sum)));
        }
}

TEST(TruncatedExp, HandlesHighDegree)
{
    EXPECT_NEAR(truncated_exp(5.0, 150), std::exp(5.0), 1e-9 * std::exp(5.0));
    EXPECT_THROW(truncated_exp(1e300, 150), NumericalError);
}

TEST(LowDegExact, HandEnumeratedValues)
{
    EXPECT_NEAR(lowdeg_norm_exact(ld(1, 1, 1, 1.0, 2)).value, 1.5, 1e-12);
    for (double delta : {0.3, 1.0, 1.7}) {
        const double d4 = std::pow(delta, 4);
        EXPECT_NEAR(lowdeg_norm_exact(ld(2, 2, 1, delta, 2)).value, 1 + d4 / 2, 1e-12);
    }
}

TEST(LowDegExact, MatchesFullPairEnumeration)
{
    for (int n = 1; n <= 3; ++n)
        for (int p = 1; p <= 3; ++p)
            for (int s = 1; s <= std::min(p, 2); ++s)
                for (int D = 0; D <= 5; ++D) {
                    const double delta = 0.4 + 0.3 * D;
                    EXPECT_NEAR(lowdeg_norm_exact(ld(n, p, s, delta, D)).value, oracle::lowdeg_brute(n, p, s, delta, D),
                                1e-10)
                        << n << " " << p << " " << s << " " << D;
                }
}

TEST(LowDegExact, CanonicalDrawInvariance)
{
    const auto q = ld(3, 5, 2, 1.2, 4);
    PriorDraw other;
    other.z = Eigen::VectorXi(3);
    other.z << -1, 1, -1;
    other.support = {1, 4};
    other.signs = Eigen::VectorXi(2);
    other.signs << -1, 1;
    EXPECT_NEAR(lowdeg_norm_exact(q).value, lowdeg_norm_exact(q, other).value, 1e-12);
}

TEST(LowDegExact, MonotoneInDegreeAndOddDegreesVanish)
{
    for (double delta : {0.5, 1.0, 1.5}) {
        double prev = 0.0;
        for (int D = 0; D <= 8; ++D) {
            const double v = lowdeg_norm_exact(ld(3, 4, 2, delta, D)).value;
            EXPECT_GE(v, prev - 1e-12);
            prev = v;
            if (D % 2 == 1) {
                EXPECT_NEAR(v, lowdeg_norm_exact(ld(3, 4, 2, delta, D - 1)).value, 1e-12);
            }
        }
    }
}

TEST(LowDegExact, GuardRejectsLargeInstances)
{
    EXPECT_THROW(lowdeg_norm_exact(ld(30, 10, 2, 1, 2)), std::invalid_argument);
    EXPECT_NO_THROW(lowdeg_norm_exact(ld(10, 10, 2, 1, 2)));
}

TEST(LowDegShrink, UsesEffectiveDelta)
{
    auto q = ld(2, 2, 1, 2.0, 2);
    q.shrink = 0.5;
    EXPECT_NEAR(lowdeg_norm_exact(q).value, lowdeg_norm_exact(ld(2, 2, 1, 1.0, 2)).value, 1e-14);
}

TEST(LowDegMc, DegreeZeroIsExactlyOne)
{
    const NormEstimate e = lowdeg_norm_mc(ld(3, 5, 2, 1.0, 0), 100, 1);
    EXPECT_EQ(e.value, 1.0);
    EXPECT_EQ(e.std_error, 0.0);
}

TEST(LowDegMc, SmallInstanceWithinThreeSe)
{
    const NormEstimate e = lowdeg_norm_mc(ld(1, 1, 1, 1.0, 2), 20000, 3);
    EXPECT_LE(std::abs(e.value - 1.5), 3 * e.std_error);
    EXPECT_EQ(e.method, NormMethod::monte_carlo);
}

TEST(LowDegMc, AtLeastOneMinusThreeSe)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto q = ld(2 + static_cast<Index>(seed % 4), 6, 2, 0.5 + 0.2 * static_cast<double>(seed), 1 + static_cast<int>(seed % 5));
        const NormEstimate e = lowdeg_norm_mc(q, 2000, seed);
        EXPECT_GE(e.value, 1 - 3 * e.std_error);
    }
}

TEST(LowDegMc, BlowsUpInEasyRegime)
{
    // n Delta^4 / p = 8 with s = 1.
    const NormEstimate e = lowdeg_norm_mc(ld(8, 4, 1, 1.0 * std::pow(4.0, 0.25), 4), 20000, 5);
    EXPECT_GT(e.value, 2.0);
}

TEST(LowDegMc, Errors) { EXPECT_THROW(lowdeg_norm_mc(ld(1, 1, 1, 1, 2), 1, 0), std::invalid_argument); }

TEST(LowDegBound, Examples)
{
    EXPECT_EQ(lowdeg_bound(ld(5, 10, 2, 0.0, 6)), 1.0);
    EXPECT_EQ(lowdeg_bound(ld(5, 10, 2, 0.1, 0)), 1.0);
    EXPECT_EQ(lowdeg_bound(ld(5, 10, 2, 0.1, 1)), 1.0);
    const auto q = ld(10, 1000000, 1000, 1.0, 10);
    const double r = std::sqrt(1e-5) + std::sqrt(400.0 / 1e6);
    EXPECT_NEAR(lowdeg_ratio(q), r, 1e-15);
    double expect = 1;
    for (int d = 1; d <= 5; ++d) expect += std::pow(r * r, d);
    EXPECT_NEAR(lowdeg_bound(q), expect, 1e-15);
    EXPECT_NEAR(lowdeg_bound(q), 1.000537, 1e-6);
}

TEST(LowDegBound, OutsideRegimeThrows) { EXPECT_THROW(lowdeg_bound(ld(10, 10, 1, 2.0, 4)), OutsideRegime); }

TEST(LowDegBound, DominatesExactWhereItApplies)
{
    int checked = 0;
    for (int n = 1; n <= 4; ++n)
        for (int p = 1; p <= 6; ++p)
            for (int s = 1; s <= std::min(p, 3); ++s)
                for (int D = 0; D <= 6; ++D)
                    for (double delta : {0.05, 0.1, 0.2, 0.3, 0.4}) {
                        const auto q = ld(n, p, s, delta, D);
                        if (!(lowdeg_ratio(q) < 1)) continue;
                        ++checked;
                        EXPECT_LE(lowdeg_norm_exact(q).value, lowdeg_bound(q) + 1e-12);
                    }
    EXPECT_GT(checked, 100);
}

TEST(RandomizedTest, Outcomes)
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        EXPECT_EQ(randomized_test(0.0, seed), TestOutcome::zero);
        EXPECT_EQ(randomized_test(1.0, seed), TestOutcome::one);
        EXPECT_EQ(randomized_test(1.5, seed), TestOutcome::undefined);
        EXPECT_EQ(randomized_test(-0.1, seed), TestOutcome::undefined);
    }
    int ones = 0;
    for (std::uint64_t seed = 0; seed < 4000; ++seed) ones += randomized_test(0.3, seed) == TestOutcome::one;
    EXPECT_NEAR(ones / 4000.0, 0.3, 0.03);
    EXPECT_THROW(randomized_test(NAN, 0), std::invalid_argument);
}

TEST(NormMethod, Names)
{
    EXPECT_EQ(to_string(NormMethod::exact), "exact");
    EXPECT_EQ(to_string(NormMethod::monte_carlo), "monte_carlo");
    EXPECT_EQ(to_string(NormMethod::bound), "bound");
}

#pragma once

// Squared norm of the degree-<=D projected likelihood ratio between the
// planted prior and pure noise,
//
//     ||L^{<=D}||^2 = E_{(theta,z),(theta~,z~)} sum_{d=0}^{D} <z,z~>^d <theta,theta~>^d / d!,
//
// by exact enumeration, by Monte Carlo, and via the closed-form geometric
// upper bound; plus the randomized rounding of a polynomial test.

#include <sparseclust/model.hpp>

#include <cstdint>
#include <string_view>

namespace sparseclust {

struct LowDegParams
{
    Index n = 1;
    Index p = 1;
    Index s = 1;
    double delta = 0.0;
    int D = 0;
    // Optional signal shrinkage: the calculator uses (1 - shrink) * delta.
    double shrink = 0.0;

    void validate() const;
    double effective_delta() const { return (1.0 - shrink) * delta; }
    ModelParams model() const;
};

enum class NormMethod
{
    exact,
    monte_carlo,
    bound,
};

std::string_view to_string(NormMethod m);

struct NormEstimate
{
    double value = 1.0;
    double std_error = 0.0;
    NormMethod method = NormMethod::exact;
};

/// E|S cap S~|^d for independent uniform s-subsets of {0..p-1}, from the
/// hypergeometric law P(|S cap S~| = j) = C(s,j) C(p-s,s-j) / C(p,s).
double overlap_moment_exact(Index p, Index s, int d);

/// sum_{d=0}^{D} x^d / d!, evaluated term by term in log space with sign
/// tracking. Throws NumericalError naming the first overflowing degree.
double truncated_exp(double x, int D);

/// Monte-Carlo estimate over `reps` independent prior pairs; std_error is the
/// sample standard deviation over sqrt(reps).
NormEstimate lowdeg_norm_mc(const LowDegParams& params, Index reps, std::uint64_t seed);

/// One draw (z, theta) from the prior support, used to pin the first draw of
/// the exact enumeration. Magnitudes are delta / sqrt(s).
struct PriorDraw
{
    Eigen::VectorXi z;     // +-1, length n
    IndexSet support;      // s distinct indices in [0, p)
    Eigen::VectorXi signs; // +-1, length s
};

/// z = 1, support = {0..s-1}, all signs +1.
PriorDraw canonical_draw(const LowDegParams& params);

/// Upper limit on 2^n * C(p,s) * 2^s for exact enumeration.
inline constexpr double kMaxEnumerationStates = 1e7;

/// Exact value: fix the first draw (the summand depends on the pair only
/// through <z,z~> and <theta,theta~>, whose joint law given the first draw is
/// the same for every first draw by sign/permutation symmetry of the prior)
/// and enumerate every second draw. Throws std::invalid_argument when the
/// state count exceeds kMaxEnumerationStates.
NormEstimate lowdeg_norm_exact(const LowDegParams& params);
NormEstimate lowdeg_norm_exact(const LowDegParams& params, const PriorDraw& first);

/// r = sqrt(n delta^4 / p) + sqrt(4 n delta^4 D / s^2).
double lowdeg_ratio(const LowDegParams& params);

/// 1 + sum_{d=1}^{floor(D/2)} r^{2d}. Throws OutsideRegime when r >= 1.
double lowdeg_bound(const LowDegParams& params);

enum class TestOutcome
{
    zero,
    one,
    undefined, // f outside [0, 1]
};

/// Bernoulli(f) from the stream of `seed` when f is in [0, 1], else undefined.
TestOutcome randomized_test(double f_value, std::uint64_t seed);

} // namespace sparseclust

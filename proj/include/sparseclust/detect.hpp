#pragma once

// Detection from clustering: split X into two independent unit-noise copies,
// cluster the second, and threshold the top-s energy of X1 zhat / n.

#include <sparseclust/model.hpp>

#include <cstdint>
#include <functional>

namespace sparseclust {

struct DetectConfig
{
    double epsilon = 1.0;
    Index n = 1;
    Index p = 1;
    Index s = 1;
    double threshold_mult = 6.0;

    void validate() const;
};

/// Any clustering routine; the reduction treats it as a black box.
using Labeler = std::function<Labels(const Dataset&)>;

struct TwoWaySplit
{
    Dataset x1; // (X + E~/eps) / sqrt(1 + 1/eps^2)
    Dataset x2; // (X - eps E~) / sqrt(1 + eps^2)
};

/// Fresh E~ with i.i.d. N(0,1) entries; NoiseMode::zero drops it (test hook).
/// Truth, when present, is carried over with theta rescaled to each copy's signal.
TwoWaySplit split_two(const Dataset& data, double epsilon, std::uint64_t seed, NoiseMode noise = NoiseMode::gaussian);

/// Sum of squares of the s largest-magnitude entries of X1 zhat / n.
double test_statistic(const Dataset& x1, const Labels& zhat, Index s);

/// Sum of squares of the s largest-magnitude entries of v.
double top_s_energy(const Eigen::VectorXd& v, Index s);

/// threshold_mult * s * log(e p / s) / n.
double detection_threshold(const DetectConfig& cfg);

struct DetectionOutcome
{
    bool reject = false;
    double statistic = 0.0;
    double threshold = 0.0;
};

/// split_two, zhat = cluster_fn(X2), reject iff statistic > threshold.
DetectionOutcome detection_test(const Dataset& data, const Labeler& cluster_fn, const DetectConfig& cfg,
                                std::uint64_t seed);

struct ErrorRates
{
    double type_I = 0.0;  // rejection rate under theta = 0
    double type_II = 0.0; // acceptance rate under the planted prior
    double se_type_I = 0.0;
    double se_type_II = 0.0;
    Index trials = 0;
    // Signal norm of the copy handed to the labeler: delta / sqrt(1 + eps^2).
    double labeler_signal = 0.0;
};

/// Monte-Carlo error rates: each trial draws a null dataset and a planted
/// dataset (prior of `params`) from its own substream and runs the test on both.
ErrorRates error_rates(Index trials, const ModelParams& params, const Labeler& cluster_fn, const DetectConfig& cfg,
                       std::uint64_t seed);

/// Labeler returning the true labels carried by the dataset.
Labeler oracle_labeler();

/// Labeler returning Rademacher labels independent of the data.
Labeler random_labeler(std::uint64_t seed);

} // namespace sparseclust

#pragma once

// Symmetric two-cluster Gaussian model X_i = z_i * theta + eps_i with an
// s-sparse mean, the planted prior over (theta, z), and the misclustering loss.

#include <sparseclust/types.hpp>

#include <Eigen/Core>

#include <cstdint>
#include <optional>

namespace sparseclust {

struct ModelParams
{
    Index n = 1;
    Index p = 1;
    Index s = 1;
    double delta = 0.0;
    std::optional<double> kappa; // entrywise cap, used for default lambda

    /// Throws std::invalid_argument unless 1 <= s <= p, n >= 1, delta >= 0, kappa > 0.
    void validate() const;
};

/// Length-p mean vector with its support stored explicitly.
struct SparseMean
{
    Eigen::VectorXd theta;
    IndexSet support; // sorted, {j : theta_j != 0}

    SparseMean() = default;
    explicit SparseMean(Eigen::VectorXd values);

    Index dim() const { return theta.size(); }
    bool is_zero() const { return support.empty(); }
};

/// Cluster labels, every entry exactly -1 or +1.
class Labels
{
public:
    Labels() = default;
    explicit Labels(Eigen::VectorXi z); // throws std::invalid_argument on other values

    static Labels constant(Index n, int value = 1);

    const Eigen::VectorXi& values() const { return z_; }
    Index size() const { return z_.size(); }
    int operator[](Index i) const { return z_(i); }
    Eigen::VectorXd as_double() const { return z_.cast<double>(); }
    Labels flipped() const { return Labels(Eigen::VectorXi(-z_)); }

    friend bool operator==(const Labels& a, const Labels& b) { return a.z_ == b.z_; }

private:
    Eigen::VectorXi z_;
};

struct GroundTruth
{
    SparseMean theta;
    Labels z;
};

/// p x n sample matrix (columns are samples) plus optional truth.
struct Dataset
{
    Eigen::MatrixXd X;
    std::optional<GroundTruth> truth;

    Index n() const { return X.cols(); }
    Index p() const { return X.rows(); }
};

enum class NoiseMode
{
    gaussian,
    zero, // test hook: X_i = z_i * theta exactly
};

/// X_i = z_i theta + eps_i, eps entries i.i.d. N(0,1) from the stream of `seed`.
Dataset sample_model(const ModelParams& params, const SparseMean& theta, const Labels& z, std::uint64_t seed,
                     NoiseMode noise = NoiseMode::gaussian);

/// Planted prior: S uniform over s-subsets, theta_j = +-delta/sqrt(s) on S,
/// z i.i.d. Rademacher.
GroundTruth sample_prior(const ModelParams& params, std::uint64_t seed);

/// Null distribution: sample_model with theta = 0, labels drawn from the
/// labels substream of `seed` (recorded in truth).
Dataset sample_null(const ModelParams& params, std::uint64_t seed);

/// Rademacher labels from the labels substream of `seed`.
Labels sample_labels(Index n, std::uint64_t seed);

/// Fraction of disagreements minimized over a global sign flip; always <= 1/2.
double misclustering_loss(const Labels& zhat, const Labels& z);

/// theta theta^T / ||theta||^2.
SymmetricMatrix planted_projector(const SparseMean& theta);

/// Mean with `s` equal-magnitude entries delta/sqrt(s) on coordinates 0..s-1.
SparseMean equal_entries_mean(Index p, Index s, double delta);

} // namespace sparseclust

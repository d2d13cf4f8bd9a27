#pragma once

// Two clustering pipelines for the symmetric two-cluster model:
//   - sparse spectral clustering: sparse PCA via the Fantope SDP, then sign
//     rounding of the projected data (no sample splitting);
//   - the three-way sample-splitting pipeline: diagonal thresholding,
//     preliminary labels, top-s mean estimate, refined labels.

#include <sparseclust/fps.hpp>
#include <sparseclust/model.hpp>

#include <cstdint>
#include <optional>

namespace sparseclust {

struct ClusterResult
{
    Labels zhat;
    std::optional<Eigen::VectorXd> uhat;    // spectral pipeline
    std::optional<SparseMean> theta_hat;    // splitting pipeline
    std::optional<Index> k_hat;             // splitting pipeline
    double lambda_used = 0.0;
    std::optional<double> loss;             // vs truth, when the dataset carries it
    IndexSet support;                       // supp(P_hat), or supp(theta_hat)
    std::optional<SolverResult> solver;     // spectral pipeline diagnostics
    bool converged = true;
};

/// +1 if x > 0, -1 otherwise (zero maps to -1).
constexpr int sgn(double x) noexcept { return x > 0 ? 1 : -1; }

/// Labels sgn(v_i).
Labels sign_labels(const Eigen::VectorXd& v);

/// P_hat = solve_sdp(input_matrix(X)), u = leading eigenvector of P_hat,
/// zhat_i = sgn(<u, X_i>). Solver non-convergence is flagged, not thrown.
ClusterResult sparse_spectral_cluster(const Dataset& data, const SolverConfig& cfg);

struct ThreeWaySplit
{
    Dataset x1; // X - E~ - E^   noise N(0, 4)
    Dataset x2; // X - E~ + E^   noise N(0, 4)
    Dataset x3; // X + E~        noise N(0, 2)
    Eigen::MatrixXd e_tilde; // E~ entries N(0, 1)
    Eigen::MatrixXd e_check; // E^ entries N(0, 2)
};

/// Adds fresh Gaussian noise to make three independent copies of X.
ThreeWaySplit split_three(const Dataset& data, std::uint64_t seed);

/// argmax_k (X1 X1^T)_kk, lowest index on ties.
Index diag_threshold_select(const Dataset& x1);

/// z~_i = sgn(X1(k, i)).
Labels preliminary_labels(const Dataset& x1, Index k);

/// v = X2 z~ / n restricted to its s largest-magnitude entries (lowest index on ties).
SparseMean hard_threshold_mean(const Dataset& x2, const Labels& ztilde, Index s);

/// Top-s truncation of an arbitrary vector (same rule as hard_threshold_mean).
SparseMean top_s_truncate(const Eigen::VectorXd& v, Index s);

/// zhat_i = sgn(<theta_hat, X3_i>). Throws std::invalid_argument for theta_hat = 0.
Labels refine_labels(const Dataset& x3, const SparseMean& theta_hat);

/// The full splitting pipeline with known sparsity s.
ClusterResult sparse_cluster_splitting(const Dataset& data, Index s, std::uint64_t seed);

} // namespace sparseclust

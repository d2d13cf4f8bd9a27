#include <sparseclust/model.hpp>
#include <sparseclust/rng.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sparseclust {

void ModelParams::validate() const
{
    if (n < 1) throw std::invalid_argument("ModelParams: n must be >= 1");
    if (p < 1) throw std::invalid_argument("ModelParams: p must be >= 1");
    if (s < 1 || s > p) throw std::invalid_argument("ModelParams: need 1 <= s <= p");
    if (!(delta >= 0) || !std::isfinite(delta)) throw std::invalid_argument("ModelParams: delta must be finite and >= 0");
    if (kappa && !(*kappa > 0)) throw std::invalid_argument("ModelParams: kappa must be > 0");
}

SparseMean::SparseMean(Eigen::VectorXd values) : theta(std::move(values))
{
    for (Index j = 0; j < theta.size(); ++j)
        if (theta(j) != 0.0) support.push_back(j);
}

Labels::Labels(Eigen::VectorXi z) : z_(std::move(z))
{
    for (Index i = 0; i < z_.size(); ++i)
        if (z_(i) != 1 && z_(i) != -1) throw std::invalid_argument("Labels: entry " + std::to_string(i) + " is not +-1");
}

Labels Labels::constant(Index n, int value) { return Labels(Eigen::VectorXi::Constant(n, value)); }

Dataset sample_model(const ModelParams& params, const SparseMean& theta, const Labels& z, std::uint64_t seed,
                     NoiseMode noise)
{
    params.validate();
    if (theta.dim() != params.p) throw std::invalid_argument("sample_model: theta has wrong dimension");
    if (z.size() != params.n) throw std::invalid_argument("sample_model: labels have wrong length");

    Dataset data;
    data.X = theta.theta * z.as_double().transpose();
    if (noise == NoiseMode::gaussian) {
        Rng rng(derive_seed(seed, stream::noise));
        // Column-major fill: sample i consumes p consecutive variates.
        for (Index i = 0; i < params.n; ++i)
            for (Index j = 0; j < params.p; ++j) data.X(j, i) += rng.normal();
    }
    data.truth = GroundTruth{theta, z};
    return data;
}

Labels sample_labels(Index n, std::uint64_t seed)
{
    Rng rng(derive_seed(seed, stream::labels));
    Eigen::VectorXi z(n);
    for (Index i = 0; i < n; ++i) z(i) = rng.rademacher();
    return Labels(std::move(z));
}

GroundTruth sample_prior(const ModelParams& params, std::uint64_t seed)
{
    params.validate();
    // Partial Fisher-Yates: the first s slots are a uniform s-subset.
    Rng support_rng(derive_seed(seed, stream::support));
    std::vector<Index> perm(static_cast<std::size_t>(params.p));
    std::iota(perm.begin(), perm.end(), Index{0});
    for (Index k = 0; k < params.s; ++k) {
        const auto j = k + static_cast<Index>(support_rng.below(static_cast<std::uint64_t>(params.p - k)));
        std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(j)]);
    }
    std::vector<Index> S(perm.begin(), perm.begin() + params.s);
    std::sort(S.begin(), S.end());

    Rng sign_rng(derive_seed(seed, stream::signs));
    const double magnitude = params.delta / std::sqrt(static_cast<double>(params.s));
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(params.p);
    for (Index j : S) theta(j) = sign_rng.rademacher() * magnitude;

    SparseMean mean;
    mean.theta = std::move(theta);
    // Support is S even when delta = 0, so ||theta||_0 = s holds by construction
    // whenever delta > 0.
    mean.support = params.delta > 0 ? std::move(S) : IndexSet{};
    return GroundTruth{std::move(mean), sample_labels(params.n, seed)};
}

Dataset sample_null(const ModelParams& params, std::uint64_t seed)
{
    params.validate();
    return sample_model(params, SparseMean(Eigen::VectorXd::Zero(params.p)), sample_labels(params.n, seed), seed);
}

double misclustering_loss(const Labels& zhat, const Labels& z)
{
    if (zhat.size() != z.size()) throw std::invalid_argument("misclustering_loss: length mismatch");
    if (z.size() == 0) throw std::invalid_argument("misclustering_loss: empty labels");
    const Index agree = (zhat.values().array() == z.values().array()).count();
    const Index n = z.size();
    return static_cast<double>(std::min(n - agree, agree)) / static_cast<double>(n);
}

SymmetricMatrix planted_projector(const SparseMean& theta)
{
    const double sq = theta.theta.squaredNorm();
    if (!(sq > 0)) throw std::invalid_argument("planted_projector: theta is zero");
    return theta.theta * theta.theta.transpose() / sq;
}

SparseMean equal_entries_mean(Index p, Index s, double delta)
{
    if (s < 1 || s > p) throw std::invalid_argument("equal_entries_mean: need 1 <= s <= p");
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
    theta.head(s).setConstant(delta / std::sqrt(static_cast<double>(s)));
    return SparseMean(std::move(theta));
}

} // namespace sparseclust

#include <sparseclust/cluster.hpp>
#include <sparseclust/rng.hpp>

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace sparseclust {

namespace {

void attach_loss(ClusterResult& res, const Dataset& data)
{
    if (data.truth && data.truth->z.size() == res.zhat.size()) res.loss = misclustering_loss(res.zhat, data.truth->z);
}

Dataset with_matrix(const Dataset& src, Eigen::MatrixXd X)
{
    return Dataset{std::move(X), src.truth};
}

} // namespace

Labels sign_labels(const Eigen::VectorXd& v)
{
    return Labels(v.unaryExpr([](double x) { return sgn(x); }).eval());
}

ClusterResult sparse_spectral_cluster(const Dataset& data, const SolverConfig& cfg)
{
    if (data.n() < 2) throw std::invalid_argument("sparse_spectral_cluster: need n >= 2");
    if (data.p() < 1) throw std::invalid_argument("sparse_spectral_cluster: need p >= 1");

    ClusterResult res;
    SolverResult sol = solve_sdp(input_matrix(data), cfg);
    Eigen::VectorXd u = leading_eigenvector(sol.P_hat.P);
    res.zhat = sign_labels(data.X.transpose() * u);
    res.uhat = std::move(u);
    res.lambda_used = cfg.lambda;
    res.support = sol.P_hat.support;
    res.converged = sol.converged;
    res.solver = std::move(sol);
    attach_loss(res, data);
    return res;
}

ThreeWaySplit split_three(const Dataset& data, std::uint64_t seed)
{
    const Index p = data.p();
    const Index n = data.n();
    ThreeWaySplit out;
    out.e_tilde.resize(p, n);
    out.e_check.resize(p, n);
    Rng rng(derive_seed(seed, stream::split));
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) out.e_tilde(j, i) = rng.normal();
    Rng rng_aux(derive_seed(seed, stream::split_aux));
    const double sd_check = std::sqrt(2.0);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) out.e_check(j, i) = rng_aux.normal(sd_check);

    out.x1 = with_matrix(data, data.X - out.e_tilde - out.e_check);
    out.x2 = with_matrix(data, data.X - out.e_tilde + out.e_check);
    out.x3 = with_matrix(data, data.X + out.e_tilde);
    return out;
}

Index diag_threshold_select(const Dataset& x1)
{
    if (x1.p() < 1) throw std::invalid_argument("diag_threshold_select: empty dataset");
    const Eigen::VectorXd diag = x1.X.rowwise().squaredNorm();
    Index best = 0;
    for (Index k = 1; k < diag.size(); ++k)
        if (diag(k) > diag(best)) best = k;
    return best;
}

Labels preliminary_labels(const Dataset& x1, Index k)
{
    if (k < 0 || k >= x1.p()) throw std::invalid_argument("preliminary_labels: index out of range");
    return sign_labels(x1.X.row(k).transpose());
}

SparseMean top_s_truncate(const Eigen::VectorXd& v, Index s)
{
    const Index p = v.size();
    if (s < 1 || s > p) throw std::invalid_argument("top_s_truncate: need 1 <= s <= p");
    std::vector<Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return std::abs(v(a)) > std::abs(v(b)); });
    Eigen::VectorXd kept = Eigen::VectorXd::Zero(p);
    for (Index r = 0; r < s; ++r) {
        const Index j = order[static_cast<std::size_t>(r)];
        kept(j) = v(j);
    }
    return SparseMean(std::move(kept));
}

SparseMean hard_threshold_mean(const Dataset& x2, const Labels& ztilde, Index s)
{
    if (ztilde.size() != x2.n()) throw std::invalid_argument("hard_threshold_mean: label length mismatch");
    if (s < 1 || s > x2.p()) throw std::invalid_argument("hard_threshold_mean: need 1 <= s <= p");
    const Eigen::VectorXd v = x2.X * ztilde.as_double() / static_cast<double>(x2.n());
    return top_s_truncate(v, s);
}

Labels refine_labels(const Dataset& x3, const SparseMean& theta_hat)
{
    if (theta_hat.dim() != x3.p()) throw std::invalid_argument("refine_labels: dimension mismatch");
    if (theta_hat.is_zero()) throw std::invalid_argument("refine_labels: estimated mean is zero (degenerate pipeline)");
    return sign_labels(x3.X.transpose() * theta_hat.theta);
}

ClusterResult sparse_cluster_splitting(const Dataset& data, Index s, std::uint64_t seed)
{
    if (data.n() < 1) throw std::invalid_argument("sparse_cluster_splitting: empty dataset");
    const ThreeWaySplit split = split_three(data, seed);
    const Index k = diag_threshold_select(split.x1);
    const Labels ztilde = preliminary_labels(split.x1, k);
    SparseMean theta_hat = hard_threshold_mean(split.x2, ztilde, s);

    ClusterResult res;
    res.zhat = refine_labels(split.x3, theta_hat);
    res.k_hat = k;
    res.support = theta_hat.support;
    res.theta_hat = std::move(theta_hat);
    attach_loss(res, data);
    return res;
}

} // namespace sparseclust

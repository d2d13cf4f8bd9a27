#include <sparseclust/fps.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sparseclust {

void SolverConfig::validate() const
{
    if (!(lambda >= 0) || !std::isfinite(lambda)) throw std::invalid_argument("SolverConfig: lambda must be >= 0");
    if (!(rho > 0)) throw std::invalid_argument("SolverConfig: rho must be > 0");
    if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
    if (!(tol_primal > 0) || !(tol_dual > 0) || !(supp_tol > 0))
        throw std::invalid_argument("SolverConfig: tolerances must be > 0");
    if (!(balance_ratio > 1) || balance_every < 1) throw std::invalid_argument("SolverConfig: bad balancing settings");
}

SymmetricMatrix input_matrix(const Dataset& data)
{
    const Index p = data.p();
    const Index n = data.n();
    if (n < 1) throw std::invalid_argument("input_matrix: dataset has no samples");
    SymmetricMatrix M = SymmetricMatrix::Zero(p, p);
    M.selfadjointView<Eigen::Lower>().rankUpdate(data.X, 1.0 / static_cast<double>(n));
    M.triangularView<Eigen::StrictlyUpper>() = M.transpose();
    M.diagonal().array() -= 1.0;
    return M;
}

double default_lambda(const ModelParams& params, double C)
{
    if (params.p < 2) throw std::invalid_argument("default_lambda: p must be >= 2");
    if (params.n < 1) throw std::invalid_argument("default_lambda: n must be >= 1");
    if (!params.kappa || !(*params.kappa > 0)) throw std::invalid_argument("default_lambda: kappa must be set and > 0");
    if (!(C > 0)) throw std::invalid_argument("default_lambda: C must be > 0");
    return C * (1.0 + *params.kappa) *
           std::sqrt(std::log(static_cast<double>(params.p)) / static_cast<double>(params.n));
}

double sdp_objective(const SymmetricMatrix& M, const SymmetricMatrix& P, double lambda)
{
    return M.cwiseProduct(P).sum() - lambda * P.cwiseAbs().sum();
}

SolverResult solve_sdp(const SymmetricMatrix& M, const SolverConfig& cfg)
{
    cfg.validate();
    detail::require_square(M, "solve_sdp");
    detail::require_finite(M, "solve_sdp");
    const Index p = M.rows();
    if (p == 0) throw std::invalid_argument("solve_sdp: empty matrix");

    double rho = cfg.rho;
    SymmetricMatrix Y = SymmetricMatrix::Zero(p, p);
    SymmetricMatrix U = SymmetricMatrix::Zero(p, p); // scaled multiplier
    SymmetricMatrix P(p, p);
    SymmetricMatrix Y_prev(p, p);

    SolverResult res;
    for (Index it = 1; it <= cfg.max_iters; ++it) {
        P = fantope1_projection(Y - U + M / rho, cfg.supp_tol).P;

        Y_prev.swap(Y);
        Y = soft_threshold(P + U, cfg.lambda / rho);
        Y.diagonal() = Y.diagonal().cwiseMax(0.0);

        U += P - Y;

        const double r = (P - Y).norm();
        const double s = rho * (Y - Y_prev).norm();
        if (!std::isfinite(r) || !std::isfinite(s)) throw NumericalError("solve_sdp: non-finite iterate");

        res.iterations = it;
        res.primal_residual = r;
        res.dual_residual = s;
        if (r <= cfg.tol_primal * (1.0 + P.norm()) && s <= cfg.tol_dual) {
            res.converged = true;
            break;
        }
        if (cfg.adaptive_rho && it % cfg.balance_every == 0) {
            if (r > cfg.balance_ratio * s) {
                rho *= 2.0;
                U /= 2.0;
            } else if (s > cfg.balance_ratio * r) {
                rho /= 2.0;
                U *= 2.0;
            }
        }
    }

    res.rho = rho;
    res.objective = sdp_objective(M, Y, cfg.lambda);
    res.dual = rho * U;
    res.P_hat.support = diagonal_support(Y, cfg.supp_tol);
    res.P_hat.P = std::move(Y);
    return res;
}

CertificateReport dual_certificate(const SymmetricMatrix& M, const SolverResult& result, const IndexSet& S,
                                   double lambda)
{
    if (!(lambda > 0)) throw std::invalid_argument("dual_certificate: lambda must be > 0");
    const Index p = M.rows();
    const auto& P = result.P_hat.P;
    if (P.rows() != p || result.dual.rows() != p) throw std::invalid_argument("dual_certificate: dimension mismatch");

    std::vector<bool> in_S(static_cast<std::size_t>(p), false);
    for (Index j : S) {
        if (j < 0 || j >= p) throw std::invalid_argument("dual_certificate: index outside [0, p)");
        in_S[static_cast<std::size_t>(j)] = true;
    }

    CertificateReport rep;
    rep.Z = SymmetricMatrix::Zero(p, p);
    double sup = 0.0;
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < p; ++i) {
            if (i == j) continue;
            if (in_S[static_cast<std::size_t>(i)] && in_S[static_cast<std::size_t>(j)]) {
                const double pij = P(i, j);
                rep.Z(i, j) = pij != 0.0 ? std::copysign(1.0, pij)
                                          : std::clamp(0.5 * (result.dual(i, j) + result.dual(j, i)) / lambda, -1.0, 1.0);
            } else {
                rep.Z(i, j) = M(i, j) / lambda;
                sup = std::max(sup, std::abs(rep.Z(i, j)));
            }
        }
    }
    rep.offblock_sup = sup;
    rep.sup_norm_ok = rep.Z.cwiseAbs().maxCoeff() <= 1.0;
    IndexSet sorted_S = S;
    std::sort(sorted_S.begin(), sorted_S.end());
    rep.support_contained = is_subset(result.P_hat.support, sorted_S);
    return rep;
}

double projector_error(const SymmetricMatrix& P_hat, const SparseMean& theta)
{
    if (theta.theta.size() != P_hat.rows()) throw std::invalid_argument("projector_error: dimension mismatch");
    return (P_hat - planted_projector(theta)).norm();
}

bool is_subset(const IndexSet& inner, const IndexSet& outer)
{
    return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

} // namespace sparseclust

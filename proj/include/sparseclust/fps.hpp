#pragma once

// l1-penalized 1-Fantope SDP
//
//     maximize <M, P> - lambda * ||P||_1   over   {P = P^T, tr P = 1, 0 <= P <= I}
//
// solved by ADMM on the split P = Y (P carries the Fantope constraint, Y the
// l1 penalty), plus the diagnostics used to check support recovery.

#include <sparseclust/linalg.hpp>
#include <sparseclust/model.hpp>

namespace sparseclust {

struct SolverConfig
{
    double lambda = 0.0;
    double rho = 1.0;
    Index max_iters = 20000;
    double tol_primal = 1e-7;
    double tol_dual = 1e-7;
    double supp_tol = 1e-8;
    // Residual balancing: rho is doubled/halved when one residual exceeds the
    // other by `balance_ratio`; checked every `balance_every` iterations.
    bool adaptive_rho = true;
    double balance_ratio = 10.0;
    Index balance_every = 10;

    void validate() const;
};

struct SolverResult
{
    FantopeCandidate<double> P_hat; // the sparse iterate Y
    Index iterations = 0;
    double primal_residual = 0.0; // ||P - Y||_F
    double dual_residual = 0.0;   // rho * ||Y - Y_prev||_F
    double objective = 0.0;       // <M, Y> - lambda * ||Y||_1
    bool converged = false;
    double rho = 1.0;             // final penalty after balancing
    SymmetricMatrix dual;         // unscaled multiplier rho * U, in lambda * subdifferential at convergence
};

/// M = X X^T / n - I_p.
SymmetricMatrix input_matrix(const Dataset& data);

/// C * (1 + kappa) * sqrt(log(p) / n), natural log. Requires params.kappa.
double default_lambda(const ModelParams& params, double C = 2.0);

/// <M, P> - lambda * sum |P_ij|.
double sdp_objective(const SymmetricMatrix& M, const SymmetricMatrix& P, double lambda);

/// ADMM for the penalized Fantope program. Non-convergence within max_iters
/// is reported through `converged`, non-finite iterates throw NumericalError.
SolverResult solve_sdp(const SymmetricMatrix& M, const SolverConfig& cfg);

struct CertificateReport
{
    SymmetricMatrix Z;             // the modified subgradient
    double offblock_sup = 0.0;     // max |Z_ij| over (i,j) outside S x S, i != j
    bool sup_norm_ok = false;      // ||Z||_inf <= 1
    bool support_contained = false; // supp(P_hat) subset of S
    bool valid() const { return sup_norm_ok && support_contained; }
};

/// Builds Z with Z_ij = M_ij / lambda off S x S (i != j), the solver's own
/// subgradient (clamped, sign(P_ij) on the support of P_hat) on S x S, and zero
/// diagonal. Support recovery is certified when ||Z||_inf <= 1 and
/// supp(P_hat) is inside S.
CertificateReport dual_certificate(const SymmetricMatrix& M, const SolverResult& result, const IndexSet& S,
                                   double lambda);

/// ||P_hat - theta theta^T / ||theta||^2||_F.
double projector_error(const SymmetricMatrix& P_hat, const SparseMean& theta);

/// True when every index of `inner` appears in `outer` (both sorted).
bool is_subset(const IndexSet& inner, const IndexSet& outer);

} // namespace sparseclust

#pragma once

// Dense symmetric kernels: eigendecomposition, simplex and 1-Fantope
// projections, entrywise soft thresholding.

#include <sparseclust/errors.hpp>
#include <sparseclust/types.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sparseclust {

template <class Scalar>
struct EigenDecomposition
{
    Vec<Scalar> values;  // descending
    Mat<Scalar> vectors; // orthonormal columns, values(j) <-> vectors.col(j)
};

/// Symmetric matrix in the 1-Fantope {P = P^T, tr P = 1, 0 <= P <= I}.
template <class Scalar>
struct FantopeCandidate
{
    Mat<Scalar> P;
    IndexSet support; // {i : |P_ii| > supp_tol}
};

namespace detail {

template <class Derived>
void require_finite(const Eigen::MatrixBase<Derived>& A, const char* what)
{
    if (!A.allFinite()) {
        throw NumericalError(std::string(what) + ": non-finite entries");
    }
}

template <class Derived>
void require_square(const Eigen::MatrixBase<Derived>& A, const char* what)
{
    if (A.rows() != A.cols()) {
        throw std::invalid_argument(std::string(what) + ": matrix is not square");
    }
}

// Flip v so its largest-magnitude entry is positive. Entries within a few ulps
// of the maximum count as tied and the lowest index wins.
template <class Derived>
void canonical_sign(Eigen::MatrixBase<Derived>&& v)
{
    using Scalar = typename Derived::Scalar;
    const Scalar vmax = v.cwiseAbs().maxCoeff();
    const Scalar slack = 64 * std::numeric_limits<Scalar>::epsilon() * vmax;
    for (Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) >= vmax - slack) {
            if (v(i) < 0) v = -v;
            return;
        }
    }
}

// LU with partial pivoting of a tridiagonal matrix (LAPACK dgttrf layout) and
// the matching solve (dgtts2). Zero pivots are replaced by +-tiny, which is
// what inverse iteration wants.
template <class Scalar>
struct TridiagonalLu
{
    Vec<Scalar> dl, d, du, du2;
    std::vector<bool> swapped;

    TridiagonalLu(const Vec<Scalar>& diag, const Vec<Scalar>& sub, Scalar shift, Scalar tiny)
        : dl(sub), d(diag.array() - shift), du(sub), du2(Vec<Scalar>::Zero(std::max<Index>(diag.size() - 2, 0))),
          swapped(static_cast<std::size_t>(diag.size()), false)
    {
        const Index n = d.size();
        for (Index i = 0; i + 1 < n; ++i) {
            if (std::abs(d(i)) >= std::abs(dl(i))) {
                if (d(i) != 0) {
                    const Scalar fact = dl(i) / d(i);
                    dl(i) = fact;
                    d(i + 1) -= fact * du(i);
                }
            } else {
                const Scalar fact = d(i) / dl(i);
                d(i) = dl(i);
                dl(i) = fact;
                const Scalar temp = du(i);
                du(i) = d(i + 1);
                d(i + 1) = temp - fact * d(i + 1);
                if (i + 2 < n) {
                    du2(i) = du(i + 1);
                    du(i + 1) = -fact * du(i + 1);
                }
                swapped[static_cast<std::size_t>(i)] = true;
            }
        }
        for (Index i = 0; i < n; ++i) {
            if (std::abs(d(i)) < tiny) d(i) = d(i) < 0 ? -tiny : tiny;
        }
    }

    void solve_in_place(Vec<Scalar>& b) const
    {
        const Index n = d.size();
        for (Index i = 0; i + 1 < n; ++i) {
            if (!swapped[static_cast<std::size_t>(i)]) {
                b(i + 1) -= dl(i) * b(i);
            } else {
                const Scalar temp = b(i) - dl(i) * b(i + 1);
                b(i) = b(i + 1);
                b(i + 1) = temp;
            }
        }
        b(n - 1) /= d(n - 1);
        if (n > 1) b(n - 2) = (b(n - 2) - du(n - 2) * b(n - 1)) / d(n - 2);
        for (Index i = n - 3; i >= 0; --i) {
            b(i) = (b(i) - du(i) * b(i + 1) - du2(i) * b(i + 2)) / d(i);
        }
    }
};

// Eigenvectors of the symmetric tridiagonal (diag, sub) for the given
// eigenvalues (descending) by inverse iteration, reorthogonalizing inside
// clusters of close eigenvalues.
template <class Scalar>
Mat<Scalar> tridiagonal_inverse_iteration(const Vec<Scalar>& diag, const Vec<Scalar>& sub, const Vec<Scalar>& mu)
{
    const Index n = diag.size();
    const Index k = mu.size();
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    Scalar tnorm = diag.cwiseAbs().maxCoeff();
    if (n > 1) tnorm = std::max(tnorm, Scalar(2) * sub.cwiseAbs().maxCoeff() + diag.cwiseAbs().maxCoeff());
    tnorm = std::max(tnorm, std::numeric_limits<Scalar>::min());
    const Scalar sep = 10 * eps * tnorm;
    const Scalar ortol = Scalar(1e-3) * tnorm;
    const Scalar tiny = eps * tnorm;

    Mat<Scalar> W(n, k);
    Scalar prev_shift = 0;
    Index cluster_start = 0;
    for (Index j = 0; j < k; ++j) {
        Scalar shift = mu(j);
        if (j > 0) {
            if (mu(j - 1) - mu(j) > ortol) cluster_start = j;
            if (shift >= prev_shift - sep) shift = prev_shift - sep;
        }
        prev_shift = shift;
        const TridiagonalLu<Scalar> lu(diag, sub, shift, tiny);

        // Deterministic, non-degenerate start vector.
        Vec<Scalar> x(n);
        std::uint64_t state = 0x2545F4914F6CDD1DULL + static_cast<std::uint64_t>(j);
        for (Index i = 0; i < n; ++i) {
            state = state * 6364136223846793005ULL + 1442695040888963407ULL;
            x(i) = Scalar(0.5) + static_cast<Scalar>(state >> 11) * Scalar(0x1.0p-53);
        }
        x.normalize();

        for (int it = 0; it < 8; ++it) {
            lu.solve_in_place(x);
            for (Index c = cluster_start; c < j; ++c) x -= W.col(c).dot(x) * W.col(c);
            x.normalize();
            if (it >= 2) {
                Vec<Scalar> r = (diag.array() - mu(j)).matrix().cwiseProduct(x);
                if (n > 1) {
                    r.head(n - 1) += sub.cwiseProduct(x.tail(n - 1));
                    r.tail(n - 1) += sub.cwiseProduct(x.head(n - 1));
                }
                if (r.norm() <= 8 * eps * tnorm * std::sqrt(Scalar(n))) break;
            }
        }
        W.col(j) = x;
    }
    return W;
}

} // namespace detail

/// Full eigendecomposition of a symmetric matrix (lower triangle is read).
/// Values are descending; ties keep the solver's order. Each eigenvector has
/// its largest-magnitude entry positive (lowest index on ties).
template <class Derived>
EigenDecomposition<typename Derived::Scalar> sym_eig(const Eigen::MatrixBase<Derived>& A)
{
    using Scalar = typename Derived::Scalar;
    detail::require_square(A, "sym_eig");
    detail::require_finite(A, "sym_eig");
    const Index p = A.rows();
    EigenDecomposition<Scalar> out;
    if (p == 0) return out;

    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> solver(A.derived());
    if (solver.info() != Eigen::Success) throw NumericalError("sym_eig: eigensolver did not converge");

    std::vector<Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Index{0});
    const auto& ev = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return ev(a) > ev(b); });

    out.values.resize(p);
    out.vectors.resize(p, p);
    for (Index j = 0; j < p; ++j) {
        const Index src = order[static_cast<std::size_t>(j)];
        out.values(j) = ev(src);
        out.vectors.col(j) = solver.eigenvectors().col(src);
        detail::canonical_sign(out.vectors.col(j));
    }
    return out;
}

/// Unit eigenvector of the largest eigenvalue, same convention as sym_eig.
/// Rows/columns that are identically zero are dropped first when the
/// remaining block has a positive top eigenvalue (exact reduction; the
/// solver output for sparse P-hat goes through here).
template <class Derived>
Vec<typename Derived::Scalar> leading_eigenvector(const Eigen::MatrixBase<Derived>& A)
{
    using Scalar = typename Derived::Scalar;
    detail::require_square(A, "leading_eigenvector");
    detail::require_finite(A, "leading_eigenvector");
    const Index p = A.rows();
    if (p == 0) throw std::invalid_argument("leading_eigenvector: empty matrix");

    IndexSet active;
    for (Index i = 0; i < p; ++i) {
        if ((A.row(i).array() != Scalar(0)).any() || (A.col(i).array() != Scalar(0)).any()) active.push_back(i);
    }
    const auto na = static_cast<Index>(active.size());
    if (na > 0 && na < p) {
        Mat<Scalar> sub(na, na);
        for (Index a = 0; a < na; ++a)
            for (Index b = 0; b < na; ++b) sub(a, b) = A(active[static_cast<std::size_t>(a)], active[static_cast<std::size_t>(b)]);
        auto dec = sym_eig(sub);
        if (dec.values(0) > 0) {
            Vec<Scalar> u = Vec<Scalar>::Zero(p);
            for (Index a = 0; a < na; ++a) u(active[static_cast<std::size_t>(a)]) = dec.vectors(a, 0);
            return u;
        }
    }
    return sym_eig(A).vectors.col(0);
}

/// Euclidean projection onto {g : 0 <= g_i <= 1, sum g = 1}. For trace one
/// the upper cap can only bind at a vertex, so this is the sort-based
/// probability-simplex projection.
template <class Derived>
Vec<typename Derived::Scalar> capped_simplex_projection(const Eigen::MatrixBase<Derived>& v)
{
    using Scalar = typename Derived::Scalar;
    detail::require_finite(v, "capped_simplex_projection");
    const Index p = v.size();
    if (p == 0) throw std::invalid_argument("capped_simplex_projection: empty vector");

    Vec<Scalar> u = v;
    std::sort(u.data(), u.data() + p, std::greater<Scalar>());
    Scalar cumsum = 0;
    Scalar tau = u(0) - 1;
    for (Index j = 0; j < p; ++j) {
        cumsum += u(j);
        const Scalar t = (cumsum - 1) / static_cast<Scalar>(j + 1);
        if (u(j) - t > 0) tau = t;
    }
    return (v.array() - tau).cwiseMax(Scalar(0)).cwiseMin(Scalar(1)).matrix();
}

/// Indices whose diagonal entry exceeds tol in magnitude.
template <class Derived>
IndexSet diagonal_support(const Eigen::MatrixBase<Derived>& P, typename Derived::Scalar tol)
{
    IndexSet s;
    for (Index i = 0; i < P.rows(); ++i)
        if (std::abs(P(i, i)) > tol) s.push_back(i);
    return s;
}

/// Frobenius-nearest point of the 1-Fantope: eigendecompose, project the
/// eigenvalues onto the capped simplex, reassemble.
///
/// Only eigenpairs with positive projected weight enter the result, so for
/// p > 32 the eigenvalues come from a tridiagonal reduction and just those
/// eigenvectors are computed (inverse iteration + back-transformation). If
/// that route would need many vectors or fails its residual check, the full
/// decomposition is used instead.
template <class Derived>
FantopeCandidate<typename Derived::Scalar> fantope1_projection(const Eigen::MatrixBase<Derived>& A,
                                                               typename Derived::Scalar supp_tol = 1e-8)
{
    using Scalar = typename Derived::Scalar;
    detail::require_square(A, "fantope1_projection");
    detail::require_finite(A, "fantope1_projection");
    const Index p = A.rows();
    if (p == 0) throw std::invalid_argument("fantope1_projection: empty matrix");

    auto assemble = [&](const Mat<Scalar>& V, const Vec<Scalar>& w) {
        FantopeCandidate<Scalar> out;
        out.P.noalias() = (V * w.asDiagonal()) * V.transpose();
        out.P = Scalar(0.5) * (out.P + out.P.transpose()).eval();
        out.support = diagonal_support(out.P, supp_tol);
        return out;
    };
    auto full_route = [&]() {
        const auto dec = sym_eig(A);
        const Vec<Scalar> w = capped_simplex_projection(dec.values);
        Index k = 0;
        while (k < p && w(k) > 0) ++k;
        return assemble(dec.vectors.leftCols(k), w.head(k));
    };

    if (p <= 32) return full_route();

    Mat<Scalar> As = A;
    Eigen::Tridiagonalization<Mat<Scalar>> tri(As);
    const Vec<Scalar> diag = tri.diagonal();
    const Vec<Scalar> sub = tri.subDiagonal();
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> tsolver;
    tsolver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (tsolver.info() != Eigen::Success) return full_route();

    const Vec<Scalar> values = tsolver.eigenvalues().reverse();
    const Vec<Scalar> w = capped_simplex_projection(values);
    Index k = 0;
    while (k < p && w(k) > 0) ++k;
    if (k == 0) return full_route();

    const Mat<Scalar> W = detail::tridiagonal_inverse_iteration<Scalar>(diag, sub, values.head(k));
    Mat<Scalar> V = tri.matrixQ() * W;

    const Scalar anorm = As.norm();
    const Mat<Scalar> resid = As.template selfadjointView<Eigen::Lower>() * V - V * values.head(k).asDiagonal();
    const Mat<Scalar> gram = V.transpose() * V - Mat<Scalar>::Identity(k, k);
    constexpr Scalar tol = 1e-11;
    if (resid.norm() > tol * (1 + anorm) || gram.norm() > tol) return full_route();

    return assemble(V, w.head(k));
}

/// Entrywise sign(a) * max(|a| - t, 0).
template <class Derived>
Mat<typename Derived::Scalar> soft_threshold(const Eigen::MatrixBase<Derived>& A, typename Derived::Scalar t)
{
    using Scalar = typename Derived::Scalar;
    if (!(t >= 0)) throw std::invalid_argument("soft_threshold: threshold must be >= 0");
    return A.unaryExpr([t](Scalar a) {
        const Scalar m = std::abs(a) - t;
        return m > 0 ? std::copysign(m, a) : Scalar(0);
    });
}

} // namespace sparseclust

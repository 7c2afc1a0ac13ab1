#pragma once

#include "nsbm/core.hpp"

namespace nsbm {

/// Rank-K factorization M ~ U diag(D) V^T.
///
/// Sign convention: in every column of V the entry of largest magnitude is
/// non-negative (first such index on ties); the matching column of U is
/// flipped along with it.
struct SvdFactors {
    Matrix U;
    Vector D;
    Matrix V;

    Index rank() const noexcept { return D.size(); }
    Matrix reconstruct() const { return U * D.asDiagonal() * V.transpose(); }
};

struct SubspaceOptions {
    /// Extra basis vectors carried beyond K.
    Index oversample = 20;
    Index max_iter = 3000;
    /// Convergence when every residual ||M^T u_k - s_k v_k|| <= tol * s_1.
    double tol = 1e-12;
    std::uint64_t seed = 0x5eed;
};

enum class SvdPath { automatic, dense, iterative };

/// Best rank-K factorization of `M` (K <= min(rows, cols)).
///
/// `automatic` uses block subspace iteration on a sparse copy when fewer than
/// 10% of entries are nonzero, and a dense bidiagonal divide-and-conquer SVD
/// otherwise. The iterative path falls back to the dense one if it does not
/// converge. When K exceeds the rank, trailing singular values are zero and
/// their vectors are a deterministic orthonormal completion.
SvdFactors truncated_svd(const Matrix& M, Index K, SvdPath path = SvdPath::automatic);

/// Dense reference path.
SvdFactors truncated_svd_dense(const Matrix& M, Index K);

/// Block subspace iteration with Rayleigh-Ritz extraction. Returns false in
/// `converged` when max_iter was reached.
SvdFactors truncated_svd_iterative(const SparseMatrix& M, Index K, const SubspaceOptions& opts = {},
                                   bool* converged = nullptr);

/// Applies the sign convention in place.
void normalize_signs(SvdFactors& f);

}  // namespace nsbm

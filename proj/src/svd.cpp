#include "nsbm/svd.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "nsbm/rng.hpp"

namespace nsbm {

namespace {

void check_rank(const Matrix& M, Index K) {
    if (K < 1) throw DomainError("SVD rank must be at least 1");
    if (K > std::min(M.rows(), M.cols())) throw DomainError("SVD rank exceeds matrix dimensions");
}

Matrix orthonormal_basis(const Matrix& X) {
    Eigen::HouseholderQR<Matrix> qr(X);
    return qr.householderQ() * Matrix::Identity(X.rows(), X.cols());
}

}  // namespace

void normalize_signs(SvdFactors& f) {
    for (Index k = 0; k < f.V.cols(); ++k) {
        Index arg = 0;
        double best = -1.0;
        for (Index i = 0; i < f.V.rows(); ++i) {
            const double a = std::abs(f.V(i, k));
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (f.V(arg, k) < 0.0) {
            f.V.col(k) *= -1.0;
            f.U.col(k) *= -1.0;
        }
    }
}

SvdFactors truncated_svd_dense(const Matrix& M, Index K) {
    check_rank(M, K);
    Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SvdFactors f{svd.matrixU().leftCols(K), svd.singularValues().head(K), svd.matrixV().leftCols(K)};
    normalize_signs(f);
    return f;
}

SvdFactors truncated_svd_iterative(const SparseMatrix& M, Index K, const SubspaceOptions& opts, bool* converged) {
    const Index rows = M.rows();
    const Index cols = M.cols();
    if (K < 1) throw DomainError("SVD rank must be at least 1");
    if (K > std::min(rows, cols)) throw DomainError("SVD rank exceeds matrix dimensions");
    const Index b = std::min(std::min(rows, cols), K + std::max<Index>(opts.oversample, 0));

    SplitMix64 rng(stream_key(opts.seed, Stream::svd_start, static_cast<std::uint64_t>(cols)));
    Matrix start(cols, b);
    for (Index j = 0; j < b; ++j)
        for (Index i = 0; i < cols; ++i) start(i, j) = 2.0 * rng.uniform() - 1.0;
    Matrix Q = orthonormal_basis(start);

    const SparseMatrix Mt = M.transpose();
    SvdFactors f;
    bool done = false;
    for (Index it = 0; it < opts.max_iter; ++it) {
        // Rayleigh-Ritz on span(Q): W = M Q = Qw R, R = Ur S Vr^T.
        const Matrix W = M * Q;
        Eigen::HouseholderQR<Matrix> qr(W);
        const Matrix Qw = qr.householderQ() * Matrix::Identity(rows, b);
        const Matrix R = Qw.transpose() * W;
        Eigen::JacobiSVD<Matrix> small(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
        f.U = Qw * small.matrixU().leftCols(K);
        f.D = small.singularValues().head(K);
        f.V = Q * small.matrixV().leftCols(K);

        const Matrix MtQw = Mt * Qw;
        const double s1 = f.D(0);
        const double scale = s1 > 0.0 ? s1 : 1.0;
        const Matrix residual = MtQw * small.matrixU().leftCols(K) - f.V * f.D.asDiagonal();
        const double worst = residual.colwise().norm().maxCoeff();
        if (worst <= opts.tol * scale || s1 == 0.0) {
            done = true;
            break;
        }
        Q = orthonormal_basis(MtQw);
    }
    if (converged) *converged = done;
    normalize_signs(f);
    return f;
}

SvdFactors truncated_svd(const Matrix& M, Index K, SvdPath path) {
    check_rank(M, K);
    if (path == SvdPath::automatic) {
        const double nnz = static_cast<double>((M.array() != 0.0).count());
        const double density = M.size() ? nnz / static_cast<double>(M.size()) : 0.0;
        path = (density < 0.10 && std::min(M.rows(), M.cols()) > 2 * K + 40) ? SvdPath::iterative : SvdPath::dense;
    }
    if (path == SvdPath::dense) return truncated_svd_dense(M, K);
    bool converged = false;
    SvdFactors f = truncated_svd_iterative(M.sparseView(), K, {}, &converged);
    if (!converged) return truncated_svd_dense(M, K);
    return f;
}

}  // namespace nsbm

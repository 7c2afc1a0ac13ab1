#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "../common/random_params.hpp"
#include "nsbm/generate.hpp"
#include "nsbm/kmeans.hpp"
#include "nsbm/metrics.hpp"
#include "nsbm/spectral.hpp"
#include "nsbm/svd.hpp"

using namespace nsbm;

namespace {

Matrix random_matrix(Index r, Index c, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Matrix m(r, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i) m(i, j) = rng.uniform() - 0.5;
    return m;
}

double orthonormality_error(const Matrix& Q) {
    return (Q.transpose() * Q - Matrix::Identity(Q.cols(), Q.cols())).norm();
}

bool same_partition(const LabelVector& a, const LabelVector& b) { return misclustering(a, b).rate == 0.0; }

}  // namespace

TEST_SUITE("svd") {

TEST_CASE("exact low rank reconstruction") {
    const Matrix M = random_matrix(30, 4, 1) * random_matrix(4, 25, 2);
    const auto f = truncated_svd(M, 4);
    CHECK((f.reconstruct() - M).norm() < 1e-10);
    CHECK(orthonormality_error(f.U) < 1e-8);
    CHECK(orthonormality_error(f.V) < 1e-8);
    for (Index k = 1; k < f.rank(); ++k) CHECK(f.D(k - 1) >= f.D(k));
}

TEST_CASE("identity has unit singular values") {
    const auto f = truncated_svd(Matrix::Identity(3, 3), 3);
    CHECK((f.D.array() - 1.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("top singular values match a full decomposition") {
    const Matrix M = random_matrix(20, 20, 7);
    Eigen::JacobiSVD<Matrix> full(M);
    const auto f = truncated_svd(M, 5);
    CHECK((f.D - full.singularValues().head(5)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("sign convention") {
    const auto f = truncated_svd(random_matrix(15, 12, 3), 4);
    for (Index k = 0; k < f.V.cols(); ++k) {
        Index arg = 0;
        f.V.col(k).cwiseAbs().maxCoeff(&arg);
        CHECK(f.V(arg, k) >= 0.0);
    }
    const auto g = truncated_svd(-random_matrix(15, 12, 3), 4);
    CHECK((g.V - f.V).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("rank deficiency keeps zero singular values") {
    const Matrix M = random_matrix(10, 2, 4) * random_matrix(2, 10, 5);
    const auto f = truncated_svd(M, 4);
    CHECK(f.rank() == 4);
    CHECK(f.D(2) < 1e-12);
    CHECK(orthonormality_error(f.V) < 1e-8);
    CHECK(orthonormality_error(f.U) < 1e-8);
    const auto again = truncated_svd(M, 4);
    CHECK(again.V == f.V);
    CHECK_THROWS(truncated_svd(M, 11));
}

TEST_CASE("sparse iterative path agrees with the dense path") {
    SimDesign d;
    d.n = 500;
    d.K = 3;
    d.target_avg_degree = 20;
    const auto p = make_sim_params(d, 2);
    const auto A = sample_nsbm(p, 3);
    REQUIRE(A.density() < 0.1);
    const auto dense = truncated_svd_dense(A.weights(), 3);
    bool converged = false;
    const auto sparse = truncated_svd_iterative(A.to_sparse(), 3, {}, &converged);
    CHECK(converged);
    CHECK((dense.D - sparse.D).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((dense.V - sparse.V).cwiseAbs().maxCoeff() < 1e-6);
    const auto automatic = truncated_svd(A.weights(), 3);
    CHECK((dense.D - automatic.D).cwiseAbs().maxCoeff() < 1e-8);
}

}

TEST_SUITE("kmeans") {

TEST_CASE("separated blobs") {
    Matrix pts(60, 2);
    SplitMix64 rng(3);
    for (Index i = 0; i < 60; ++i) {
        const double cx = (i % 3) * 10.0;
        pts(i, 0) = cx + rng.uniform() - 0.5;
        pts(i, 1) = rng.uniform() - 0.5;
    }
    const auto r = kmeans(pts, 3);
    std::vector<int> truth(60);
    for (int i = 0; i < 60; ++i) truth[static_cast<std::size_t>(i)] = i % 3;
    CHECK(same_partition(r.labels, LabelVector(truth, 3)));
    CHECK(r.labels == r.labels.canonical());
    CHECK(r.objective == doctest::Approx(kmeans_objective(pts, r.labels)));
}

TEST_CASE("objective history never increases") {
    const Matrix pts = random_matrix(200, 3, 9);
    KMeansConfig cfg;
    cfg.restarts = 5;
    const auto r = kmeans(pts, 6, cfg);
    REQUIRE(r.history.size() >= 2);
    for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1] * (1 + 1e-12));
    // More restarts can only help.
    cfg.restarts = 1;
    CHECK(kmeans(pts, 6, cfg).objective >= r.objective * (1 - 1e-12));
}

TEST_CASE("deterministic and degenerate inputs") {
    const Matrix pts = random_matrix(50, 2, 10);
    CHECK(kmeans(pts, 4).labels == kmeans(pts, 4).labels);
    const auto one = kmeans(pts, 1);
    CHECK(std::all_of(one.labels.values().begin(), one.labels.values().end(), [](int c) { return c == 0; }));
    Matrix dup(6, 2);
    dup << 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1;
    CHECK_THROWS_AS(kmeans(dup, 3), NumericalError);
}

}

TEST_SUITE("spectral") {

TEST_CASE("exact population input is clustered perfectly") {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto p = nsbm::testing::random_params(300, 3, s);
        const Matrix P = expected_matrix(p, Diagonal::keep);
        CHECK(misclustering(right_sc(P, 3), p.labels).rate == 0.0);
        CHECK(misclustering(right_smst(P, 3), p.labels).rate == 0.0);
    }
}

TEST_CASE("single community and singleton communities") {
    const auto p = nsbm::testing::random_params(40, 2, 1);
    const auto sc = right_sc(expected_matrix(p), 1);
    CHECK(sc.K() == 1);
    CHECK(std::all_of(sc.values().begin(), sc.values().end(), [](int c) { return c == 0; }));

    NsbmParams q;
    q.labels = LabelVector({0, 1, 2, 3}, 4);
    q.B.resize(4, 4);
    q.B << 1, 0.2, 0.4, 0.1, 0.3, 1, 0.5, 0.2, 0.6, 0.1, 1, 0.3, 0.2, 0.7, 0.4, 1;
    q.theta = Vector::Constant(4, 0.5);
    q.lambda = Vector::Ones(4);
    const auto smst = right_smst(expected_matrix(q, Diagonal::keep), 4);
    CHECK(smst.sizes() == std::vector<Index>{1, 1, 1, 1});
}

TEST_CASE("distinct rows follow the community geometry") {
    const auto p = nsbm::testing::random_params(120, 3, 12);
    const auto diag = theory_diagnostics(expected_matrix(p, Diagonal::keep), 3, &p.labels);
    REQUIRE(diag.geometry_error);
    CHECK(*diag.geometry_error < 1e-8);
    CHECK(*diag.within_spread < 1e-8);
    CHECK_FALSE(diag.rank_deficient);
    CHECK(std::isfinite(diag.misclustering_bound));
}

TEST_CASE("rank-deficient diagnostics") {
    const auto p = nsbm::testing::random_params(30, 2, 1);
    const auto diag = theory_diagnostics(expected_matrix(p, Diagonal::keep), 4);
    CHECK(diag.rank_deficient);
    CHECK(std::isinf(diag.misclustering_bound));
}

TEST_CASE("mst cut ties resolve deterministically") {
    Matrix pts(6, 1);
    pts << 0, 0, 1, 1, 2, 2;
    const auto l = mst_cut_clusters(pts, 3);
    CHECK(l.values() == std::vector<int>{0, 0, 1, 1, 2, 2});
    CHECK(mst_cut_clusters(pts, 3) == l);
}

TEST_CASE("invariance to node order and scale") {
    SimDesign d;
    d.n = 300;
    d.t = 0.5;
    const auto p = make_sim_params(d, 4);
    const Matrix A = sample_nsbm(p, 5).weights();
    std::vector<Index> perm(300);
    std::iota(perm.begin(), perm.end(), Index{0});
    SplitMix64 rng(6);
    std::shuffle(perm.begin(), perm.end(), rng);
    const Matrix Ap = A(perm, perm);
    const auto base = right_sc(A, 3);
    const auto permuted = right_sc(Ap, 3);
    std::vector<int> back(300);
    for (Index i = 0; i < 300; ++i) back[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = permuted[i];
    CHECK(same_partition(LabelVector(back, 3), base));
    CHECK(same_partition(right_sc(Matrix(3.5 * A), 3), base));

    const auto smst = right_smst(A, 3);
    const auto smst_p = right_smst(Ap, 3);
    for (Index i = 0; i < 300; ++i) back[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = smst_p[i];
    CHECK(same_partition(LabelVector(back, smst_p.K()), smst));
}

TEST_CASE("symmetric graphs reduce to classical spectral clustering") {
    const auto labels = nsbm::testing::balanced_labels(90, 3, 2);
    Matrix B = Matrix::Constant(3, 3, 0.05);
    B.diagonal().setConstant(0.5);
    Matrix A = sample_directed_sbm(B, labels, 3).weights();
    A = A.cwiseMax(A.transpose()).eval();
    CHECK(symmetrize(A) == A);

    Eigen::SelfAdjointEigenSolver<Matrix> eig(A);
    std::vector<Index> idx(90);
    std::iota(idx.begin(), idx.end(), Index{0});
    std::sort(idx.begin(), idx.end(), [&](Index a, Index b) {
        return std::abs(eig.eigenvalues()(a)) > std::abs(eig.eigenvalues()(b));
    });
    Matrix emb(90, 3);
    for (int k = 0; k < 3; ++k) emb.col(k) = eig.eigenvectors().col(idx[static_cast<std::size_t>(k)]);
    CHECK(same_partition(baseline_cluster(A, 3, ClusterMethod::symmetric_sc), kmeans(emb, 3).labels));
}

TEST_CASE("plain sbm is recovered by every method") {
    SimDesign d;
    d.n = 600;
    d.t = 0.0;
    d.beta = 0.1;
    d.theta_low_factor = 1.0;
    const auto p = make_sim_params(d, 8);
    const auto A = sample_nsbm(p, 9);
    for (auto m : {ClusterMethod::right_sc, ClusterMethod::right_smst, ClusterMethod::left_sc, ClusterMethod::left_ssc,
                   ClusterMethod::symmetric_sc, ClusterMethod::symmetric_ssc})
        CHECK_MESSAGE(misclustering(cluster(A.weights(), 3, m), p.labels).rate < 0.01, to_string(m));
}

TEST_CASE("row normalization") {
    Matrix X(3, 2);
    X << 3, 4, 0, 0, -1, 0;
    const Matrix N = normalize_rows(X);
    CHECK(N(0, 0) == doctest::Approx(0.6));
    CHECK(N.row(1).isZero());
    CHECK(N(2, 0) == -1.0);
}

TEST_CASE("method names") {
    for (auto m : {ClusterMethod::right_sc, ClusterMethod::right_smst, ClusterMethod::left_sc, ClusterMethod::left_ssc,
                   ClusterMethod::symmetric_sc, ClusterMethod::symmetric_ssc})
        CHECK(parse_cluster_method(to_string(m)) == m);
    CHECK_THROWS_AS(parse_cluster_method("bogus"), DomainError);
}

}

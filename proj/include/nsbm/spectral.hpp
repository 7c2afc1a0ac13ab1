#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "nsbm/core.hpp"
#include "nsbm/kmeans.hpp"
#include "nsbm/svd.hpp"

namespace nsbm {

enum class ClusterMethod {
    right_sc,
    right_smst,
    left_sc,
    left_ssc,
    symmetric_sc,
    symmetric_ssc,
};

std::string_view to_string(ClusterMethod m);
/// Throws DomainError for unknown names.
ClusterMethod parse_cluster_method(std::string_view name);

enum class Symmetrization {
    max,  ///< element-wise maximum; logical OR on binary graphs
    sum,
};

/// Rows of the rank-K right singular matrix V of `M`.
Matrix right_embedding(const Matrix& M, int K);

/// K-means on the rows of the rank-K right singular vectors.
LabelVector right_sc(const Matrix& M, int K, const KMeansConfig& cfg = {});
LabelVector right_sc(const DirectedGraph& A, int K, const KMeansConfig& cfg = {});

/// Minimum spanning tree over the embedded rows of V with the K-1 heaviest
/// tree edges removed; the remaining components are the clusters.
LabelVector right_smst(const Matrix& M, int K);
LabelVector right_smst(const DirectedGraph& A, int K);

/// MST cut clustering of arbitrary points (rows). Distance ties resolve
/// toward lower node indices.
LabelVector mst_cut_clusters(const Matrix& points, int K);

/// Element-wise symmetrization A_sym(i, j) = op(A(i, j), A(j, i)).
Matrix symmetrize(const Matrix& A, Symmetrization rule = Symmetrization::max);

/// Scales every nonzero row to unit norm; zero rows stay at the origin.
Matrix normalize_rows(const Matrix& X);

/// Left/symmetric baselines. The symmetric variants embed with the top-K
/// eigenvectors (by magnitude) of the symmetrized adjacency.
LabelVector baseline_cluster(const Matrix& M, int K, ClusterMethod method, const KMeansConfig& cfg = {},
                             Symmetrization rule = Symmetrization::max);

/// Dispatches any ClusterMethod.
LabelVector cluster(const Matrix& M, int K, ClusterMethod method, const KMeansConfig& cfg = {},
                    Symmetrization rule = Symmetrization::max);

struct DiagnosticsReport {
    double sigma_K = 0.0;
    double max_entry = 0.0;
    /// K n max_entry / sigma_K^2; infinite when sigma_K vanishes.
    double misclustering_bound = std::numeric_limits<double>::infinity();
    bool rank_deficient = false;
    double left_incoherence = 0.0;   // sqrt(n) max_i ||U_i.||
    double right_incoherence = 0.0;  // sqrt(n) max_i ||V_i.||
    /// Present when labels were supplied: largest deviation between observed
    /// distances of community rows of V and sqrt(1/n_k + 1/n_l), and the
    /// largest within-community row spread.
    std::optional<double> geometry_error;
    std::optional<double> within_spread;
};

DiagnosticsReport theory_diagnostics(const Matrix& P, int K, const LabelVector* labels = nullptr);

}  // namespace nsbm

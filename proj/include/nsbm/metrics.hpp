#pragma once

#include <vector>

#include "nsbm/core.hpp"

namespace nsbm {

struct Misclustering {
    /// Fraction of nodes whose label disagrees with the truth under the best
    /// relabeling of the prediction.
    double rate = 0.0;
    /// sum_k |G_k \ Ghat_k| / n_k over the true communities.
    double per_community = 0.0;
    /// permutation[p] = true community matched to predicted cluster p.
    std::vector<int> permutation;

    double accuracy() const noexcept { return 1.0 - rate; }
};

/// Confusion counts C(p, t) = #{i : pred_i = p, truth_i = t}, padded to a
/// square max(K_pred, K_truth) matrix.
Eigen::MatrixXi confusion_matrix(const LabelVector& pred, const LabelVector& truth);

/// Optimal one-to-one relabeling maximizing the matched count. Exhaustive
/// search over all K! permutations for K <= 8, Hungarian assignment above.
Misclustering misclustering(const LabelVector& pred, const LabelVector& truth);

/// Assignment maximizing sum_p weights(p, perm[p]) over permutations of a
/// square matrix (Hungarian method, O(K^3)).
std::vector<int> max_weight_assignment(const Matrix& weights);

/// ||P_tilde - P_hat||_F^2 / ||P_tilde||_F^2 over off-diagonal entries.
/// Throws DomainError when P_tilde vanishes off the diagonal.
double relative_frobenius(const Matrix& P_hat, const Matrix& P_tilde);

}  // namespace nsbm

#pragma once

#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nsbm/core.hpp"
#include "nsbm/kmeans.hpp"

namespace nsbm {

/// Block moments of an observed graph under fixed labels:
/// T(i, l) = sum_{j in G_l} A(i, j) / n_l and Y(i, l) = log(max(T(i, l), 1/n_l)).
struct MomentTable {
    Matrix T;
    Matrix Y;
    LabelVector labels;
};

MomentTable block_moments(const Matrix& A, const LabelVector& labels);
/// Builds Y from a caller-supplied T (e.g. exact population block values).
MomentTable moments_from_block_means(Matrix T, const LabelVector& labels);

enum class PsiRule {
    /// l belongs to Psi_k only if T(i, l) > 0 for every i in G_k.
    strict,
    /// l belongs to Psi_k when at least `relaxed_fraction` of the rows of G_k
    /// have T(i, l) > 0; the remaining rows are floored through Y.
    relaxed,
    /// l belongs to Psi_k when the block G_k -> G_l carries any weight at all;
    /// rows with T(i, l) = 0 are floored through Y.
    nonzero_block,
};

struct EstimateOptions {
    PsiRule psi_rule = PsiRule::strict;
    double relaxed_fraction = 0.95;
};

/// Method-of-moments fit of the nomination block model.
struct NsbmEstimate {
    LabelVector labels;
    Vector theta;
    Vector lambda;
    Matrix B;
    /// Psi_k as sorted 0-based community indices.
    std::vector<std::vector<int>> psi;
    /// Communities for which lambda (and the off-diagonal of B) could not be
    /// estimated: no usable off-diagonal block, or a zero lambda normalizer.
    std::vector<int> failed;

    bool ok() const noexcept { return failed.empty(); }
    bool failed_community(int k) const;
};

NsbmEstimate estimate_nsbm(const Matrix& A, const LabelVector& labels, const EstimateOptions& opts = {});
NsbmEstimate estimate_nsbm(const DirectedGraph& A, const LabelVector& labels, const EstimateOptions& opts = {});
NsbmEstimate estimate_from_moments(const MomentTable& moments, const EstimateOptions& opts = {});

struct Reconstruction {
    Matrix P;
    /// Entries set to 0 because B_hat = 0 met a negative lambda_hat.
    Index undefined_entries = 0;
};

/// P_hat(i, j) = theta_i * B_hat(c_i, c_j)^lambda_i with a zero diagonal.
/// Throws NumericalError when the estimate carries failed communities.
Reconstruction reconstruct_p(const NsbmEstimate& est);

/// Views an estimate as model parameters (for connection strengths and
/// sampling).
NsbmParams as_params(const NsbmEstimate& est);

enum class BaselineModel { dsbm, dcsbm, scbm };

std::string_view to_string(BaselineModel m);
BaselineModel parse_baseline_model(std::string_view name);

/// Block-model plug-in estimates of the edge-mean matrix, all excluding
/// self-pairs.
///   dsbm  - labels from symmetric_sc, P_hat = directed block means.
///   dcsbm - same labels, P_hat(i, j) = d_i^out d_j^in m_kl / S_kl where
///           m_kl is the block mass and S_kl = sum over off-diagonal pairs of
///           the block of d_i^out d_j^in.
///   scbm  - row clusters from left_ssc, column clusters from right_sc, the
///           same degree-corrected plug-in over the row x column blocks.
Matrix estimate_baseline(const Matrix& A, int K, BaselineModel model, const KMeansConfig& cfg = {});

/// Directed block means with supplied labels (dsbm plug-in).
Matrix block_mean_estimate(const Matrix& A, const LabelVector& labels);
/// Degree-corrected plug-in with separate sender and receiver partitions.
Matrix degree_corrected_estimate(const Matrix& A, const LabelVector& rows, const LabelVector& cols);

/// M(k, l) = mean over i in G_k of theta_i * B(k, l)^lambda_i: the expected
/// average edge weight from G_k to G_l. NaN rows for communities whose
/// lambda is undefined (NaN). Throws DomainError on an empty community.
Matrix connection_strength(const NsbmParams& params);
Matrix connection_strength(const NsbmEstimate& est);

void to_json(nlohmann::json& j, const NsbmEstimate& est);

}  // namespace nsbm

#pragma once

#include <cstdint>

#include <nlohmann/json_fwd.hpp>

#include "nsbm/core.hpp"

namespace nsbm {

/// Simulation design: n nodes assigned uniformly to K communities, B with
/// unit diagonal and `beta` off the diagonal, log(lambda_i) ~ U(-t, t) rescaled
/// to unit community means, and theta_i in {c, theta_low_factor * c} with the
/// scale c calibrated to the degree (binary) or row-sum (weighted) target.
struct SimDesign {
    Index n = 600;
    int K = 3;
    double beta = 0.2;
    double t = 1.5;
    double theta_low_factor = 0.05;
    double target_avg_degree = 50.0;
    double target_avg_rowsum = 250.0;
    bool weighted = false;
    std::uint64_t seed = 1;

    double target() const noexcept { return weighted ? target_avg_rowsum : target_avg_degree; }
};

/// Throws DomainError for designs that cannot be sampled.
void validate(const SimDesign& design);

void to_json(nlohmann::json& j, const SimDesign& d);
/// Missing fields keep their defaults; unknown fields are rejected.
void from_json(const nlohmann::json& j, SimDesign& d);

/// Parameter files hold `B` (K x K), community membership as either
/// `labels` (1-based, one per node) or `sizes` (contiguous blocks), and
/// `theta`/`lambda` given per node or per community. `rho` is optional.
void to_json(nlohmann::json& j, const NsbmParams& p);
void from_json(const nlohmann::json& j, NsbmParams& p);

/// A_ij ~ Bernoulli(B(c_i, c_j)) independently, zero diagonal.
DirectedGraph sample_directed_sbm(const Matrix& B, const LabelVector& labels, std::uint64_t seed);

/// Observed graph A o R with R_ij ~ Bernoulli(f_i(B(c_i, c_j))).
DirectedGraph sample_nominated(const DirectedGraph& A, const Matrix& B, const LabelVector& labels,
                               const NominationFunctionSet& fns, std::uint64_t seed);

/// Bernoulli draws from expected_matrix(params). Throws DomainError when any
/// probability exceeds 1.
DirectedGraph sample_nsbm(const NsbmParams& params, std::uint64_t seed);

/// Poisson draws with mean theta_i * B(c_i, c_j)^lambda_i.
DirectedGraph sample_nsbm_poisson(const NsbmParams& params, std::uint64_t seed);

/// Samples parameters for `design`. The returned `rho` holds the calibrated
/// scale c. Throws DomainError when calibration would push a Bernoulli
/// probability above 1.
NsbmParams make_sim_params(const SimDesign& design, std::uint64_t seed);

/// Draws a graph from `params` with the design's edge law (Poisson when
/// weighted, Bernoulli otherwise).
DirectedGraph sample_design(const SimDesign& design, const NsbmParams& params, std::uint64_t seed);

}  // namespace nsbm

#pragma once

#include <cstdint>
#include <vector>

#include "nsbm/core.hpp"

namespace nsbm {

struct KMeansConfig {
    int restarts = 20;
    int max_iter = 300;
    /// Stop once the relative decrease of the objective falls below tol.
    double tol = 1e-9;
    std::uint64_t seed = 1;
};

struct KMeansResult {
    LabelVector labels;
    Matrix centers;
    double objective = 0.0;
    int iterations = 0;
    /// Objective after seeding and after every Lloyd iteration of the winning
    /// restart.
    std::vector<double> history;
};

/// K-means++ seeding followed by Lloyd iterations, repeated `restarts` times;
/// the restart with the smallest within-cluster sum of squares wins (earliest
/// restart on ties). Labels are returned in canonical order.
///
/// Throws NumericalError when every restart ends with an empty cluster, which
/// happens when the rows contain fewer than K distinct points.
KMeansResult kmeans(const Matrix& points, int K, const KMeansConfig& cfg = {});

/// Within-cluster sum of squared distances for a fixed assignment.
double kmeans_objective(const Matrix& points, const LabelVector& labels);

}  // namespace nsbm

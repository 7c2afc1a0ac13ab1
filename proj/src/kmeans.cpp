#include "nsbm/kmeans.hpp"

#include <cmath>
#include <limits>

#include "nsbm/rng.hpp"

namespace nsbm {

namespace {

struct Run {
    std::vector<int> assign;
    Matrix centers;
    double objective = std::numeric_limits<double>::infinity();
    int iterations = 0;
    std::vector<double> history;
    bool has_empty = false;
};

Matrix plus_plus_seeds(const Matrix& X, int K, SplitMix64& rng) {
    const Index n = X.rows();
    Matrix centers(K, X.cols());
    const auto first = std::min<Index>(n - 1, static_cast<Index>(rng.uniform() * static_cast<double>(n)));
    centers.row(0) = X.row(first);
    Vector d2 = (X.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < K; ++c) {
        const double total = d2.sum();
        Index pick = n - 1;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            for (Index i = 0; i < n; ++i) {
                acc += d2(i);
                if (acc > target && d2(i) > 0.0) {
                    pick = i;
                    break;
                }
            }
            // Rounding can leave the walk short; take the last positive weight.
            if (acc <= target)
                for (Index i = n - 1; i >= 0; --i)
                    if (d2(i) > 0.0) {
                        pick = i;
                        break;
                    }
        } else {
            pick = std::min<Index>(n - 1, static_cast<Index>(rng.uniform() * static_cast<double>(n)));
        }
        centers.row(c) = X.row(pick);
        d2 = d2.cwiseMin((X.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
    return centers;
}

// Assigns each point to its nearest center (lowest index on ties) and returns
// the objective.
double assign_points(const Matrix& X, const Matrix& centers, std::vector<int>& assign) {
    double obj = 0.0;
    for (Index i = 0; i < X.rows(); ++i) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (Index c = 0; c < centers.rows(); ++c) {
            const double d = (X.row(i) - centers.row(c)).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        assign[static_cast<std::size_t>(i)] = best;
        obj += best_d;
    }
    return obj;
}

// Returns true when some cluster has no members; empty clusters keep their
// previous center.
bool update_centers(const Matrix& X, const std::vector<int>& assign, Matrix& centers) {
    const Index K = centers.rows();
    Matrix sums = Matrix::Zero(K, X.cols());
    std::vector<Index> counts(static_cast<std::size_t>(K), 0);
    for (Index i = 0; i < X.rows(); ++i) {
        const int c = assign[static_cast<std::size_t>(i)];
        sums.row(c) += X.row(i);
        ++counts[static_cast<std::size_t>(c)];
    }
    bool empty = false;
    for (Index c = 0; c < K; ++c) {
        if (counts[static_cast<std::size_t>(c)] == 0) {
            empty = true;
            continue;
        }
        centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
    }
    return empty;
}

Run lloyd(const Matrix& X, int K, const KMeansConfig& cfg, SplitMix64& rng) {
    Run run;
    run.centers = plus_plus_seeds(X, K, rng);
    run.assign.assign(static_cast<std::size_t>(X.rows()), 0);
    double obj = assign_points(X, run.centers, run.assign);
    run.history.push_back(obj);
    for (int it = 0; it < cfg.max_iter; ++it) {
        update_centers(X, run.assign, run.centers);
        std::vector<int> next(run.assign.size());
        const double next_obj = assign_points(X, run.centers, next);
        run.history.push_back(next_obj);
        ++run.iterations;
        const bool unchanged = next == run.assign;
        run.assign = std::move(next);
        const double drop = obj - next_obj;
        obj = next_obj;
        if (unchanged || drop <= cfg.tol * std::max(obj, std::numeric_limits<double>::min())) break;
    }
    // Final centers consistent with the final assignment.
    run.has_empty = update_centers(X, run.assign, run.centers);
    double final_obj = 0.0;
    for (Index i = 0; i < X.rows(); ++i)
        final_obj += (X.row(i) - run.centers.row(run.assign[static_cast<std::size_t>(i)])).squaredNorm();
    run.objective = std::min(obj, final_obj);
    return run;
}

}  // namespace

double kmeans_objective(const Matrix& X, const LabelVector& labels) {
    if (labels.size() != X.rows()) throw DimensionError("labels and points differ in length");
    Matrix centers = Matrix::Zero(labels.K(), X.cols());
    update_centers(X, labels.values(), centers);
    double obj = 0.0;
    for (Index i = 0; i < X.rows(); ++i) obj += (X.row(i) - centers.row(labels[i])).squaredNorm();
    return obj;
}

KMeansResult kmeans(const Matrix& X, int K, const KMeansConfig& cfg) {
    if (K < 1) throw DomainError("K-means needs K >= 1");
    if (cfg.restarts < 1) throw DomainError("K-means needs at least one restart");
    if (X.rows() < K) throw DomainError("K-means needs at least K points");
    if (!X.allFinite()) throw NumericalError("K-means input contains non-finite values");

    Run best;
    bool found = false;
    for (int r = 0; r < cfg.restarts; ++r) {
        SplitMix64 rng(stream_key(cfg.seed, Stream::kmeans, static_cast<std::uint64_t>(r)));
        Run run = lloyd(X, K, cfg, rng);
        if (run.has_empty) continue;
        if (!found || run.objective < best.objective) {
            best = std::move(run);
            found = true;
        }
    }
    if (!found)
        throw NumericalError("K-means produced an empty cluster in every restart (fewer than K distinct points?)");

    KMeansResult out;
    const LabelVector raw(best.assign, K);
    out.labels = raw.canonical();
    // Reorder centers to the canonical labels.
    out.centers.resize(K, X.cols());
    for (Index i = 0; i < X.rows(); ++i) out.centers.row(out.labels[i]) = best.centers.row(raw[i]);
    out.objective = best.objective;
    out.iterations = best.iterations;
    out.history = std::move(best.history);
    return out;
}

}  // namespace nsbm

#include "nsbm/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace nsbm {

namespace {

Misclustering finish(const Eigen::MatrixXi& C, const LabelVector& truth, std::vector<int> perm) {
    Misclustering out;
    const Index n = truth.size();
    long matched = 0;
    for (std::size_t p = 0; p < perm.size(); ++p) matched += C(static_cast<Index>(p), perm[p]);
    out.rate = n ? 1.0 - static_cast<double>(matched) / static_cast<double>(n) : 0.0;

    const auto sizes = truth.sizes();
    for (Index t = 0; t < truth.K(); ++t) {
        const auto n_t = sizes[static_cast<std::size_t>(t)];
        if (n_t == 0) continue;
        long hit = 0;
        for (std::size_t p = 0; p < perm.size(); ++p)
            if (perm[p] == t) hit += C(static_cast<Index>(p), t);
        out.per_community += static_cast<double>(n_t - hit) / static_cast<double>(n_t);
    }
    out.permutation = std::move(perm);
    return out;
}

}  // namespace

Eigen::MatrixXi confusion_matrix(const LabelVector& pred, const LabelVector& truth) {
    if (pred.size() != truth.size()) throw DimensionError("predicted and true labels differ in length");
    const int K = std::max(pred.K(), truth.K());
    Eigen::MatrixXi C = Eigen::MatrixXi::Zero(K, K);
    for (Index i = 0; i < pred.size(); ++i) ++C(pred[i], truth[i]);
    return C;
}

std::vector<int> max_weight_assignment(const Matrix& w) {
    if (w.rows() != w.cols()) throw DimensionError("assignment needs a square weight matrix");
    const Index K = w.rows();
    if (K == 0) return {};
    // Hungarian algorithm (potentials form) on cost = max - w, 1-based arrays.
    const double top = w.maxCoeff();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(K + 1), 0.0), v(static_cast<std::size_t>(K + 1), 0.0);
    std::vector<Index> match(static_cast<std::size_t>(K + 1), 0), way(static_cast<std::size_t>(K + 1), 0);
    auto cost = [&](Index r, Index c) { return top - w(r - 1, c - 1); };
    for (Index r = 1; r <= K; ++r) {
        match[0] = r;
        Index c0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(K + 1), inf);
        std::vector<char> used(static_cast<std::size_t>(K + 1), 0);
        do {
            used[static_cast<std::size_t>(c0)] = 1;
            const Index r0 = match[static_cast<std::size_t>(c0)];
            double delta = inf;
            Index c1 = 0;
            for (Index c = 1; c <= K; ++c) {
                if (used[static_cast<std::size_t>(c)]) continue;
                const double cur = cost(r0, c) - u[static_cast<std::size_t>(r0)] - v[static_cast<std::size_t>(c)];
                if (cur < minv[static_cast<std::size_t>(c)]) {
                    minv[static_cast<std::size_t>(c)] = cur;
                    way[static_cast<std::size_t>(c)] = c0;
                }
                if (minv[static_cast<std::size_t>(c)] < delta) {
                    delta = minv[static_cast<std::size_t>(c)];
                    c1 = c;
                }
            }
            for (Index c = 0; c <= K; ++c) {
                if (used[static_cast<std::size_t>(c)]) {
                    u[static_cast<std::size_t>(match[static_cast<std::size_t>(c)])] += delta;
                    v[static_cast<std::size_t>(c)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(c)] -= delta;
                }
            }
            c0 = c1;
        } while (match[static_cast<std::size_t>(c0)] != 0);
        do {
            const Index c1 = way[static_cast<std::size_t>(c0)];
            match[static_cast<std::size_t>(c0)] = match[static_cast<std::size_t>(c1)];
            c0 = c1;
        } while (c0 != 0);
    }
    std::vector<int> perm(static_cast<std::size_t>(K));
    for (Index c = 1; c <= K; ++c) perm[static_cast<std::size_t>(match[static_cast<std::size_t>(c)] - 1)] = static_cast<int>(c - 1);
    return perm;
}

Misclustering misclustering(const LabelVector& pred, const LabelVector& truth) {
    const Eigen::MatrixXi C = confusion_matrix(pred, truth);
    const int K = static_cast<int>(C.rows());
    if (K <= 8) {
        std::vector<int> perm(static_cast<std::size_t>(K));
        std::iota(perm.begin(), perm.end(), 0);
        std::vector<int> best = perm;
        long best_hits = -1;
        do {
            long hits = 0;
            for (int p = 0; p < K; ++p) hits += C(p, perm[static_cast<std::size_t>(p)]);
            if (hits > best_hits) {
                best_hits = hits;
                best = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        return finish(C, truth, std::move(best));
    }
    return finish(C, truth, max_weight_assignment(C.cast<double>()));
}

double relative_frobenius(const Matrix& P_hat, const Matrix& P_tilde) {
    if (P_hat.rows() != P_tilde.rows() || P_hat.cols() != P_tilde.cols())
        throw DimensionError("probability matrices differ in shape");
    double num = 0.0;
    double den = 0.0;
    for (Index j = 0; j < P_tilde.cols(); ++j)
        for (Index i = 0; i < P_tilde.rows(); ++i) {
            if (i == j) continue;
            const double d = P_tilde(i, j) - P_hat(i, j);
            num += d * d;
            den += P_tilde(i, j) * P_tilde(i, j);
        }
    if (!(den > 0.0)) throw DomainError("reference probability matrix is zero");
    return num / den;
}

}  // namespace nsbm

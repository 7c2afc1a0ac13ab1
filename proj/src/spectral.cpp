#include "nsbm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace nsbm {

namespace {

void check_input(const Matrix& M, int K) {
    if (M.rows() != M.cols()) throw DimensionError("clustering expects a square adjacency matrix");
    if (K < 1) throw DomainError("K must be at least 1");
    if (K > M.rows()) throw DomainError("K exceeds the number of nodes");
}

LabelVector single_cluster(Index n) {
    return LabelVector(std::vector<int>(static_cast<std::size_t>(n), 0), 1);
}

class DisjointSets {
public:
    explicit DisjointSets(Index n) : parent_(static_cast<std::size_t>(n)) {
        std::iota(parent_.begin(), parent_.end(), Index{0});
    }
    Index find(Index x) {
        while (parent_[static_cast<std::size_t>(x)] != x) {
            auto& p = parent_[static_cast<std::size_t>(x)];
            p = parent_[static_cast<std::size_t>(p)];
            x = p;
        }
        return x;
    }
    void unite(Index a, Index b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[static_cast<std::size_t>(b)] = a;
    }

private:
    std::vector<Index> parent_;
};

}  // namespace

std::string_view to_string(ClusterMethod m) {
    switch (m) {
        case ClusterMethod::right_sc: return "right_sc";
        case ClusterMethod::right_smst: return "right_smst";
        case ClusterMethod::left_sc: return "left_sc";
        case ClusterMethod::left_ssc: return "left_ssc";
        case ClusterMethod::symmetric_sc: return "symmetric_sc";
        case ClusterMethod::symmetric_ssc: return "symmetric_ssc";
    }
    return "unknown";
}

ClusterMethod parse_cluster_method(std::string_view name) {
    for (auto m : {ClusterMethod::right_sc, ClusterMethod::right_smst, ClusterMethod::left_sc,
                   ClusterMethod::left_ssc, ClusterMethod::symmetric_sc, ClusterMethod::symmetric_ssc})
        if (to_string(m) == name) return m;
    throw DomainError("unknown clustering method '" + std::string(name) + "'");
}

Matrix right_embedding(const Matrix& M, int K) {
    check_input(M, K);
    return truncated_svd(M, K).V;
}

LabelVector right_sc(const Matrix& M, int K, const KMeansConfig& cfg) {
    check_input(M, K);
    if (K == 1) return single_cluster(M.rows());
    return kmeans(right_embedding(M, K), K, cfg).labels;
}

LabelVector right_sc(const DirectedGraph& A, int K, const KMeansConfig& cfg) {
    return right_sc(A.weights(), K, cfg);
}

LabelVector mst_cut_clusters(const Matrix& X, int K) {
    const Index n = X.rows();
    if (K < 1 || K > n) throw DomainError("K must lie in [1, n]");

    // Dense Prim from node 0. Strict comparisons keep the lowest index on ties.
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> key(static_cast<std::size_t>(n), inf);
    std::vector<Index> parent(static_cast<std::size_t>(n), -1);
    std::vector<char> in_tree(static_cast<std::size_t>(n), 0);
    struct Edge {
        double w;
        Index a, b;
    };
    std::vector<Edge> tree;
    tree.reserve(static_cast<std::size_t>(n));
    key[0] = 0.0;
    for (Index step = 0; step < n; ++step) {
        Index u = -1;
        double best = inf;
        for (Index v = 0; v < n; ++v)
            if (!in_tree[static_cast<std::size_t>(v)] && (u < 0 || key[static_cast<std::size_t>(v)] < best)) {
                best = key[static_cast<std::size_t>(v)];
                u = v;
            }
        in_tree[static_cast<std::size_t>(u)] = 1;
        if (parent[static_cast<std::size_t>(u)] >= 0)
            tree.push_back({best, std::min(u, parent[static_cast<std::size_t>(u)]),
                            std::max(u, parent[static_cast<std::size_t>(u)])});
        for (Index v = 0; v < n; ++v) {
            if (in_tree[static_cast<std::size_t>(v)]) continue;
            const double d = (X.row(u) - X.row(v)).norm();
            if (d < key[static_cast<std::size_t>(v)]) {
                key[static_cast<std::size_t>(v)] = d;
                parent[static_cast<std::size_t>(v)] = u;
            }
        }
    }

    // Heaviest first; ties broken lexicographically by endpoint indices.
    std::sort(tree.begin(), tree.end(), [](const Edge& x, const Edge& y) {
        return std::tie(y.w, x.a, x.b) < std::tie(x.w, y.a, y.b);
    });
    DisjointSets sets(n);
    for (std::size_t e = static_cast<std::size_t>(K - 1); e < tree.size(); ++e) sets.unite(tree[e].a, tree[e].b);

    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(sets.find(i));
    // Roots are the smallest member of each component; compress to 0..K-1.
    std::vector<int> remap(static_cast<std::size_t>(n), -1);
    int next = 0;
    for (auto& c : labels) {
        int& r = remap[static_cast<std::size_t>(c)];
        if (r < 0) r = next++;
        c = r;
    }
    return LabelVector(std::move(labels), K);
}

LabelVector right_smst(const Matrix& M, int K) {
    check_input(M, K);
    if (K == 1) return single_cluster(M.rows());
    return mst_cut_clusters(right_embedding(M, K), K);
}

LabelVector right_smst(const DirectedGraph& A, int K) { return right_smst(A.weights(), K); }

Matrix symmetrize(const Matrix& A, Symmetrization rule) {
    if (A.rows() != A.cols()) throw DimensionError("symmetrization expects a square matrix");
    if (rule == Symmetrization::max) return A.cwiseMax(A.transpose());
    return A + A.transpose();
}

Matrix normalize_rows(const Matrix& X) {
    Matrix out = X;
    for (Index i = 0; i < out.rows(); ++i) {
        const double norm = out.row(i).norm();
        if (norm > 0.0) out.row(i) /= norm;
    }
    return out;
}

LabelVector baseline_cluster(const Matrix& M, int K, ClusterMethod method, const KMeansConfig& cfg,
                             Symmetrization rule) {
    check_input(M, K);
    if (K == 1) return single_cluster(M.rows());
    Matrix embedding;
    switch (method) {
        case ClusterMethod::left_sc: embedding = truncated_svd(M, K).U; break;
        case ClusterMethod::left_ssc: embedding = normalize_rows(truncated_svd(M, K).U); break;
        // For a symmetric matrix the top-K singular vectors are the eigenvectors
        // of the K largest-magnitude eigenvalues (up to column signs, which
        // K-means ignores).
        case ClusterMethod::symmetric_sc: embedding = truncated_svd(symmetrize(M, rule), K).V; break;
        case ClusterMethod::symmetric_ssc:
            embedding = normalize_rows(truncated_svd(symmetrize(M, rule), K).V);
            break;
        default: throw DomainError("baseline_cluster: not a baseline method");
    }
    return kmeans(embedding, K, cfg).labels;
}

LabelVector cluster(const Matrix& M, int K, ClusterMethod method, const KMeansConfig& cfg, Symmetrization rule) {
    switch (method) {
        case ClusterMethod::right_sc: return right_sc(M, K, cfg);
        case ClusterMethod::right_smst: return right_smst(M, K);
        default: return baseline_cluster(M, K, method, cfg, rule);
    }
}

DiagnosticsReport theory_diagnostics(const Matrix& P, int K, const LabelVector* labels) {
    check_input(P, K);
    const Index n = P.rows();
    const SvdFactors f = truncated_svd(P, K, SvdPath::dense);
    DiagnosticsReport r;
    r.sigma_K = f.D(K - 1);
    r.max_entry = P.maxCoeff();
    r.rank_deficient = !(r.sigma_K > 1e-12 * std::max(f.D(0), 1e-300));
    if (!r.rank_deficient)
        r.misclustering_bound = static_cast<double>(K) * static_cast<double>(n) * r.max_entry / (r.sigma_K * r.sigma_K);
    const double root_n = std::sqrt(static_cast<double>(n));
    r.left_incoherence = root_n * f.U.rowwise().norm().maxCoeff();
    r.right_incoherence = root_n * f.V.rowwise().norm().maxCoeff();

    if (labels) {
        if (labels->size() != n || labels->K() != K) throw DimensionError("labels do not match the matrix");
        const auto groups = labels->groups();
        Matrix reps = Matrix::Zero(K, K);
        double spread = 0.0;
        for (int k = 0; k < K; ++k) {
            const auto& g = groups[static_cast<std::size_t>(k)];
            if (g.empty()) throw DomainError("empty community in diagnostics labels");
            reps.row(k) = f.V.row(g.front());
            for (Index i : g) spread = std::max(spread, (f.V.row(i) - reps.row(k)).norm());
        }
        double worst = 0.0;
        for (int k = 0; k < K; ++k)
            for (int l = k + 1; l < K; ++l) {
                const double expected = std::sqrt(1.0 / static_cast<double>(groups[static_cast<std::size_t>(k)].size()) +
                                                  1.0 / static_cast<double>(groups[static_cast<std::size_t>(l)].size()));
                worst = std::max(worst, std::abs((reps.row(k) - reps.row(l)).norm() - expected));
            }
        r.geometry_error = worst;
        r.within_spread = spread;
    }
    return r;
}

}  // namespace nsbm

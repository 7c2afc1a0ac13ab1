#include "nsbm/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

#include <nlohmann/json.hpp>

#include "nsbm/spectral.hpp"

namespace nsbm {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

// b^lambda for estimated parameters: 0^0 = 1, and 0 raised to a negative
// power collapses to 0 instead of throwing.
double estimated_power(double b, double lambda, bool* undefined = nullptr) {
    if (std::isnan(lambda)) return nan_value;
    if (b == 0.0 && lambda < 0.0) {
        if (undefined) *undefined = true;
        return 0.0;
    }
    return block_power(b, lambda);
}

void check_labels(const Matrix& A, const LabelVector& labels) {
    if (A.rows() != A.cols()) throw DimensionError("adjacency must be square");
    if (labels.size() != A.rows()) throw DimensionError("labels and adjacency differ in size");
    if (!labels.all_nonempty()) throw DomainError("every community needs at least one member");
}

}  // namespace

MomentTable moments_from_block_means(Matrix T, const LabelVector& labels) {
    if (T.rows() != labels.size() || T.cols() != labels.K()) throw DimensionError("moment table must be n x K");
    if (!labels.all_nonempty()) throw DomainError("every community needs at least one member");
    const auto sizes = labels.sizes();
    Matrix Y(T.rows(), T.cols());
    for (Index l = 0; l < T.cols(); ++l) {
        const double floor = 1.0 / static_cast<double>(sizes[static_cast<std::size_t>(l)]);
        for (Index i = 0; i < T.rows(); ++i) Y(i, l) = std::log(std::max(T(i, l), floor));
    }
    return MomentTable{std::move(T), std::move(Y), labels};
}

MomentTable block_moments(const Matrix& A, const LabelVector& labels) {
    check_labels(A, labels);
    // T = A Z diag(1/n_l); the diagonal of A is zero, so self-pairs add nothing
    // while the divisor stays n_l.
    Matrix T = A * labels.membership();
    const auto sizes = labels.sizes();
    for (Index l = 0; l < T.cols(); ++l) T.col(l) /= static_cast<double>(sizes[static_cast<std::size_t>(l)]);
    return moments_from_block_means(std::move(T), labels);
}

bool NsbmEstimate::failed_community(int k) const {
    return std::find(failed.begin(), failed.end(), k) != failed.end();
}

NsbmEstimate estimate_from_moments(const MomentTable& m, const EstimateOptions& opts) {
    const LabelVector& labels = m.labels;
    const int K = labels.K();
    const Index n = labels.size();
    const auto groups = labels.groups();

    NsbmEstimate est;
    est.labels = labels;
    est.theta = Vector::Zero(n);
    est.lambda = Vector::Constant(n, nan_value);
    est.B = Matrix::Zero(K, K);
    est.psi.resize(static_cast<std::size_t>(K));

    for (int k = 0; k < K; ++k) {
        const auto& G = groups[static_cast<std::size_t>(k)];
        const double n_k = static_cast<double>(G.size());
        for (Index i : G) est.theta(i) = std::max(m.T(i, k), 1.0 / n_k);

        auto& psi = est.psi[static_cast<std::size_t>(k)];
        for (int l = 0; l < K; ++l) {
            Index positive = 0;
            for (Index i : G)
                if (m.T(i, l) > 0.0) ++positive;
            bool keep = false;
            switch (opts.psi_rule) {
                case PsiRule::strict: keep = positive == static_cast<Index>(G.size()); break;
                case PsiRule::relaxed:
                    keep = positive > 0 && static_cast<double>(positive) >= opts.relaxed_fraction * n_k;
                    break;
                case PsiRule::nonzero_block: keep = positive > 0; break;
            }
            if (keep) psi.push_back(l);
        }
        est.B(k, k) = 1.0;

        std::vector<int> off;
        std::copy_if(psi.begin(), psi.end(), std::back_inserter(off), [k](int l) { return l != k; });
        if (off.empty()) {
            est.failed.push_back(k);
            continue;
        }

        // Node-level numerators and the community normalizer.
        double normalizer = 0.0;
        for (int l : off) {
            double block = 0.0;
            for (Index i : G) block += m.Y(i, k) - m.Y(i, l);
            normalizer += block / n_k;
            est.B(k, l) = std::exp(-block / n_k);
        }
        if (!(std::abs(normalizer) > 0.0) || !std::isfinite(normalizer)) {
            est.failed.push_back(k);
            for (int l : off) est.B(k, l) = 0.0;
            continue;
        }
        for (Index i : G) {
            double num = 0.0;
            for (int l : off) num += m.Y(i, k) - m.Y(i, l);
            est.lambda(i) = num / normalizer;
        }
    }
    return est;
}

NsbmEstimate estimate_nsbm(const Matrix& A, const LabelVector& labels, const EstimateOptions& opts) {
    return estimate_from_moments(block_moments(A, labels), opts);
}

NsbmEstimate estimate_nsbm(const DirectedGraph& A, const LabelVector& labels, const EstimateOptions& opts) {
    return estimate_nsbm(A.weights(), labels, opts);
}

Reconstruction reconstruct_p(const NsbmEstimate& est) {
    if (!est.ok()) throw NumericalError("cannot reconstruct P: estimation failed for some communities");
    const Index n = est.labels.size();
    const int K = est.labels.K();
    Reconstruction r;
    Matrix row_values(n, K);
    for (Index i = 0; i < n; ++i)
        for (int l = 0; l < K; ++l) {
            bool undefined = false;
            row_values(i, l) = est.theta(i) * estimated_power(est.B(est.labels[i], l), est.lambda(i), &undefined);
            if (undefined) ++r.undefined_entries;
        }
    r.P.resize(n, n);
    for (Index j = 0; j < n; ++j) r.P.col(j) = row_values.col(est.labels[j]);
    r.P.diagonal().setZero();
    return r;
}

NsbmParams as_params(const NsbmEstimate& est) {
    NsbmParams p;
    p.labels = est.labels;
    p.B = est.B;
    p.theta = est.theta;
    p.lambda = est.lambda;
    return p;
}

std::string_view to_string(BaselineModel m) {
    switch (m) {
        case BaselineModel::dsbm: return "dsbm";
        case BaselineModel::dcsbm: return "dcsbm";
        case BaselineModel::scbm: return "scbm";
    }
    return "unknown";
}

BaselineModel parse_baseline_model(std::string_view name) {
    for (auto m : {BaselineModel::dsbm, BaselineModel::dcsbm, BaselineModel::scbm})
        if (to_string(m) == name) return m;
    throw DomainError("unknown baseline model '" + std::string(name) + "'");
}

Matrix block_mean_estimate(const Matrix& A, const LabelVector& labels) {
    check_labels(A, labels);
    const int K = labels.K();
    const Matrix Z = labels.membership();
    const Matrix mass = Z.transpose() * A * Z;
    const auto sizes = labels.sizes();
    Matrix means(K, K);
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l) {
            const double nk = static_cast<double>(sizes[static_cast<std::size_t>(k)]);
            const double nl = static_cast<double>(sizes[static_cast<std::size_t>(l)]);
            const double pairs = nk * nl - (k == l ? nk : 0.0);
            means(k, l) = pairs > 0.0 ? mass(k, l) / pairs : 0.0;
        }
    const Index n = A.rows();
    Matrix P(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) P(i, j) = means(labels[i], labels[j]);
    P.diagonal().setZero();
    return P;
}

Matrix degree_corrected_estimate(const Matrix& A, const LabelVector& rows, const LabelVector& cols) {
    check_labels(A, rows);
    check_labels(A, cols);
    const Index n = A.rows();
    const Vector d_out = A.rowwise().sum();
    const Vector d_in = A.colwise().sum().transpose();
    const Matrix Zr = rows.membership();
    const Matrix Zc = cols.membership();
    const Matrix mass = Zr.transpose() * A * Zc;
    const Vector out_mass = Zr.transpose() * d_out;
    const Vector in_mass = Zc.transpose() * d_in;
    Matrix S = out_mass * in_mass.transpose();
    for (Index i = 0; i < n; ++i) S(rows[i], cols[i]) -= d_out(i) * d_in(i);

    Matrix scale(rows.K(), cols.K());
    for (Index a = 0; a < scale.rows(); ++a)
        for (Index b = 0; b < scale.cols(); ++b) scale(a, b) = S(a, b) > 0.0 ? mass(a, b) / S(a, b) : 0.0;
    Matrix P(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) P(i, j) = d_out(i) * d_in(j) * scale(rows[i], cols[j]);
    P.diagonal().setZero();
    return P;
}

Matrix estimate_baseline(const Matrix& A, int K, BaselineModel model, const KMeansConfig& cfg) {
    switch (model) {
        case BaselineModel::dsbm:
            return block_mean_estimate(A, baseline_cluster(A, K, ClusterMethod::symmetric_sc, cfg));
        case BaselineModel::dcsbm: {
            const LabelVector labels = baseline_cluster(A, K, ClusterMethod::symmetric_sc, cfg);
            return degree_corrected_estimate(A, labels, labels);
        }
        case BaselineModel::scbm:
            return degree_corrected_estimate(A, baseline_cluster(A, K, ClusterMethod::left_ssc, cfg),
                                             right_sc(A, K, cfg));
    }
    throw DomainError("unknown baseline model");
}

Matrix connection_strength(const NsbmParams& p) {
    check_structure(p);
    const int K = p.K();
    const auto groups = p.labels.groups();
    // The summand does not depend on j, so the self-pair-excluded diagonal
    // average (divisor n_k (n_k - 1)) equals the plain row average.
    Matrix M(K, K);
    for (int k = 0; k < K; ++k) {
        const auto& G = groups[static_cast<std::size_t>(k)];
        if (G.empty()) throw DomainError("connection strength needs non-empty communities");
        for (int l = 0; l < K; ++l) {
            double sum = 0.0;
            for (Index i : G) sum += p.theta(i) * estimated_power(p.B(k, l), p.lambda(i));
            M(k, l) = sum / static_cast<double>(G.size());
        }
    }
    return M;
}

Matrix connection_strength(const NsbmEstimate& est) { return connection_strength(as_params(est)); }

void to_json(nlohmann::json& j, const NsbmEstimate& est) {
    auto vec = [](const Vector& v) {
        nlohmann::json a = nlohmann::json::array();
        for (Index i = 0; i < v.size(); ++i) a.push_back(std::isfinite(v(i)) ? nlohmann::json(v(i)) : nlohmann::json());
        return a;
    };
    auto mat = [](const Matrix& m) {
        nlohmann::json a = nlohmann::json::array();
        for (Index r = 0; r < m.rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (Index c = 0; c < m.cols(); ++c)
                row.push_back(std::isfinite(m(r, c)) ? nlohmann::json(m(r, c)) : nlohmann::json());
            a.push_back(std::move(row));
        }
        return a;
    };
    nlohmann::json psi = nlohmann::json::array();
    for (const auto& s : est.psi) {
        nlohmann::json one = nlohmann::json::array();
        for (int l : s) one.push_back(l + 1);
        psi.push_back(std::move(one));
    }
    nlohmann::json failed = nlohmann::json::array();
    for (int k : est.failed) failed.push_back(k + 1);
    j = nlohmann::json{{"K", est.labels.K()},
                       {"labels", est.labels.one_based()},
                       {"theta", vec(est.theta)},
                       {"lambda", vec(est.lambda)},
                       {"B", mat(est.B)},
                       {"psi", std::move(psi)},
                       {"M", mat(connection_strength(est))},
                       {"failed_communities", std::move(failed)}};
}

}  // namespace nsbm

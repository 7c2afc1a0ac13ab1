#include "nsbm/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nsbm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string describe(const char* what, Index expected, Index got) {
    std::ostringstream os;
    os << what << ": expected " << expected << ", got " << got;
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// DirectedGraph

DirectedGraph::DirectedGraph(Matrix weights) : weights_(std::move(weights)) {
    if (weights_.rows() != weights_.cols())
        throw DimensionError(describe("adjacency must be square; columns", weights_.rows(), weights_.cols()));
    const Index n = weights_.rows();
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const double w = weights_(i, j);
            if (!std::isfinite(w) || w < 0.0)
                throw DomainError("adjacency weights must be finite and non-negative");
            if (i == j && w != 0.0) throw DomainError("adjacency must have a zero diagonal (no self-loops)");
            if (w != 0.0 && w != 1.0) binary_ = false;
        }
    }
}

Index DirectedGraph::edge_count() const {
    return static_cast<Index>((weights_.array() != 0.0).count());
}

double DirectedGraph::density() const {
    const Index n = size();
    if (n < 2) return 0.0;
    return static_cast<double>(edge_count()) / (static_cast<double>(n) * static_cast<double>(n - 1));
}

SparseMatrix DirectedGraph::to_sparse() const {
    return weights_.sparseView();
}

Eigen::VectorXi DirectedGraph::out_degree_counts() const {
    return (weights_.array() != 0.0).rowwise().count().cast<int>();
}

Eigen::VectorXi DirectedGraph::in_degree_counts() const {
    return (weights_.array() != 0.0).colwise().count().transpose().cast<int>();
}

// ---------------------------------------------------------------------------
// LabelVector

LabelVector::LabelVector(std::vector<int> labels, int K) : labels_(std::move(labels)), K_(K) {
    if (K_ < 1) throw DomainError("number of communities must be at least 1");
    for (int c : labels_)
        if (c < 0 || c >= K_) throw DomainError("community label out of range");
}

LabelVector LabelVector::from_one_based(const std::vector<int>& labels, int K) {
    std::vector<int> zero(labels.size());
    int max_label = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 1) throw DomainError("1-based community labels must be positive");
        zero[i] = labels[i] - 1;
        max_label = std::max(max_label, labels[i]);
    }
    return LabelVector(std::move(zero), K > 0 ? K : max_label);
}

std::vector<int> LabelVector::one_based() const {
    std::vector<int> out(labels_.size());
    std::transform(labels_.begin(), labels_.end(), out.begin(), [](int c) { return c + 1; });
    return out;
}

std::vector<Index> LabelVector::sizes() const {
    std::vector<Index> n_k(static_cast<std::size_t>(K_), 0);
    for (int c : labels_) ++n_k[static_cast<std::size_t>(c)];
    return n_k;
}

std::vector<std::vector<Index>> LabelVector::groups() const {
    std::vector<std::vector<Index>> g(static_cast<std::size_t>(K_));
    for (std::size_t i = 0; i < labels_.size(); ++i)
        g[static_cast<std::size_t>(labels_[i])].push_back(static_cast<Index>(i));
    return g;
}

bool LabelVector::all_nonempty() const {
    const auto n_k = sizes();
    return std::all_of(n_k.begin(), n_k.end(), [](Index s) { return s > 0; });
}

Matrix LabelVector::membership() const {
    Matrix Z = Matrix::Zero(size(), K_);
    for (Index i = 0; i < size(); ++i) Z(i, (*this)[i]) = 1.0;
    return Z;
}

LabelVector LabelVector::canonical() const {
    std::vector<int> remap(static_cast<std::size_t>(K_), -1);
    int next = 0;
    std::vector<int> out(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        int& r = remap[static_cast<std::size_t>(labels_[i])];
        if (r < 0) r = next++;
        out[i] = r;
    }
    return LabelVector(std::move(out), K_);
}

// ---------------------------------------------------------------------------
// NsbmParams

double block_power(double b, double lambda) {
    if (lambda == 0.0) return 1.0;
    if (b == 0.0) {
        if (lambda > 0.0) return 0.0;
        throw DomainError("zero block probability raised to a negative power is undefined");
    }
    if (lambda == 1.0) return b;
    return std::pow(b, lambda);
}

bool ValidationReport::violates(int condition) const {
    return std::any_of(violations.begin(), violations.end(),
                       [condition](const Violation& v) { return v.condition == condition; });
}

void check_structure(const NsbmParams& p) {
    const Index n = p.labels.size();
    const Index K = p.labels.K();
    if (p.B.rows() != K || p.B.cols() != K)
        throw DimensionError(describe("block matrix must be K x K with K", K, p.B.rows()) + "x" +
                             std::to_string(p.B.cols()));
    if (p.theta.size() != n) throw DimensionError(describe("theta length", n, p.theta.size()));
    if (p.lambda.size() != n) throw DimensionError(describe("lambda length", n, p.lambda.size()));
}

ValidationReport validate_nsbm_params(const NsbmParams& p) {
    check_structure(p);
    ValidationReport report;
    const int K = p.K();

    for (int k = 0; k < K; ++k) {
        if (p.B(k, k) != 1.0) {
            std::ostringstream os;
            os << "B(" << k + 1 << "," << k + 1 << ") = " << p.B(k, k) << " must equal 1";
            report.violations.push_back({1, k, -1, os.str()});
        }
        bool informative = false;
        for (int l = 0; l < K; ++l)
            if (l != k && p.B(k, l) != 0.0 && p.B(k, l) != p.B(k, k)) informative = true;
        if (!informative) {
            std::ostringstream os;
            os << "community " << k + 1 << " has no off-diagonal block distinct from 0 and B(k,k)";
            report.violations.push_back({2, k, -1, os.str()});
        }
    }
    for (Index i = 0; i < p.size(); ++i) {
        if (!(p.theta(i) > 0.0)) {
            std::ostringstream os;
            os << "theta of node " << i + 1 << " must be positive";
            report.violations.push_back({3, p.labels[i], i, os.str()});
        }
    }
    const auto groups = p.labels.groups();
    for (int k = 0; k < K; ++k) {
        const auto& g = groups[static_cast<std::size_t>(k)];
        if (g.empty()) {
            report.warnings.push_back("community " + std::to_string(k + 1) + " is empty");
            continue;
        }
        double sum = 0.0;
        for (Index i : g) sum += p.lambda(i);
        const double mean = sum / static_cast<double>(g.size());
        if (std::abs(mean - 1.0) > 1e-12) {
            std::ostringstream os;
            os.precision(17);
            os << "mean lambda of community " << k + 1 << " is " << mean << ", must be 1";
            report.violations.push_back({4, k, -1, os.str()});
        }
    }
    if (K > 0) {
        Eigen::FullPivLU<Matrix> lu(p.B);
        lu.setThreshold(1e-12);
        if (lu.rank() < K)
            report.warnings.push_back("B is rank-deficient (rank " + std::to_string(lu.rank()) + " < K)");
    }
    return report;
}

Matrix expected_matrix(const NsbmParams& p, Diagonal diag) {
    check_structure(p);
    const Index n = p.size();
    const int K = p.K();
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l)
            if (!(p.B(k, l) >= 0.0 && p.B(k, l) <= 1.0)) throw DomainError("B entries must lie in [0, 1]");

    // Each row only takes K distinct values; tabulate them once per node.
    Matrix row_values(n, K);
    for (Index i = 0; i < n; ++i) {
        const int ci = p.labels[i];
        for (int l = 0; l < K; ++l) row_values(i, l) = p.theta(i) * block_power(p.B(ci, l), p.lambda(i));
    }
    Matrix P(n, n);
    for (Index j = 0; j < n; ++j) {
        const int cj = p.labels[j];
        P.col(j) = row_values.col(cj);
    }
    if (diag == Diagonal::zero) P.diagonal().setZero();
    return P;
}

// ---------------------------------------------------------------------------
// Nomination functions

NominationFunctionSet::NominationFunctionSet(std::vector<NominationFunction> fns) : fns_(std::move(fns)) {
    for (const auto& f : fns_) {
        if (const auto* t = std::get_if<TabulatedNomination>(&f)) {
            if (t->x.empty() || t->x.size() != t->y.size())
                throw DimensionError("tabulated nomination function needs equally many x and y knots");
            for (std::size_t k = 1; k < t->x.size(); ++k)
                if (!(t->x[k] > t->x[k - 1])) throw DomainError("tabulated knots must be strictly increasing");
        }
    }
}

NominationFunctionSet NominationFunctionSet::constant(Index n, double rho) {
    return NominationFunctionSet(std::vector<NominationFunction>(static_cast<std::size_t>(n), ConstantNomination{rho}));
}

NominationFunctionSet NominationFunctionSet::power(const Vector& theta, const Vector& lambda) {
    if (theta.size() != lambda.size()) throw DimensionError("theta and lambda lengths differ");
    std::vector<NominationFunction> fns;
    fns.reserve(static_cast<std::size_t>(theta.size()));
    for (Index i = 0; i < theta.size(); ++i) fns.emplace_back(PowerNomination{theta(i), lambda(i)});
    return NominationFunctionSet(std::move(fns));
}

NominationFunctionSet NominationFunctionSet::egocentric(const std::vector<bool>& responds) {
    std::vector<NominationFunction> fns;
    fns.reserve(responds.size());
    for (bool r : responds) fns.emplace_back(EgocentricNomination{r});
    return NominationFunctionSet(std::move(fns));
}

double NominationFunctionSet::rate(Index i, double x) const {
    const double v = std::visit(
        overloaded{
            [](const ConstantNomination& f) { return f.rho; },
            [x](const PowerNomination& f) {
                if (f.lambda == 1.0) return f.theta;
                if (x == 0.0 && f.lambda < 1.0) return std::numeric_limits<double>::infinity();
                return f.theta * std::pow(x, f.lambda - 1.0);
            },
            [](const EgocentricNomination& f) { return f.responds ? 1.0 : 0.0; },
            [x](const TabulatedNomination& f) {
                if (x <= f.x.front()) return f.y.front();
                if (x >= f.x.back()) return f.y.back();
                const auto it = std::upper_bound(f.x.begin(), f.x.end(), x);
                const auto hi = static_cast<std::size_t>(it - f.x.begin());
                const double w = (x - f.x[hi - 1]) / (f.x[hi] - f.x[hi - 1]);
                return (1.0 - w) * f.y[hi - 1] + w * f.y[hi];
            },
        },
        fns_.at(static_cast<std::size_t>(i)));
    if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream os;
        os << "nomination function of node " << i + 1 << " evaluates to " << v << " at " << x
           << ", outside [0, 1]";
        throw DomainError(os.str());
    }
    return v;
}

double NominationFunctionSet::observed_probability(Index i, double x) const {
    if (const auto* p = std::get_if<PowerNomination>(&fns_.at(static_cast<std::size_t>(i)))) {
        if (x > 0.0) rate(i, x);  // range check only
        return p->theta * block_power(x, p->lambda);
    }
    if (x == 0.0) return 0.0;
    return x * rate(i, x);
}

Matrix expected_matrix_general(const Matrix& B, const LabelVector& labels, const NominationFunctionSet& fns) {
    const Index n = labels.size();
    const int K = labels.K();
    if (B.rows() != K || B.cols() != K) throw DimensionError("block matrix must be K x K");
    if (fns.size() != n) throw DimensionError(describe("nomination function count", n, fns.size()));
    for (Index l = 0; l < K; ++l)
        for (Index k = 0; k < K; ++k)
            if (!(B(k, l) >= 0.0 && B(k, l) <= 1.0)) throw DomainError("B entries must lie in [0, 1]");

    Matrix row_values(n, K);
    for (Index i = 0; i < n; ++i)
        for (int l = 0; l < K; ++l) row_values(i, l) = fns.observed_probability(i, B(labels[i], l));
    Matrix P(n, n);
    for (Index j = 0; j < n; ++j) P.col(j) = row_values.col(labels[j]);
    P.diagonal().setZero();
    return P;
}

}  // namespace nsbm

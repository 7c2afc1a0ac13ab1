#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "nsbm/error.hpp"

namespace nsbm {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// ---------------------------------------------------------------------------
// DirectedGraph
// ---------------------------------------------------------------------------

/// Square, non-negative weighted adjacency matrix without self-loops.
/// Entry (i, j) is the weight of the edge i -> j. Binary graphs hold only 0/1.
class DirectedGraph {
public:
    DirectedGraph() = default;

    /// Takes ownership of `weights`. Throws DimensionError when not square and
    /// DomainError on negative, non-finite, or diagonal entries.
    explicit DirectedGraph(Matrix weights);

    Index size() const noexcept { return weights_.rows(); }
    const Matrix& weights() const noexcept { return weights_; }
    bool is_binary() const noexcept { return binary_; }

    /// Number of nonzero entries.
    Index edge_count() const;
    /// edge_count / (n (n - 1)).
    double density() const;

    SparseMatrix to_sparse() const;

    /// Number of nonzero entries per row (out-degree) and per column (in-degree).
    Eigen::VectorXi out_degree_counts() const;
    Eigen::VectorXi in_degree_counts() const;

private:
    Matrix weights_;
    bool binary_ = true;
};

// ---------------------------------------------------------------------------
// LabelVector
// ---------------------------------------------------------------------------

/// Community assignment of n nodes into K communities.
///
/// Labels are stored 0-based (0..K-1); conversion to the 1-based labels used
/// in files and reports happens at the I/O boundary (`one_based`,
/// `from_one_based`).
class LabelVector {
public:
    LabelVector() = default;
    LabelVector(std::vector<int> labels, int K);

    static LabelVector from_one_based(const std::vector<int>& labels, int K = 0);

    int K() const noexcept { return K_; }
    Index size() const noexcept { return static_cast<Index>(labels_.size()); }
    int operator[](Index i) const { return labels_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& values() const noexcept { return labels_; }
    std::vector<int> one_based() const;

    /// n_k for every community.
    std::vector<Index> sizes() const;
    /// G_k member lists, each sorted ascending.
    std::vector<std::vector<Index>> groups() const;
    bool all_nonempty() const;

    /// n x K indicator matrix with Z(i, k) = 1 iff node i is in community k.
    Matrix membership() const;

    /// Relabels communities in order of first appearance by node index.
    LabelVector canonical() const;

    friend bool operator==(const LabelVector&, const LabelVector&) = default;

private:
    std::vector<int> labels_;
    int K_ = 0;
};

// ---------------------------------------------------------------------------
// NsbmParams
// ---------------------------------------------------------------------------

/// Parameters of the nomination block model: the observed edge i -> j has
/// mean theta_i * B(c_i, c_j)^lambda_i.
struct NsbmParams {
    LabelVector labels;
    Matrix B;
    Vector theta;
    Vector lambda;
    /// Sparsity scale; theta already includes it. Informational only.
    double rho = 1.0;

    Index size() const noexcept { return labels.size(); }
    int K() const noexcept { return labels.K(); }
};

/// b^lambda with 0^0 = 1. Throws DomainError for 0 raised to a negative power.
double block_power(double b, double lambda);

struct Violation {
    int condition;   // 1..4, numbered as the identifiability conditions
    int community;   // 0-based community, or -1 for node-level violations
    Index node = -1;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::vector<std::string> warnings;

    bool identifiable() const noexcept { return violations.empty(); }
    bool violates(int condition) const;
};

/// Checks the four identifiability conditions (unit diagonal of B, a
/// non-trivial off-diagonal entry per row, positive theta, unit lambda mean per
/// community) and warns when B is rank-deficient. Throws DimensionError when
/// the parts of `params` disagree in size.
ValidationReport validate_nsbm_params(const NsbmParams& params);

/// Throws DimensionError unless labels/B/theta/lambda agree in size.
void check_structure(const NsbmParams& params);

enum class Diagonal {
    zero,  ///< self-pairs excluded (observed-graph convention)
    keep,  ///< low-rank population form theta_i * B_kk^lambda_i on the diagonal
};

/// Population matrix P(i, j) = theta_i * B(c_i, c_j)^lambda_i.
Matrix expected_matrix(const NsbmParams& params, Diagonal diag = Diagonal::zero);

// ---------------------------------------------------------------------------
// Nomination functions
// ---------------------------------------------------------------------------

/// f(x) = rho.
struct ConstantNomination {
    double rho;
};
/// f(x) = theta * x^(lambda - 1), so that x f(x) = theta * x^lambda.
struct PowerNomination {
    double theta;
    double lambda;
};
/// f(x) = 1 for respondents and 0 for non-respondents.
struct EgocentricNomination {
    bool responds;
};
/// Piecewise-linear interpolation of (x, y) knots; x strictly increasing,
/// constant extrapolation outside the knot range.
struct TabulatedNomination {
    std::vector<double> x;
    std::vector<double> y;
};

using NominationFunction =
    std::variant<ConstantNomination, PowerNomination, EgocentricNomination, TabulatedNomination>;

/// One nomination function per node.
class NominationFunctionSet {
public:
    NominationFunctionSet() = default;
    explicit NominationFunctionSet(std::vector<NominationFunction> fns);

    static NominationFunctionSet constant(Index n, double rho);
    static NominationFunctionSet power(const Vector& theta, const Vector& lambda);
    static NominationFunctionSet egocentric(const std::vector<bool>& responds);

    Index size() const noexcept { return static_cast<Index>(fns_.size()); }
    const NominationFunction& operator[](Index i) const { return fns_[static_cast<std::size_t>(i)]; }

    /// f_i(x). Throws DomainError when the value leaves [0, 1].
    double rate(Index i, double x) const;

    /// F_i(x) = x f_i(x). The power family is evaluated as theta x^lambda with
    /// 0^0 = 1, matching expected_matrix.
    double observed_probability(Index i, double x) const;

private:
    std::vector<NominationFunction> fns_;
};

/// P(i, j) = F_i(B(c_i, c_j)) with a zero diagonal.
Matrix expected_matrix_general(const Matrix& B, const LabelVector& labels,
                               const NominationFunctionSet& fns);

}  // namespace nsbm

#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "../common/random_params.hpp"
#include "nsbm/generate.hpp"

using namespace nsbm;

namespace {

NsbmParams small_params() {
    NsbmParams p;
    p.labels = LabelVector({0, 0, 0, 1, 1, 1}, 2);
    p.B.resize(2, 2);
    p.B << 1.0, 0.3, 0.6, 1.0;
    p.theta.resize(6);
    p.theta << 0.7, 0.4, 0.9, 0.5, 0.8, 0.3;
    p.lambda.resize(6);
    p.lambda << 1.5, 0.5, 1.0, 0.4, 1.2, 1.4;
    return p;
}

}  // namespace

TEST_SUITE("generate") {

TEST_CASE("directed sbm extremes") {
    const auto labels = nsbm::testing::balanced_labels(20, 2, 1);
    const auto full = sample_directed_sbm(Matrix::Ones(2, 2), labels, 3).weights();
    CHECK(full.sum() == 20.0 * 19.0);
    CHECK(full.diagonal().isZero());
    CHECK(sample_directed_sbm(Matrix::Zero(2, 2), labels, 3).weights().isZero());
    CHECK_THROWS_AS(sample_directed_sbm(Matrix::Constant(2, 2, 1.2), labels, 3), DomainError);
}

TEST_CASE("directed sbm within-block frequency") {
    Matrix B(2, 2);
    B << 0.8, 0.1, 0.1, 0.8;
    std::vector<int> v(200);
    for (int i = 0; i < 200; ++i) v[static_cast<std::size_t>(i)] = i < 100 ? 0 : 1;
    const LabelVector l(v, 2);
    const Matrix A = sample_directed_sbm(B, l, 11).weights();
    double within = 0.0;
    for (Index i = 0; i < 100; ++i)
        for (Index j = 0; j < 100; ++j) within += A(i, j);
    const double freq = within / 9900.0;
    CHECK(std::abs(freq - 0.8) <= 3.0 * std::sqrt(0.8 * 0.2 / 9900.0));
}

TEST_CASE("samplers are deterministic per seed") {
    const auto p = nsbm::testing::random_params(50, 2, 4);
    CHECK(sample_nsbm(p, 9).weights() == sample_nsbm(p, 9).weights());
    CHECK(sample_nsbm(p, 9).weights() != sample_nsbm(p, 10).weights());
    CHECK(sample_nsbm_poisson(p, 9).weights() == sample_nsbm_poisson(p, 9).weights());
}

TEST_CASE("nomination masking") {
    const auto labels = nsbm::testing::balanced_labels(40, 2, 2);
    Matrix B(2, 2);
    B << 0.9, 0.4, 0.4, 0.9;
    const auto A = sample_directed_sbm(B, labels, 5);
    CHECK(sample_nominated(A, B, labels, NominationFunctionSet::constant(40, 1.0), 6).weights() == A.weights());
    CHECK(sample_nominated(A, B, labels, NominationFunctionSet::constant(40, 0.0), 6).weights().isZero());

    const auto dense = sample_directed_sbm(Matrix::Ones(2, 2), nsbm::testing::balanced_labels(400, 2, 3), 1);
    const auto half = sample_nominated(dense, Matrix::Ones(2, 2), nsbm::testing::balanced_labels(400, 2, 3),
                                       NominationFunctionSet::constant(400, 0.5), 8);
    const double sigma = std::sqrt(0.25 / 399.0);
    int outside = 0;
    for (Index i = 0; i < 400; ++i)
        if (std::abs(half.weights().row(i).sum() / 399.0 - 0.5) > 3.0 * sigma) ++outside;
    CHECK(outside <= 4);
    CHECK(((A.weights() - sample_nominated(A, B, labels, NominationFunctionSet::constant(40, 0.3), 2).weights())
               .array() >= 0.0)
              .all());

    Matrix weighted = A.weights();
    weighted(0, 1) = 2.0;
    CHECK_THROWS_AS(sample_nominated(DirectedGraph(weighted), B, labels, NominationFunctionSet::constant(40, 1.0), 1),
                    DomainError);
}

TEST_CASE("nsbm edge frequencies match the population matrix") {
    const auto p = small_params();
    const Matrix P = expected_matrix(p);
    const int reps = 5000;
    Matrix freq = Matrix::Zero(6, 6);
    for (int r = 0; r < reps; ++r) freq += sample_nsbm(p, static_cast<std::uint64_t>(r)).weights();
    freq /= reps;
    for (Index i = 0; i < 6; ++i)
        for (Index j = 0; j < 6; ++j) {
            if (i == j) continue;
            const double sd = std::sqrt(P(i, j) * (1 - P(i, j)) / reps);
            CHECK(std::abs(freq(i, j) - P(i, j)) <= 4.0 * sd + 1e-12);
        }
}

TEST_CASE("nsbm sampling matches the two-stage nomination construction") {
    const NsbmParams p = small_params();
    const auto power = NominationFunctionSet::power(p.theta, p.lambda);
    const Matrix P = expected_matrix(p);
    const int reps = 5000;
    Matrix freq = Matrix::Zero(6, 6);
    for (int r = 0; r < reps; ++r) {
        const auto A = sample_directed_sbm(p.B, p.labels, derive_key(r, 1));
        freq += sample_nominated(A, p.B, p.labels, power, derive_key(r, 2)).weights();
    }
    freq /= reps;
    for (Index i = 0; i < 6; ++i)
        for (Index j = 0; j < 6; ++j)
            if (i != j) CHECK(std::abs(freq(i, j) - P(i, j)) <= 4.0 * std::sqrt(P(i, j) * (1 - P(i, j)) / reps) + 1e-12);
}

TEST_CASE("nsbm sampling refuses probabilities above one") {
    auto p = small_params();
    p.theta *= 3.0;
    CHECK_THROWS_AS(sample_nsbm(p, 1), DomainError);
    CHECK_NOTHROW(sample_nsbm_poisson(p, 1));
}

TEST_CASE("poisson means and variances") {
    auto p = small_params();
    p.theta *= 4.0;
    p.B(0, 1) = 0.0;
    const Matrix P = expected_matrix(p);
    const int reps = 5000;
    Matrix sum = Matrix::Zero(6, 6), sq = Matrix::Zero(6, 6);
    for (int r = 0; r < reps; ++r) {
        const Matrix W = sample_nsbm_poisson(p, static_cast<std::uint64_t>(r)).weights();
        sum += W;
        sq += W.cwiseProduct(W);
    }
    const Matrix mean = sum / reps;
    const Matrix var = (sq / reps - mean.cwiseProduct(mean)) * (reps / (reps - 1.0));
    CHECK(mean.block(0, 3, 3, 3).isZero());
    for (Index i = 0; i < 6; ++i)
        for (Index j = 0; j < 6; ++j) {
            if (i == j || P(i, j) == 0.0) continue;
            const double mu = P(i, j);
            CHECK(std::abs(mean(i, j) - mu) <= 4.0 * std::sqrt(mu / reps));
            // Var of the sample variance of a Poisson is about (mu + 2 mu^2) / reps.
            CHECK(std::abs(var(i, j) - mu) <= 4.0 * std::sqrt((mu + 2 * mu * mu) / reps));
        }
}

TEST_CASE("simulation parameters") {
    SimDesign d;
    d.n = 1200;
    const auto p = make_sim_params(d, 3);
    CHECK(p.labels.all_nonempty());
    for (const auto& g : p.labels.groups()) {
        double s = 0.0;
        for (Index i : g) s += p.lambda(i);
        CHECK(std::abs(s / static_cast<double>(g.size()) - 1.0) < 1e-12);
    }
    CHECK(validate_nsbm_params(p).identifiable());
    const Matrix P = expected_matrix(p);
    CHECK(std::abs(P.rowwise().sum().mean() - 50.0) < 1e-9);
    const double realized = sample_nsbm(p, 4).weights().rowwise().sum().mean();
    CHECK(std::abs(realized / 50.0 - 1.0) < 0.05);

    // Theta takes exactly the two calibrated values.
    for (Index i = 0; i < p.size(); ++i) {
        const double r = p.theta(i) / p.rho;
        CHECK((std::abs(r - 1.0) < 1e-12 || std::abs(r - 0.05) < 1e-12));
    }

    d.t = 0.0;
    CHECK((make_sim_params(d, 3).lambda.array() == 1.0).all());
}

TEST_CASE("weighted calibration") {
    SimDesign d;
    d.n = 1200;
    d.weighted = true;
    const auto p = make_sim_params(d, 5);
    CHECK(std::abs(expected_matrix(p).rowwise().sum().mean() - 250.0) < 1e-9);
    const double realized = sample_design(d, p, 6).weights().rowwise().sum().mean();
    CHECK(std::abs(realized / 250.0 - 1.0) < 0.05);
}

TEST_CASE("binary calibration overflow is an error") {
    SimDesign d;
    d.n = 100;
    d.target_avg_degree = 95;
    CHECK_THROWS_AS(make_sim_params(d, 1), DomainError);
}

TEST_CASE("design json") {
    SimDesign d;
    d.n = 321;
    d.beta = 0.4;
    d.weighted = true;
    const nlohmann::json j = d;
    const auto back = j.get<SimDesign>();
    CHECK(back.n == 321);
    CHECK(back.beta == 0.4);
    CHECK(back.weighted);
    CHECK(nlohmann::json::parse(R"({"t": 0.5})").get<SimDesign>().n == 600);
    CHECK_THROWS_AS(nlohmann::json::parse(R"({"bogus": 1})").get<SimDesign>(), DataError);
    CHECK_THROWS_AS(validate(nlohmann::json::parse(R"({"beta": 1.5})").get<SimDesign>()), DomainError);
}

TEST_CASE("parameter json") {
    const auto p = nsbm::testing::random_params(9, 3, 2);
    const nlohmann::json j = p;
    const auto back = j.get<NsbmParams>();
    CHECK(back.labels == p.labels);
    CHECK(back.B == p.B);
    CHECK(back.theta == p.theta);
    CHECK(back.lambda == p.lambda);

    const auto compact = nlohmann::json::parse(R"({"B": [[1, 0.5], [0.2, 1]], "sizes": [2, 3],
                                                   "theta": [0.4, 0.2], "lambda": [1, 1]})")
                             .get<NsbmParams>();
    CHECK(compact.labels.values() == std::vector<int>{0, 0, 1, 1, 1});
    CHECK(compact.theta(4) == 0.2);
    CHECK_THROWS_AS(nlohmann::json::parse(R"({"B": [[1]], "sizes": [2], "labels": [1, 1], "theta": [1],
                                              "lambda": [1]})")
                        .get<NsbmParams>(),
                    DataError);
}

}

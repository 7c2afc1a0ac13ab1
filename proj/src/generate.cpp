#include "nsbm/generate.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nsbm/rng.hpp"

namespace nsbm {

namespace {

void check_probabilities(const Matrix& B) {
    if (!((B.array() >= 0.0).all() && (B.array() <= 1.0).all()))
        throw DomainError("B entries must lie in [0, 1]");
}

void check_labels(const Matrix& B, const LabelVector& labels) {
    if (B.rows() != labels.K() || B.cols() != labels.K()) throw DimensionError("block matrix must be K x K");
}

double edge_uniform(std::uint64_t seed, Stream s, Index i, Index j) {
    return counter_uniform(seed, s, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
}

}  // namespace

void validate(const SimDesign& d) {
    if (d.K < 1) throw DomainError("design K must be at least 1");
    if (d.n < d.K) throw DomainError("design needs at least K nodes");
    if (!(d.beta > 0.0 && d.beta < 1.0)) throw DomainError("design beta must lie in (0, 1)");
    if (!(d.t >= 0.0)) throw DomainError("design t must be non-negative");
    if (!(d.theta_low_factor > 0.0)) throw DomainError("theta_low_factor must be positive");
    if (!(d.target() > 0.0)) throw DomainError("design target must be positive");
}

void to_json(nlohmann::json& j, const SimDesign& d) {
    j = nlohmann::json{{"n", d.n},
                       {"K", d.K},
                       {"beta", d.beta},
                       {"t", d.t},
                       {"theta_low_factor", d.theta_low_factor},
                       {"target_avg_degree", d.target_avg_degree},
                       {"target_avg_rowsum", d.target_avg_rowsum},
                       {"weighted", d.weighted},
                       {"seed", d.seed}};
}

void from_json(const nlohmann::json& j, SimDesign& d) {
    if (!j.is_object()) throw DataError("design must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "n") d.n = value.get<Index>();
        else if (key == "K") d.K = value.get<int>();
        else if (key == "beta") d.beta = value.get<double>();
        else if (key == "t") d.t = value.get<double>();
        else if (key == "theta_low_factor") d.theta_low_factor = value.get<double>();
        else if (key == "target_avg_degree") d.target_avg_degree = value.get<double>();
        else if (key == "target_avg_rowsum") d.target_avg_rowsum = value.get<double>();
        else if (key == "weighted") d.weighted = value.get<bool>();
        else if (key == "seed") d.seed = value.get<std::uint64_t>();
        else throw DataError("unknown design field '" + key + "'");
    }
}

void to_json(nlohmann::json& j, const NsbmParams& p) {
    nlohmann::json B = nlohmann::json::array();
    for (Index r = 0; r < p.B.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(p.B.cols()));
        for (Index c = 0; c < p.B.cols(); ++c) row[static_cast<std::size_t>(c)] = p.B(r, c);
        B.push_back(row);
    }
    j = nlohmann::json{{"B", std::move(B)},
                       {"labels", p.labels.one_based()},
                       {"theta", std::vector<double>(p.theta.begin(), p.theta.end())},
                       {"lambda", std::vector<double>(p.lambda.begin(), p.lambda.end())},
                       {"rho", p.rho}};
}

void from_json(const nlohmann::json& j, NsbmParams& p) {
    if (!j.is_object()) throw DataError("parameters must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (key != "B" && key != "labels" && key != "sizes" && key != "theta" && key != "lambda" && key != "rho")
            throw DataError("unknown parameter field '" + key + "'");
    if (!j.contains("B") || !j.contains("theta") || !j.contains("lambda"))
        throw DataError("parameters need B, theta and lambda");
    if (j.contains("labels") == j.contains("sizes")) throw DataError("give exactly one of labels and sizes");

    const auto rows = j.at("B").get<std::vector<std::vector<double>>>();
    const auto K = static_cast<Index>(rows.size());
    Matrix B(K, K);
    for (Index r = 0; r < K; ++r) {
        if (static_cast<Index>(rows[static_cast<std::size_t>(r)].size()) != K) throw DataError("B must be square");
        for (Index c = 0; c < K; ++c) B(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }

    LabelVector labels;
    if (j.contains("labels")) {
        labels = LabelVector::from_one_based(j.at("labels").get<std::vector<int>>(), static_cast<int>(K));
    } else {
        const auto sizes = j.at("sizes").get<std::vector<Index>>();
        if (static_cast<Index>(sizes.size()) != K) throw DataError("sizes must have one entry per community");
        std::vector<int> v;
        for (std::size_t k = 0; k < sizes.size(); ++k) v.insert(v.end(), static_cast<std::size_t>(sizes[k]), static_cast<int>(k));
        labels = LabelVector(std::move(v), static_cast<int>(K));
    }

    const Index n = labels.size();
    auto per_node = [&](const char* name) {
        const auto raw = j.at(name).get<std::vector<double>>();
        Vector out(n);
        if (static_cast<Index>(raw.size()) == n) {
            for (Index i = 0; i < n; ++i) out(i) = raw[static_cast<std::size_t>(i)];
        } else if (static_cast<Index>(raw.size()) == K) {
            for (Index i = 0; i < n; ++i) out(i) = raw[static_cast<std::size_t>(labels[i])];
        } else {
            throw DataError(std::string(name) + " must have one entry per node or per community");
        }
        return out;
    };
    p.B = std::move(B);
    p.theta = per_node("theta");
    p.lambda = per_node("lambda");
    p.labels = std::move(labels);
    p.rho = j.value("rho", 1.0);
}

DirectedGraph sample_directed_sbm(const Matrix& B, const LabelVector& labels, std::uint64_t seed) {
    check_labels(B, labels);
    check_probabilities(B);
    const Index n = labels.size();
    Matrix A = Matrix::Zero(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            if (i != j && edge_uniform(seed, Stream::adjacency, i, j) < B(labels[i], labels[j])) A(i, j) = 1.0;
    return DirectedGraph(std::move(A));
}

DirectedGraph sample_nominated(const DirectedGraph& A, const Matrix& B, const LabelVector& labels,
                               const NominationFunctionSet& fns, std::uint64_t seed) {
    check_labels(B, labels);
    check_probabilities(B);
    const Index n = A.size();
    if (labels.size() != n || fns.size() != n) throw DimensionError("graph, labels and nomination functions differ in size");
    if (!A.is_binary()) throw DomainError("nomination masking expects a binary graph");

    // Nomination rates only depend on (i, community of j).
    Matrix rates(n, labels.K());
    for (Index i = 0; i < n; ++i)
        for (int l = 0; l < labels.K(); ++l) rates(i, l) = fns.rate(i, B(labels[i], l));

    Matrix observed = Matrix::Zero(n, n);
    const Matrix& w = A.weights();
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            if (w(i, j) != 0.0 && edge_uniform(seed, Stream::nomination, i, j) < rates(i, labels[j]))
                observed(i, j) = 1.0;
    return DirectedGraph(std::move(observed));
}

DirectedGraph sample_nsbm(const NsbmParams& params, std::uint64_t seed) {
    Matrix P = expected_matrix(params);
    const double pmax = P.size() ? P.maxCoeff() : 0.0;
    if (pmax > 1.0) {
        std::ostringstream os;
        os << "edge probability " << pmax << " exceeds 1; lower theta or the degree target";
        throw DomainError(os.str());
    }
    const Index n = P.rows();
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            P(i, j) = (i != j && edge_uniform(seed, Stream::nsbm, i, j) < P(i, j)) ? 1.0 : 0.0;
    return DirectedGraph(std::move(P));
}

DirectedGraph sample_nsbm_poisson(const NsbmParams& params, std::uint64_t seed) {
    Matrix P = expected_matrix(params);
    const Index n = P.rows();
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const double mean = P(i, j);
            if (mean < 0.0) throw DomainError("negative Poisson mean");
            if (i == j || mean == 0.0) {
                P(i, j) = 0.0;
                continue;
            }
            SplitMix64 rng(stream_key(seed, Stream::poisson, static_cast<std::uint64_t>(i),
                                      static_cast<std::uint64_t>(j)));
            std::poisson_distribution<int> draw(mean);
            P(i, j) = static_cast<double>(draw(rng));
        }
    }
    return DirectedGraph(std::move(P));
}

NsbmParams make_sim_params(const SimDesign& d, std::uint64_t seed) {
    validate(d);
    const Index n = d.n;
    const int K = d.K;

    // Uniform community assignment; redraw (new attempt counter) until every
    // community is populated.
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (std::uint64_t attempt = 0;; ++attempt) {
        std::vector<Index> counts(static_cast<std::size_t>(K), 0);
        for (Index i = 0; i < n; ++i) {
            const double u = counter_uniform(seed, Stream::labels, static_cast<std::uint64_t>(i), attempt);
            const int c = std::min(K - 1, static_cast<int>(u * K));
            labels[static_cast<std::size_t>(i)] = c;
            ++counts[static_cast<std::size_t>(c)];
        }
        if (std::all_of(counts.begin(), counts.end(), [](Index c) { return c > 0; })) break;
        if (attempt > 1000) throw DomainError("could not populate every community");
    }

    NsbmParams p;
    p.labels = LabelVector(std::move(labels), K);
    p.B = Matrix::Constant(K, K, d.beta);
    p.B.diagonal().setOnes();

    p.lambda.resize(n);
    for (Index i = 0; i < n; ++i) {
        const double u = counter_uniform(seed, Stream::lambda, static_cast<std::uint64_t>(i));
        p.lambda(i) = std::exp(d.t * (2.0 * u - 1.0));
    }
    for (const auto& g : p.labels.groups()) {
        double sum = 0.0;
        for (Index i : g) sum += p.lambda(i);
        const double scale = static_cast<double>(g.size()) / sum;
        for (Index i : g) p.lambda(i) *= scale;
    }

    Vector theta_bar(n);
    for (Index i = 0; i < n; ++i) {
        const double u = counter_uniform(seed, Stream::theta, static_cast<std::uint64_t>(i));
        theta_bar(i) = u < 0.5 ? 1.0 : d.theta_low_factor;
    }

    // Expected out-degree (or row sum) is linear in c:
    // sum_i theta_bar_i * sum_{j != i} B(c_i, c_j)^lambda_i.
    const auto sizes = p.labels.sizes();
    double total = 0.0;
    double max_unscaled = 0.0;
    for (Index i = 0; i < n; ++i) {
        const int ci = p.labels[i];
        double row = 0.0;
        for (int l = 0; l < K; ++l) {
            const double v = block_power(p.B(ci, l), p.lambda(i));
            const auto count = static_cast<double>(sizes[static_cast<std::size_t>(l)] - (l == ci ? 1 : 0));
            row += v * count;
            if (count > 0) max_unscaled = std::max(max_unscaled, theta_bar(i) * v);
        }
        total += theta_bar(i) * row;
    }
    if (!(total > 0.0)) throw DomainError("design has no possible edges");
    const double c = d.target() * static_cast<double>(n) / total;
    if (!d.weighted && c * max_unscaled > 1.0) {
        std::ostringstream os;
        os << "calibrated scale " << c << " gives an edge probability of " << c * max_unscaled
           << " > 1; lower target_avg_degree";
        throw DomainError(os.str());
    }
    p.theta = c * theta_bar;
    p.rho = c;
    return p;
}

DirectedGraph sample_design(const SimDesign& design, const NsbmParams& params, std::uint64_t seed) {
    return design.weighted ? sample_nsbm_poisson(params, seed) : sample_nsbm(params, seed);
}

}  // namespace nsbm

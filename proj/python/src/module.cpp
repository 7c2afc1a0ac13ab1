#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "nsbm/estimate.hpp"
#include "nsbm/generate.hpp"
#include "nsbm/harness.hpp"
#include "nsbm/metrics.hpp"
#include "nsbm/pipeline.hpp"
#include "nsbm/rng.hpp"
#include "nsbm/spectral.hpp"

namespace py = pybind11;
using namespace nsbm;

namespace {

LabelVector to_labels(const std::vector<int>& v, int K) {
    if (K <= 0) K = v.empty() ? 0 : *std::max_element(v.begin(), v.end()) + 1;
    return LabelVector(v, K);
}

NsbmParams to_params(const Matrix& B, const std::vector<int>& labels, const Vector& theta, const Vector& lambda) {
    NsbmParams p;
    p.labels = to_labels(labels, static_cast<int>(B.rows()));
    p.B = B;
    p.theta = theta;
    p.lambda = lambda;
    return p;
}

KMeansConfig kmeans_config(std::uint64_t seed, int restarts) {
    KMeansConfig c;
    c.seed = seed;
    c.restarts = restarts;
    return c;
}

py::dict params_dict(const NsbmParams& p) {
    py::dict d;
    d["B"] = p.B;
    d["labels"] = p.labels.values();
    d["theta"] = p.theta;
    d["lambda"] = p.lambda;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Nomination stochastic block model: simulation, spectral clustering and estimation.";

    static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

    m.def(
        "expected_matrix",
        [](const Matrix& B, const std::vector<int>& labels, const Vector& theta, const Vector& lambda, bool keep_diagonal) {
            return expected_matrix(to_params(B, labels, theta, lambda), keep_diagonal ? Diagonal::keep : Diagonal::zero);
        },
        py::arg("B"), py::arg("labels"), py::arg("theta"), py::arg("lambda_"), py::arg("keep_diagonal") = false);

    m.def(
        "sample_nsbm",
        [](const Matrix& B, const std::vector<int>& labels, const Vector& theta, const Vector& lambda, std::uint64_t seed,
           bool poisson) {
            const auto p = to_params(B, labels, theta, lambda);
            return (poisson ? sample_nsbm_poisson(p, seed) : sample_nsbm(p, seed)).weights();
        },
        py::arg("B"), py::arg("labels"), py::arg("theta"), py::arg("lambda_"), py::arg("seed"), py::arg("poisson") = false);

    m.def(
        "simulate",
        [](std::uint64_t seed, Index n, int K, double beta, double t, bool weighted, double theta_low_factor,
           std::optional<double> target) {
            SimDesign d;
            d.n = n;
            d.K = K;
            d.beta = beta;
            d.t = t;
            d.weighted = weighted;
            d.theta_low_factor = theta_low_factor;
            if (target) (weighted ? d.target_avg_rowsum : d.target_avg_degree) = *target;
            validate(d);
            const auto p = make_sim_params(d, derive_key(seed, 1));
            auto out = params_dict(p);
            out["A"] = sample_design(d, p, derive_key(seed, 2)).weights();
            return out;
        },
        py::arg("seed"), py::arg("n") = 600, py::arg("K") = 3, py::arg("beta") = 0.2, py::arg("t") = 1.5,
        py::arg("weighted") = false, py::arg("theta_low_factor") = 0.05, py::arg("target") = py::none());

    m.def(
        "cluster",
        [](const Matrix& A, int K, const std::string& method, std::uint64_t seed, int restarts) {
            return cluster(A, K, parse_cluster_method(method), kmeans_config(seed, restarts))
                .values();
        },
        py::arg("A"), py::arg("K"), py::arg("method") = "right_sc", py::arg("seed") = 1, py::arg("restarts") = 20);

    m.def(
        "estimate_nsbm",
        [](const Matrix& A, const std::vector<int>& labels, int K, const std::string& psi_rule) {
            const auto est = estimate_nsbm(DirectedGraph(A), to_labels(labels, K), {parse_psi_rule(psi_rule)});
            py::dict d;
            d["theta"] = est.theta;
            d["lambda"] = est.lambda;
            d["B"] = est.B;
            d["psi"] = est.psi;
            d["failed"] = est.failed;
            d["M"] = connection_strength(est);
            d["P"] = est.ok() ? py::cast(reconstruct_p(est).P) : py::none();
            return d;
        },
        py::arg("A"), py::arg("labels"), py::arg("K") = 0, py::arg("psi_rule") = "nonzero_block");

    m.def(
        "estimate_baseline",
        [](const Matrix& A, int K, const std::string& model, std::uint64_t seed) {
            return estimate_baseline(DirectedGraph(A).weights(), K, parse_baseline_model(model), kmeans_config(seed, 20));
        },
        py::arg("A"), py::arg("K"), py::arg("model") = "dsbm", py::arg("seed") = 1);

    m.def(
        "misclustering",
        [](const std::vector<int>& pred, const std::vector<int>& truth) {
            const int K = std::max(to_labels(pred, 0).K(), to_labels(truth, 0).K());
            const auto r = misclustering(LabelVector(pred, K), LabelVector(truth, K));
            py::dict d;
            d["rate"] = r.rate;
            d["per_community"] = r.per_community;
            d["permutation"] = r.permutation;
            return d;
        },
        py::arg("pred"), py::arg("truth"));

    m.def("relative_frobenius", &relative_frobenius, py::arg("P_hat"), py::arg("P_tilde"));

    m.def(
        "preprocess",
        [](const Matrix& A, int min_degree, double weight_cap, bool iterate) {
            const auto r = preprocess(DirectedGraph(A), {min_degree, weight_cap, iterate});
            return py::make_tuple(r.graph.weights(), r.kept, r.removed);
        },
        py::arg("A"), py::arg("min_degree") = 4, py::arg("weight_cap") = 2.0, py::arg("iterate") = false);

    m.def(
        "analyze_json",
        [](const Matrix& A, int K, const std::string& method, std::uint64_t seed) {
            AnalyzeOptions opts;
            opts.method = parse_cluster_method(method);
            opts.kmeans.seed = seed;
            return report_json(analyze(DirectedGraph(A), K, opts), {}).dump();
        },
        py::arg("A"), py::arg("K"), py::arg("method") = "right_sc", py::arg("seed") = 1);

    m.def(
        "run_sweep_json",
        [](const std::string& config, int jobs) {
            const auto cfg = nlohmann::json::parse(config).get<ExperimentConfig>();
            SweepResult result;
            {
                py::gil_scoped_release release;
                result = run_sweep(cfg, jobs);
            }
            std::ostringstream csv;
            write_results_csv(csv, result.rows);
            return py::make_tuple(csv.str(), summary_json(result).dump());
        },
        py::arg("config"), py::arg("jobs") = 1);
}

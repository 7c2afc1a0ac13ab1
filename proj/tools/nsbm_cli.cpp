#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "nsbm/estimate.hpp"
#include "nsbm/generate.hpp"
#include "nsbm/harness.hpp"
#include "nsbm/pipeline.hpp"
#include "nsbm/rng.hpp"
#include "nsbm/spectral.hpp"

namespace {

enum Exit { ok = 0, usage = 1, data = 2, numerical = 3 };

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw nsbm::DataError("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw nsbm::DataError(path + ": " + e.what());
    }
}

std::ofstream create(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw nsbm::DataError("cannot write '" + path + "'");
    return out;
}

struct GenerateArgs {
    std::string design, params, out, labels_out;
    std::uint64_t seed = 1;
    bool poisson = false;
};

int run_generate(const GenerateArgs& a) {
    nsbm::NsbmParams params;
    nsbm::DirectedGraph graph;
    if (!a.design.empty()) {
        const auto design = read_json(a.design).get<nsbm::SimDesign>();
        params = nsbm::make_sim_params(design, nsbm::derive_key(a.seed, 1));
        graph = nsbm::sample_design(design, params, nsbm::derive_key(a.seed, 2));
    } else {
        params = read_json(a.params).get<nsbm::NsbmParams>();
        const auto report = nsbm::validate_nsbm_params(params);
        for (const auto& v : report.violations) std::cerr << "warning: " << v.message << '\n';
        graph = a.poisson ? nsbm::sample_nsbm_poisson(params, a.seed) : nsbm::sample_nsbm(params, a.seed);
    }
    auto out = create(a.out);
    nsbm::write_edge_list(out, nsbm::to_edge_list(graph));
    if (!a.labels_out.empty()) {
        std::vector<std::string> ids;
        for (nsbm::Index i = 0; i < graph.size(); ++i) ids.push_back(std::to_string(i + 1));
        auto lout = create(a.labels_out);
        nsbm::write_labels(lout, ids, params.labels);
    }
    return ok;
}

struct DetectArgs {
    std::string in, out, method = "right_sc";
    int k = 2;
    std::uint64_t seed = 1;
};

int run_detect(const DetectArgs& a) {
    const auto edges = nsbm::load_edge_list(a.in);
    nsbm::KMeansConfig cfg;
    cfg.seed = a.seed;
    const auto labels = nsbm::cluster(edges.to_graph().weights(), a.k, nsbm::parse_cluster_method(a.method), cfg);
    auto out = create(a.out);
    nsbm::write_labels(out, edges.ids, labels);
    return ok;
}

struct EstimateArgs {
    std::string in, labels, out, psi_rule = "nonzero_block";
};

int run_estimate(const EstimateArgs& a) {
    const auto edges = nsbm::load_edge_list(a.in);
    std::ifstream lin(a.labels);
    if (!lin) throw nsbm::DataError("cannot open '" + a.labels + "'");
    const auto labels = nsbm::read_labels(lin, edges.ids);
    nsbm::EstimateOptions opts;
    opts.psi_rule = nsbm::parse_psi_rule(a.psi_rule);
    const auto est = nsbm::estimate_nsbm(edges.to_graph(), labels, opts);
    nlohmann::json j = est;
    j["ids"] = edges.ids;
    create(a.out) << j.dump(2) << '\n';
    if (!est.ok()) {
        std::cerr << "estimation failed for " << est.failed.size() << " communit"
                  << (est.failed.size() == 1 ? "y" : "ies") << '\n';
        return numerical;
    }
    return ok;
}

struct SimulateArgs {
    std::string config, out, summary;
    int jobs = 1;
    bool full_scale = false, timing = false;
};

int run_simulate(const SimulateArgs& a) {
    auto cfg = read_json(a.config).get<nsbm::ExperimentConfig>();
    if (a.full_scale) cfg.apply_full_scale();
    if (a.timing) cfg.options.timing = true;
    const std::string out_path = a.out.empty() ? cfg.output : a.out;
    if (out_path.empty()) throw CLI::ValidationError("--out", "no output path given");
    const auto result = nsbm::run_sweep(cfg, a.jobs);
    auto out = create(out_path);
    nsbm::write_results_csv(out, result.rows);
    if (!a.summary.empty()) create(a.summary) << nsbm::summary_json(result).dump(2) << '\n';
    return ok;
}

struct AnalyzeArgs {
    std::string in, out, scores, method = "right_sc";
    int k = 4, min_degree = 4;
    double weight_cap = 2.0;
    bool iterate = false;
    std::uint64_t seed = 1;
};

int run_analyze(const AnalyzeArgs& a) {
    const auto edges = nsbm::load_edge_list(a.in);
    nsbm::PreprocessOptions popts{a.min_degree, a.weight_cap, a.iterate};
    const auto pre = nsbm::preprocess(edges.to_graph(), popts);
    std::vector<std::string> ids;
    for (auto i : pre.kept) ids.push_back(edges.ids[static_cast<std::size_t>(i)]);

    std::vector<double> scores;
    std::vector<std::string> unmatched;
    if (!a.scores.empty()) {
        std::ifstream sin(a.scores);
        if (!sin) throw nsbm::DataError("cannot open '" + a.scores + "'");
        auto table = nsbm::read_scores(sin);
        scores.assign(ids.size(), std::numeric_limits<double>::quiet_NaN());
        for (std::size_t i = 0; i < ids.size(); ++i)
            if (auto it = table.find(ids[i]); it != table.end()) {
                scores[i] = it->second;
                table.erase(it);
            }
        for (const auto& [id, s] : table) unmatched.push_back(id);
    }

    nsbm::AnalyzeOptions opts;
    opts.method = nsbm::parse_cluster_method(a.method);
    opts.kmeans.seed = a.seed;
    auto report = nsbm::analyze(pre.graph, a.k, opts, scores);
    report.unmatched_scores = std::move(unmatched);

    auto j = nsbm::report_json(report, ids);
    nlohmann::json removed = nlohmann::json::array();
    for (auto i : pre.removed) removed.push_back(edges.ids[static_cast<std::size_t>(i)]);
    j["preprocess"] = {{"min_degree", a.min_degree},
                       {"weight_cap", a.weight_cap},
                       {"iterate", a.iterate},
                       {"rounds", pre.rounds},
                       {"removed", std::move(removed)},
                       {"self_loops_dropped", edges.self_loops_dropped}};
    create(a.out) << j.dump(2) << '\n';
    for (const auto& note : report.notes) std::cerr << "warning: " << note << '\n';
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nomination stochastic block model toolkit"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Sample a graph and write it as an edge list");
    auto* g_design = g->add_option("--design", gen.design, "Simulation design JSON")->check(CLI::ExistingFile);
    auto* g_params = g->add_option("--params", gen.params, "Model parameter JSON")->check(CLI::ExistingFile);
    g_design->excludes(g_params);
    g->add_option("--seed", gen.seed, "Random seed");
    g->add_option("--out", gen.out, "Edge list CSV")->required();
    g->add_option("--labels-out", gen.labels_out, "True community labels CSV");
    g->add_flag("--poisson", gen.poisson, "Poisson edge weights (with --params)");

    DetectArgs det;
    auto* d = app.add_subcommand("detect", "Cluster the nodes of a directed graph");
    d->add_option("--in", det.in, "Edge list CSV")->required()->check(CLI::ExistingFile);
    d->add_option("--k", det.k, "Number of communities")->required()->check(CLI::PositiveNumber);
    d->add_option("--method", det.method, "right_sc|right_smst|left_sc|left_ssc|symmetric_sc|symmetric_ssc");
    d->add_option("--seed", det.seed, "K-means seed");
    d->add_option("--out", det.out, "Labels CSV")->required();

    EstimateArgs est;
    auto* e = app.add_subcommand("estimate", "Fit the nomination model under given labels");
    e->add_option("--in", est.in, "Edge list CSV")->required()->check(CLI::ExistingFile);
    e->add_option("--labels", est.labels, "Labels CSV")->required()->check(CLI::ExistingFile);
    e->add_option("--psi-rule", est.psi_rule, "strict|relaxed|nonzero_block");
    e->add_option("--out", est.out, "Estimate JSON")->required();

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Run a Monte Carlo sweep");
    s->add_option("--config", sim.config, "Experiment JSON")->required()->check(CLI::ExistingFile);
    s->add_option("--out", sim.out, "Results CSV (defaults to the config's output)");
    s->add_option("--summary", sim.summary, "Summary JSON");
    s->add_option("--jobs", sim.jobs, "Worker threads")->check(CLI::PositiveNumber);
    s->add_flag("--full-scale", sim.full_scale, "n = 1200 and 100 replications");
    s->add_flag("--timing", sim.timing, "Fill the ms column");

    AnalyzeArgs ana;
    auto* a = app.add_subcommand("analyze", "Preprocess, cluster, fit and report");
    a->add_option("--in", ana.in, "Edge list CSV")->required()->check(CLI::ExistingFile);
    a->add_option("--k", ana.k, "Number of communities")->required();
    a->add_option("--min-degree", ana.min_degree, "Minimum in- and out-degree");
    a->add_option("--weight-cap", ana.weight_cap, "Value for weights above 1 (0 keeps weights)");
    a->add_flag("--iterate-filter", ana.iterate, "Repeat the degree filter to a fixed point");
    a->add_option("--scores", ana.scores, "External scores CSV (id,score)")->check(CLI::ExistingFile);
    a->add_option("--method", ana.method, "Clustering method");
    a->add_option("--seed", ana.seed, "K-means seed");
    a->add_option("--out", ana.out, "Report JSON")->required();

    try {
        app.parse(argc, argv);
        if (g->parsed() && gen.design.empty() == gen.params.empty())
            throw CLI::ValidationError("generate", "give exactly one of --design and --params");
        if (a->parsed() && ana.k < 2) throw CLI::ValidationError("--k", "analysis needs K >= 2");
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? ok : usage;
    }

    try {
        if (g->parsed()) return run_generate(gen);
        if (d->parsed()) return run_detect(det);
        if (e->parsed()) return run_estimate(est);
        if (s->parsed()) return run_simulate(sim);
        if (a->parsed()) return run_analyze(ana);
    } catch (const CLI::ParseError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return usage;
    } catch (const nsbm::NumericalError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return numerical;
    } catch (const nsbm::Error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return data;
    } catch (const nlohmann::json::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return data;
    }
    return usage;
}

#include "nsbm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "nsbm/metrics.hpp"
#include "nsbm/rng.hpp"

namespace nsbm {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string_view to_string(RowKind k) { return k == RowKind::method ? "method" : "estimator"; }

}  // namespace

std::string_view to_string(SweepVar v) { return v == SweepVar::t ? "t" : "beta"; }

std::string_view to_string(EstimatorKind e) {
    switch (e) {
        case EstimatorKind::nsbm: return "nsbm";
        case EstimatorKind::dsbm: return "dsbm";
        case EstimatorKind::dcsbm: return "dcsbm";
        case EstimatorKind::scbm: return "scbm";
    }
    return "unknown";
}

SweepVar parse_sweep_var(std::string_view name) {
    if (name == "t") return SweepVar::t;
    if (name == "beta") return SweepVar::beta;
    throw DomainError("unknown sweep variable '" + std::string(name) + "'");
}

EstimatorKind parse_estimator(std::string_view name) {
    for (auto e : {EstimatorKind::nsbm, EstimatorKind::dsbm, EstimatorKind::dcsbm, EstimatorKind::scbm})
        if (to_string(e) == name) return e;
    throw DomainError("unknown estimator '" + std::string(name) + "'");
}

std::string_view to_string(PsiRule r) {
    switch (r) {
        case PsiRule::strict: return "strict";
        case PsiRule::relaxed: return "relaxed";
        case PsiRule::nonzero_block: return "nonzero_block";
    }
    return "unknown";
}

PsiRule parse_psi_rule(std::string_view name) {
    for (auto r : {PsiRule::strict, PsiRule::relaxed, PsiRule::nonzero_block})
        if (to_string(r) == name) return r;
    throw DomainError("unknown psi rule '" + std::string(name) + "'");
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// ExperimentConfig

void ExperimentConfig::apply_full_scale() {
    design.n = 1200;
    replications = 100;
}

void validate(const ExperimentConfig& cfg) {
    validate(cfg.design);
    if (cfg.grid.empty()) throw DomainError("experiment grid must not be empty");
    if (cfg.replications < 1) throw DomainError("experiment needs at least one replication");
    if (cfg.options.kmeans_restarts < 1) throw DomainError("kmeans_restarts must be positive");
    for (double v : cfg.grid) {
        SimDesign d = cfg.design;
        (cfg.sweep == SweepVar::t ? d.t : d.beta) = v;
        validate(d);
    }
}

void to_json(nlohmann::json& j, const ExperimentConfig& cfg) {
    nlohmann::json methods = nlohmann::json::array();
    for (auto m : cfg.methods) methods.push_back(std::string(to_string(m)));
    nlohmann::json estimators = nlohmann::json::array();
    for (auto e : cfg.estimators) estimators.push_back(std::string(to_string(e)));
    j = nlohmann::json{{"design", cfg.design},
                       {"sweep", std::string(to_string(cfg.sweep))},
                       {"grid", cfg.grid},
                       {"replications", cfg.replications},
                       {"methods", std::move(methods)},
                       {"estimators", std::move(estimators)},
                       {"seed", cfg.master_seed},
                       {"output", cfg.output},
                       {"psi_rule", std::string(to_string(cfg.options.psi_rule))},
                       {"kmeans_restarts", cfg.options.kmeans_restarts}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& cfg) {
    if (!j.is_object()) throw DataError("experiment config must be a JSON object");
    bool full_scale = false;
    for (const auto& [key, value] : j.items()) {
        if (key == "design") cfg.design = value.get<SimDesign>();
        else if (key == "sweep") cfg.sweep = parse_sweep_var(value.get<std::string>());
        else if (key == "grid") cfg.grid = value.get<std::vector<double>>();
        else if (key == "replications") cfg.replications = value.get<int>();
        else if (key == "methods") {
            cfg.methods.clear();
            for (const auto& m : value) cfg.methods.push_back(parse_cluster_method(m.get<std::string>()));
        } else if (key == "estimators") {
            cfg.estimators.clear();
            for (const auto& e : value) cfg.estimators.push_back(parse_estimator(e.get<std::string>()));
        } else if (key == "seed") cfg.master_seed = value.get<std::uint64_t>();
        else if (key == "output") cfg.output = value.get<std::string>();
        else if (key == "psi_rule") cfg.options.psi_rule = parse_psi_rule(value.get<std::string>());
        else if (key == "kmeans_restarts") cfg.options.kmeans_restarts = value.get<int>();
        else if (key == "full_scale") full_scale = value.get<bool>();
        else throw DataError("unknown experiment field '" + key + "'");
    }
    if (full_scale) cfg.apply_full_scale();
}

// ---------------------------------------------------------------------------
// Replications

std::uint64_t replication_seed(std::uint64_t master_seed, std::size_t grid_index, int rep) {
    return stream_key(master_seed, Stream::replication, grid_index, static_cast<std::uint64_t>(rep));
}

std::vector<ResultRow> run_replication(const SimDesign& design, const std::vector<ClusterMethod>& methods,
                                       const std::vector<EstimatorKind>& estimators, std::uint64_t seed,
                                       const ReplicationOptions& opts) {
    std::vector<ResultRow> rows;
    auto blank = [&](RowKind kind, std::string name) {
        ResultRow r;
        r.kind = kind;
        r.name = std::move(name);
        return r;
    };

    NsbmParams params;
    DirectedGraph graph;
    Matrix P_true;
    try {
        params = make_sim_params(design, derive_key(seed, 1));
        graph = sample_design(design, params, derive_key(seed, 2));
        P_true = expected_matrix(params);
    } catch (const Error& e) {
        for (auto m : methods) rows.push_back(blank(RowKind::method, std::string(to_string(m))));
        for (auto est : estimators) rows.push_back(blank(RowKind::estimator, std::string(to_string(est))));
        for (auto& r : rows) {
            r.fail = true;
            r.error = e.what();
        }
        return rows;
    }

    const Matrix& A = graph.weights();
    const int K = design.K;
    KMeansConfig kcfg;
    kcfg.restarts = opts.kmeans_restarts;
    kcfg.seed = derive_key(seed, 3);

    // Labels are shared between method rows and the estimators that need them.
    std::map<ClusterMethod, LabelVector> cache;
    std::map<ClusterMethod, std::string> cache_error;
    auto labels_for = [&](ClusterMethod m) -> const LabelVector& {
        if (auto it = cache.find(m); it != cache.end()) return it->second;
        if (auto it = cache_error.find(m); it != cache_error.end()) throw NumericalError(it->second);
        try {
            return cache.emplace(m, cluster(A, K, m, kcfg)).first->second;
        } catch (const Error& e) {
            cache_error.emplace(m, e.what());
            throw;
        }
    };

    for (auto m : methods) {
        ResultRow r = blank(RowKind::method, std::string(to_string(m)));
        const auto start = Clock::now();
        try {
            const Misclustering mc = misclustering(labels_for(m), params.labels);
            r.accuracy = mc.accuracy();
            r.percomm_err = mc.per_community;
        } catch (const Error& e) {
            r.fail = true;
            r.error = e.what();
        }
        if (opts.timing) r.ms = elapsed_ms(start);
        rows.push_back(std::move(r));
    }

    for (auto est : estimators) {
        ResultRow r = blank(RowKind::estimator, std::string(to_string(est)));
        const auto start = Clock::now();
        try {
            Matrix P_hat;
            switch (est) {
                case EstimatorKind::nsbm: {
                    EstimateOptions eo;
                    eo.psi_rule = opts.psi_rule;
                    P_hat = reconstruct_p(estimate_nsbm(A, labels_for(ClusterMethod::right_sc), eo)).P;
                    break;
                }
                case EstimatorKind::dsbm:
                    P_hat = block_mean_estimate(A, labels_for(ClusterMethod::symmetric_sc));
                    break;
                case EstimatorKind::dcsbm: {
                    const LabelVector& l = labels_for(ClusterMethod::symmetric_sc);
                    P_hat = degree_corrected_estimate(A, l, l);
                    break;
                }
                case EstimatorKind::scbm:
                    P_hat = degree_corrected_estimate(A, labels_for(ClusterMethod::left_ssc),
                                                      labels_for(ClusterMethod::right_sc));
                    break;
            }
            r.rel_err = relative_frobenius(P_hat, P_true);
        } catch (const Error& e) {
            r.fail = true;
            r.error = e.what();
        }
        if (opts.timing) r.ms = elapsed_ms(start);
        rows.push_back(std::move(r));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Sweeps

SweepResult run_sweep(const ExperimentConfig& cfg, int jobs) {
    validate(cfg);
    const std::size_t cells = cfg.grid.size() * static_cast<std::size_t>(cfg.replications);
    std::vector<std::vector<ResultRow>> slots(cells);

    auto work = [&](std::size_t task) {
        const std::size_t g = task / static_cast<std::size_t>(cfg.replications);
        const int rep = static_cast<int>(task % static_cast<std::size_t>(cfg.replications));
        SimDesign d = cfg.design;
        (cfg.sweep == SweepVar::t ? d.t : d.beta) = cfg.grid[g];
        auto rows = run_replication(d, cfg.methods, cfg.estimators, replication_seed(cfg.master_seed, g, rep),
                                    cfg.options);
        for (auto& r : rows) {
            r.sweep = cfg.sweep;
            r.value = cfg.grid[g];
            r.rep = rep;
        }
        slots[task] = std::move(rows);
    };

    const auto workers = static_cast<std::size_t>(std::max(1, jobs));
    if (workers == 1) {
        for (std::size_t t = 0; t < cells; ++t) work(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < std::min(workers, cells); ++w)
            pool.emplace_back([&] {
                for (std::size_t t = next++; t < cells; t = next++) work(t);
            });
    }

    SweepResult out;
    out.sweep = cfg.sweep;
    for (auto& s : slots)
        for (auto& r : s) out.rows.push_back(std::move(r));
    out.summary = summarize(out.rows);
    return out;
}

std::vector<SummaryCell> summarize(const std::vector<ResultRow>& rows) {
    struct Acc {
        SummaryCell cell;
        std::vector<double> acc, pc, rel;
    };
    // Keyed by first appearance so the summary follows the row order.
    std::vector<Acc> cells;
    std::map<std::tuple<double, int, std::string>, std::size_t> index;
    for (const auto& r : rows) {
        const auto key = std::make_tuple(r.value, static_cast<int>(r.kind), r.name);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, cells.size()).first;
            Acc a;
            a.cell.value = r.value;
            a.cell.kind = r.kind;
            a.cell.name = r.name;
            cells.push_back(std::move(a));
        }
        Acc& a = cells[it->second];
        if (r.fail) {
            ++a.cell.failures;
            continue;
        }
        ++a.cell.n_ok;
        if (r.accuracy) a.acc.push_back(*r.accuracy);
        if (r.percomm_err) a.pc.push_back(*r.percomm_err);
        if (r.rel_err) a.rel.push_back(*r.rel_err);
    }
    auto stats = [](const std::vector<double>& v, std::optional<double>& mean, std::optional<double>& sd) {
        if (v.empty()) return;
        double s = 0.0;
        for (double x : v) s += x;
        const double m = s / static_cast<double>(v.size());
        mean = m;
        if (v.size() < 2) return;
        double ss = 0.0;
        for (double x : v) ss += (x - m) * (x - m);
        sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    };
    std::vector<SummaryCell> out;
    for (auto& a : cells) {
        stats(a.acc, a.cell.accuracy_mean, a.cell.accuracy_sd);
        stats(a.pc, a.cell.percomm_err_mean, a.cell.percomm_err_sd);
        stats(a.rel, a.cell.rel_err_mean, a.cell.rel_err_sd);
        out.push_back(std::move(a.cell));
    }
    return out;
}

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    os << kResultsHeader << '\n';
    for (const auto& r : rows) {
        os << to_string(r.sweep) << ',' << format_double(r.value) << ',' << r.rep << ',' << to_string(r.kind) << ','
           << r.name << ',' << opt(r.accuracy) << ',' << opt(r.percomm_err) << ',' << opt(r.rel_err) << ','
           << (r.fail ? 1 : 0) << ',' << opt(r.ms) << '\n';
    }
}

nlohmann::json summary_json(const SweepResult& result) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : result.summary) {
        cells.push_back({{"value", c.value},
                         {"kind", std::string(to_string(c.kind))},
                         {"name", c.name},
                         {"n_ok", c.n_ok},
                         {"failures", c.failures},
                         {"accuracy_mean", opt(c.accuracy_mean)},
                         {"accuracy_sd", opt(c.accuracy_sd)},
                         {"percomm_err_mean", opt(c.percomm_err_mean)},
                         {"percomm_err_sd", opt(c.percomm_err_sd)},
                         {"rel_err_mean", opt(c.rel_err_mean)},
                         {"rel_err_sd", opt(c.rel_err_sd)}});
    }
    return {{"sweep_var", std::string(to_string(result.sweep))}, {"cells", std::move(cells)}};
}

}  // namespace nsbm

#include <doctest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "nsbm/harness.hpp"

using namespace nsbm;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.design.n = 150;
    cfg.design.target_avg_degree = 30;
    cfg.grid = {0.5, 1.5};
    cfg.replications = 3;
    cfg.options.kmeans_restarts = 5;
    return cfg;
}

std::string csv(const std::vector<ResultRow>& rows) {
    std::ostringstream os;
    write_results_csv(os, rows);
    return os.str();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("separable regime") {
    SimDesign d;
    d.n = 600;
    d.t = 0.0;
    d.beta = 0.1;
    d.theta_low_factor = 1.0;
    d.target_avg_degree = 60;
    const auto rows = run_replication(d, {ClusterMethod::right_sc, ClusterMethod::right_smst, ClusterMethod::left_sc,
                                          ClusterMethod::left_ssc, ClusterMethod::symmetric_sc},
                                      {}, 5);
    REQUIRE(rows.size() == 5);
    for (const auto& r : rows) {
        CHECK_FALSE(r.fail);
        CHECK_MESSAGE(*r.accuracy == 1.0, r.name);
    }
}

TEST_CASE("replications are deterministic") {
    SimDesign d;
    d.n = 200;
    const std::vector<ClusterMethod> methods{ClusterMethod::right_sc, ClusterMethod::left_ssc};
    const std::vector<EstimatorKind> estimators{EstimatorKind::nsbm, EstimatorKind::dsbm, EstimatorKind::dcsbm,
                                                EstimatorKind::scbm};
    const auto a = run_replication(d, methods, estimators, 77);
    const auto b = run_replication(d, methods, estimators, 77);
    CHECK(csv(a) == csv(b));
    REQUIRE(a.size() == 6);
    CHECK(a[2].kind == RowKind::estimator);
    CHECK(a[2].rel_err.has_value());
    CHECK_FALSE(a[2].accuracy.has_value());
}

TEST_CASE("failures become rows") {
    SimDesign d;
    d.n = 60;
    d.target_avg_degree = 58;
    const auto rows = run_replication(d, {ClusterMethod::right_sc}, {EstimatorKind::nsbm}, 1);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].fail);
    CHECK(rows[1].fail);
    CHECK_FALSE(rows[0].error.empty());
    const std::string text = csv(rows);
    CHECK(text.find(",method,right_sc,,,,1,\n") != std::string::npos);
}

TEST_CASE("sweep cardinality and schedule independence") {
    auto cfg = small_config();
    const auto serial = run_sweep(cfg, 1);
    const auto parallel = run_sweep(cfg, 4);
    const std::size_t expected = cfg.grid.size() * 3 * (cfg.methods.size() + cfg.estimators.size());
    CHECK(serial.rows.size() == expected);
    CHECK(csv(serial.rows) == csv(parallel.rows));
    CHECK(summary_json(serial) == summary_json(parallel));
    CHECK(serial.summary.size() == cfg.grid.size() * (cfg.methods.size() + cfg.estimators.size()));
    for (const auto& c : serial.summary) CHECK(c.n_ok + c.failures == 3);
}

TEST_CASE("summary statistics") {
    std::vector<ResultRow> rows(3);
    rows[0].accuracy = 0.5;
    rows[1].accuracy = 1.0;
    rows[2].fail = true;
    for (auto& r : rows) r.name = "right_sc";
    const auto s = summarize(rows);
    REQUIRE(s.size() == 1);
    CHECK(s[0].n_ok == 2);
    CHECK(s[0].failures == 1);
    CHECK(*s[0].accuracy_mean == 0.75);
    CHECK(*s[0].accuracy_sd == doctest::Approx(std::sqrt(0.125)));
    CHECK_FALSE(s[0].rel_err_mean.has_value());
}

TEST_CASE("csv layout") {
    ResultRow r;
    r.sweep = SweepVar::beta;
    r.value = 0.1;
    r.rep = 2;
    r.kind = RowKind::estimator;
    r.name = "dsbm";
    r.rel_err = 0.25;
    CHECK(csv({r}) == std::string(kResultsHeader) + "\nbeta,0.1,2,estimator,dsbm,,,0.25,0,\n");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
}

TEST_CASE("config json") {
    const auto cfg = nlohmann::json::parse(R"({"design": {"n": 300}, "sweep": "beta", "grid": [0.1, 0.5],
        "replications": 4, "methods": ["right_sc", "left_ssc"], "estimators": ["nsbm"], "seed": 9,
        "psi_rule": "strict", "output": "out.csv"})")
                         .get<ExperimentConfig>();
    CHECK(cfg.design.n == 300);
    CHECK(cfg.sweep == SweepVar::beta);
    CHECK(cfg.methods.size() == 2);
    CHECK(cfg.options.psi_rule == PsiRule::strict);
    const nlohmann::json back = cfg;
    CHECK(back.get<ExperimentConfig>().grid == cfg.grid);

    auto full = nlohmann::json::parse(R"({"grid": [1], "full_scale": true})").get<ExperimentConfig>();
    CHECK(full.design.n == 1200);
    CHECK(full.replications == 100);

    CHECK_THROWS_AS(nlohmann::json::parse(R"({"grid": [1], "reps": 2})").get<ExperimentConfig>(), DataError);
    ExperimentConfig empty;
    CHECK_THROWS_AS(validate(empty), DomainError);
    empty.grid = {0.5};
    empty.replications = 0;
    CHECK_THROWS_AS(validate(empty), DomainError);
}

}

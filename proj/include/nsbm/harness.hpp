#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nsbm/estimate.hpp"
#include "nsbm/generate.hpp"
#include "nsbm/spectral.hpp"

namespace nsbm {

enum class SweepVar { t, beta };
enum class EstimatorKind { nsbm, dsbm, dcsbm, scbm };

std::string_view to_string(SweepVar v);
std::string_view to_string(EstimatorKind e);
SweepVar parse_sweep_var(std::string_view name);
EstimatorKind parse_estimator(std::string_view name);
PsiRule parse_psi_rule(std::string_view name);
std::string_view to_string(PsiRule r);

/// Knobs shared by every replication of a sweep.
struct ReplicationOptions {
    /// Psi rule of the NSBM estimator.
    PsiRule psi_rule = PsiRule::nonzero_block;
    int kmeans_restarts = 20;
    /// Fill the wall-time column. Off by default so output is reproducible
    /// byte for byte.
    bool timing = false;
};

struct ExperimentConfig {
    SimDesign design;
    SweepVar sweep = SweepVar::t;
    std::vector<double> grid;
    int replications = 20;
    std::vector<ClusterMethod> methods{ClusterMethod::right_sc, ClusterMethod::right_smst, ClusterMethod::left_sc,
                                       ClusterMethod::left_ssc, ClusterMethod::symmetric_sc};
    std::vector<EstimatorKind> estimators{EstimatorKind::nsbm, EstimatorKind::dsbm, EstimatorKind::dcsbm,
                                          EstimatorKind::scbm};
    std::uint64_t master_seed = 1;
    std::string output;
    ReplicationOptions options;

    /// Switches to the full-size protocol: n = 1200, 100 replications.
    void apply_full_scale();
};

void validate(const ExperimentConfig& cfg);
void to_json(nlohmann::json& j, const ExperimentConfig& cfg);
void from_json(const nlohmann::json& j, ExperimentConfig& cfg);

enum class RowKind { method, estimator };

/// One metric record of one replication. Methods carry accuracy and the
/// per-community misclustering sum; estimators carry the relative error of
/// the reconstructed edge-mean matrix.
struct ResultRow {
    SweepVar sweep = SweepVar::t;
    double value = 0.0;
    int rep = 0;
    RowKind kind = RowKind::method;
    std::string name;
    std::optional<double> accuracy;
    std::optional<double> percomm_err;
    std::optional<double> rel_err;
    bool fail = false;
    std::string error;
    std::optional<double> ms;
};

/// Samples one graph from `design` and evaluates every method and estimator
/// on it. Failures become rows with `fail` set; nothing throws past here
/// except for invalid arguments.
std::vector<ResultRow> run_replication(const SimDesign& design, const std::vector<ClusterMethod>& methods,
                                       const std::vector<EstimatorKind>& estimators, std::uint64_t seed,
                                       const ReplicationOptions& opts = {});

/// Seed of replication `rep` at grid point `grid_index`.
std::uint64_t replication_seed(std::uint64_t master_seed, std::size_t grid_index, int rep);

struct SummaryCell {
    double value = 0.0;
    RowKind kind = RowKind::method;
    std::string name;
    int n_ok = 0;
    int failures = 0;
    std::optional<double> accuracy_mean, accuracy_sd;
    std::optional<double> percomm_err_mean, percomm_err_sd;
    std::optional<double> rel_err_mean, rel_err_sd;
};

struct SweepResult {
    SweepVar sweep = SweepVar::t;
    std::vector<ResultRow> rows;
    std::vector<SummaryCell> summary;
};

/// Runs grid x replications on `jobs` threads. Rows are ordered by
/// (grid index, replication, method/estimator order) regardless of scheduling.
SweepResult run_sweep(const ExperimentConfig& cfg, int jobs = 1);

/// Per (value, kind, name) means and sample standard deviations over the
/// non-failed rows.
std::vector<SummaryCell> summarize(const std::vector<ResultRow>& rows);

inline constexpr std::string_view kResultsHeader = "sweep_var,value,rep,kind,name,accuracy,percomm_err,rel_err,fail,ms";

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows);
nlohmann::json summary_json(const SweepResult& result);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double x);

}  // namespace nsbm

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nsbm/estimate.hpp"
#include "nsbm/spectral.hpp"

namespace nsbm {

struct Edge {
    Index source;
    Index target;
    double weight;
};

/// Weighted directed edges over string node ids. Node indices follow the
/// order in which ids first appear.
struct EdgeList {
    std::vector<std::string> ids;
    std::map<std::string, Index> index;
    std::vector<Edge> edges;
    Index self_loops_dropped = 0;
    Index duplicates_merged = 0;

    Index size() const noexcept { return static_cast<Index>(ids.size()); }
    /// Dense adjacency; throws DomainError on negative weights.
    DirectedGraph to_graph() const;
    /// Returns the index of `id`, appending it when new.
    Index intern(const std::string& id);
};

/// Parses `source,target[,weight]` CSV with a header row. Missing weights
/// default to 1, repeated pairs are summed, self-loops are dropped and
/// counted. DataError messages carry the 1-based line number.
EdgeList parse_edge_list(std::istream& in);
EdgeList load_edge_list(const std::filesystem::path& path);

/// Edge list of every nonzero entry of `graph`, ids taken from `ids`
/// (or 1..n when empty).
EdgeList to_edge_list(const DirectedGraph& graph, const std::vector<std::string>& ids = {});
void write_edge_list(std::ostream& os, const EdgeList& edges);

/// `id,community` with 1-based communities.
void write_labels(std::ostream& os, const std::vector<std::string>& ids, const LabelVector& labels);
/// Reads labels and orders them by `ids`; every id must be present.
LabelVector read_labels(std::istream& in, const std::vector<std::string>& ids);

/// `id,score` table.
std::map<std::string, double> read_scores(std::istream& in);

struct PreprocessOptions {
    /// Nodes with fewer than `min_degree` distinct out- or in-neighbours go.
    int min_degree = 4;
    /// Weights above 1 are replaced by this value; <= 0 disables the cap.
    double weight_cap = 2.0;
    /// Repeat the degree filter until nothing more is removed.
    bool iterate = false;
};

struct PreprocessResult {
    DirectedGraph graph;
    /// Original indices of the surviving nodes, ascending.
    std::vector<Index> kept;
    std::vector<Index> removed;
    int rounds = 0;
};

/// Throws DataError when every node is removed.
PreprocessResult preprocess(const DirectedGraph& graph, const PreprocessOptions& opts = {});

struct AnalyzeOptions {
    ClusterMethod method = ClusterMethod::right_sc;
    KMeansConfig kmeans;
    EstimateOptions estimate{PsiRule::nonzero_block};
};

struct CommunitySummary {
    Index size = 0;
    std::optional<double> score_mean;
    std::optional<double> score_median;
    Index scored = 0;
};

struct NodeSummary {
    Index node;
    int community;
    double theta;
    double lambda;
};

struct AnalysisReport {
    NsbmEstimate estimate;
    Matrix M;
    std::vector<CommunitySummary> communities;
    /// Per community, nodes sorted by lambda descending (NaN last).
    std::vector<std::vector<NodeSummary>> members;
    std::vector<std::string> unmatched_scores;
    std::vector<std::string> notes;
};

/// Clusters, fits the nomination model and orders communities by
/// descending M(k, k), ties broken by ascending mean external score.
/// `scores` are indexed by node (NaN = no score). Throws DomainError for K < 2.
AnalysisReport analyze(const DirectedGraph& graph, int K, const AnalyzeOptions& opts = {},
                       const std::vector<double>& scores = {});

nlohmann::json report_json(const AnalysisReport& report, const std::vector<std::string>& ids);

}  // namespace nsbm

#include "nsbm/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nsbm/harness.hpp"

namespace nsbm {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string at_line(long line, const std::string& what) { return "line " + std::to_string(line) + ": " + what; }

double parse_number(const std::string& text, long line, const char* field) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
        throw DataError(at_line(line, std::string("invalid ") + field + " '" + text + "'"));
    return v;
}

// Reads the header and hands every following non-blank line, split into
// fields, to `row`.
template <class Row>
void read_table(std::istream& in, const std::vector<std::vector<std::string>>& headers, Row&& row,
                std::size_t* columns = nullptr) {
    std::string line;
    long number = 0;
    bool have_header = false;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++number;
        if (trim(line).empty()) continue;
        auto fields = split_csv(line);
        if (!have_header) {
            if (std::find(headers.begin(), headers.end(), fields) == headers.end()) {
                std::string expected;
                for (const auto& h : headers) {
                    if (!expected.empty()) expected += " or ";
                    for (std::size_t i = 0; i < h.size(); ++i) expected += (i ? "," : "") + h[i];
                }
                throw DataError(at_line(number, "expected header " + expected));
            }
            width = fields.size();
            have_header = true;
            continue;
        }
        if (fields.size() != width)
            throw DataError(at_line(number, "expected " + std::to_string(width) + " fields, found " +
                                                std::to_string(fields.size())));
        for (const auto& f : fields)
            if (f.empty()) throw DataError(at_line(number, "empty field"));
        row(fields, number);
    }
    if (!have_header) throw DataError("empty file");
    if (columns) *columns = width;
}

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return in;
}

}  // namespace

Index EdgeList::intern(const std::string& id) {
    const auto [it, inserted] = index.emplace(id, size());
    if (inserted) ids.push_back(id);
    return it->second;
}

DirectedGraph EdgeList::to_graph() const {
    Matrix W = Matrix::Zero(size(), size());
    for (const auto& e : edges) W(e.source, e.target) += e.weight;
    return DirectedGraph(std::move(W));
}

EdgeList parse_edge_list(std::istream& in) {
    EdgeList out;
    std::map<std::pair<Index, Index>, std::size_t> seen;
    read_table(in, {{"source", "target"}, {"source", "target", "weight"}},
               [&](const std::vector<std::string>& f, long line) {
                   const double w = f.size() == 3 ? parse_number(f[2], line, "weight") : 1.0;
                   if (w < 0.0) throw DataError(at_line(line, "negative weight"));
                   const Index s = out.intern(f[0]);
                   const Index t = out.intern(f[1]);
                   if (s == t) {
                       ++out.self_loops_dropped;
                       return;
                   }
                   const auto [it, inserted] = seen.emplace(std::make_pair(s, t), out.edges.size());
                   if (inserted) {
                       out.edges.push_back({s, t, w});
                   } else {
                       out.edges[it->second].weight += w;
                       ++out.duplicates_merged;
                   }
               });
    if (out.edges.empty()) throw DataError("edge list contains no edges");
    return out;
}

EdgeList load_edge_list(const std::filesystem::path& path) {
    auto in = open(path);
    return parse_edge_list(in);
}

EdgeList to_edge_list(const DirectedGraph& graph, const std::vector<std::string>& ids) {
    const Index n = graph.size();
    if (!ids.empty() && static_cast<Index>(ids.size()) != n) throw DimensionError("one id per node required");
    EdgeList out;
    for (Index i = 0; i < n; ++i) out.intern(ids.empty() ? std::to_string(i + 1) : ids[static_cast<std::size_t>(i)]);
    const Matrix& W = graph.weights();
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            if (W(i, j) != 0.0) out.edges.push_back({i, j, W(i, j)});
    return out;
}

void write_edge_list(std::ostream& os, const EdgeList& edges) {
    os << "source,target,weight\n";
    for (const auto& e : edges.edges)
        os << edges.ids[static_cast<std::size_t>(e.source)] << ',' << edges.ids[static_cast<std::size_t>(e.target)]
           << ',' << format_double(e.weight) << '\n';
}

void write_labels(std::ostream& os, const std::vector<std::string>& ids, const LabelVector& labels) {
    if (static_cast<Index>(ids.size()) != labels.size()) throw DimensionError("one id per label required");
    os << "id,community\n";
    for (Index i = 0; i < labels.size(); ++i) os << ids[static_cast<std::size_t>(i)] << ',' << labels[i] + 1 << '\n';
}

LabelVector read_labels(std::istream& in, const std::vector<std::string>& ids) {
    std::map<std::string, int> found;
    read_table(in, {{"id", "community"}}, [&](const std::vector<std::string>& f, long line) {
        const double c = parse_number(f[1], line, "community");
        if (c < 1 || c != std::floor(c) || c > std::numeric_limits<int>::max())
            throw DataError(at_line(line, "community must be a positive integer"));
        if (!found.emplace(f[0], static_cast<int>(c)).second)
            throw DataError(at_line(line, "duplicate id '" + f[0] + "'"));
    });
    std::vector<int> labels;
    labels.reserve(ids.size());
    for (const auto& id : ids) {
        const auto it = found.find(id);
        if (it == found.end()) throw DataError("no label for node '" + id + "'");
        labels.push_back(it->second);
    }
    return LabelVector::from_one_based(labels);
}

std::map<std::string, double> read_scores(std::istream& in) {
    std::map<std::string, double> scores;
    read_table(in, {{"id", "score"}}, [&](const std::vector<std::string>& f, long line) {
        if (!scores.emplace(f[0], parse_number(f[1], line, "score")).second)
            throw DataError(at_line(line, "duplicate id '" + f[0] + "'"));
    });
    return scores;
}

PreprocessResult preprocess(const DirectedGraph& graph, const PreprocessOptions& opts) {
    PreprocessResult out;
    std::vector<Index> alive(static_cast<std::size_t>(graph.size()));
    std::iota(alive.begin(), alive.end(), Index{0});
    Matrix W = graph.weights();

    while (true) {
        const DirectedGraph current(W);
        const Eigen::VectorXi out_deg = current.out_degree_counts();
        const Eigen::VectorXi in_deg = current.in_degree_counts();
        std::vector<Index> keep;
        for (Index i = 0; i < W.rows(); ++i) {
            if (out_deg(i) >= opts.min_degree && in_deg(i) >= opts.min_degree)
                keep.push_back(i);
            else
                out.removed.push_back(alive[static_cast<std::size_t>(i)]);
        }
        ++out.rounds;
        if (keep.empty()) throw DataError("degree filter removed every node");
        const bool changed = static_cast<Index>(keep.size()) != W.rows();
        if (changed) {
            W = W(keep, keep).eval();
            std::vector<Index> next;
            for (Index i : keep) next.push_back(alive[static_cast<std::size_t>(i)]);
            alive = std::move(next);
        }
        if (!changed || !opts.iterate) break;
    }

    if (opts.weight_cap > 0.0) W = W.unaryExpr([cap = opts.weight_cap](double w) { return w > 1.0 ? cap : w; });
    std::sort(out.removed.begin(), out.removed.end());
    out.kept = std::move(alive);
    out.graph = DirectedGraph(std::move(W));
    return out;
}

AnalysisReport analyze(const DirectedGraph& graph, int K, const AnalyzeOptions& opts,
                       const std::vector<double>& scores) {
    if (K < 2) throw DomainError("analysis needs K >= 2");
    const Index n = graph.size();
    if (K > n) throw DomainError("K exceeds the number of nodes");
    if (!scores.empty() && static_cast<Index>(scores.size()) != n) throw DimensionError("one score per node required");
    const Matrix& A = graph.weights();

    const LabelVector raw = cluster(A, K, opts.method, opts.kmeans);
    const NsbmEstimate first = estimate_nsbm(A, raw, opts.estimate);
    const Matrix M0 = connection_strength(first);

    auto mean_score = [&](const std::vector<Index>& members) {
        double sum = 0.0;
        Index count = 0;
        for (Index i : members)
            if (!scores.empty() && !std::isnan(scores[static_cast<std::size_t>(i)])) {
                sum += scores[static_cast<std::size_t>(i)];
                ++count;
            }
        return count ? sum / static_cast<double>(count) : nan_value;
    };
    const auto raw_groups = raw.groups();
    std::vector<int> order(static_cast<std::size_t>(K));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const double ma = M0(a, a), mb = M0(b, b);
        if (std::isnan(ma) != std::isnan(mb)) return std::isnan(mb);
        if (!std::isnan(ma) && ma != mb) return ma > mb;
        const double sa = mean_score(raw_groups[static_cast<std::size_t>(a)]);
        const double sb = mean_score(raw_groups[static_cast<std::size_t>(b)]);
        if (std::isnan(sa) != std::isnan(sb)) return std::isnan(sb);
        return !std::isnan(sa) && sa < sb;
    });
    std::vector<int> rank(static_cast<std::size_t>(K));
    for (int r = 0; r < K; ++r) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = r;
    std::vector<int> relabeled(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) relabeled[static_cast<std::size_t>(i)] = rank[static_cast<std::size_t>(raw[i])];

    AnalysisReport report;
    report.estimate = estimate_nsbm(A, LabelVector(std::move(relabeled), K), opts.estimate);
    report.M = connection_strength(report.estimate);
    const auto groups = report.estimate.labels.groups();
    for (int k = 0; k < K; ++k) {
        const auto& G = groups[static_cast<std::size_t>(k)];
        CommunitySummary c;
        c.size = static_cast<Index>(G.size());
        std::vector<double> s;
        for (Index i : G)
            if (!scores.empty() && !std::isnan(scores[static_cast<std::size_t>(i)]))
                s.push_back(scores[static_cast<std::size_t>(i)]);
        c.scored = static_cast<Index>(s.size());
        if (!s.empty()) {
            std::sort(s.begin(), s.end());
            c.score_mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
            const std::size_t h = s.size() / 2;
            c.score_median = s.size() % 2 ? s[h] : 0.5 * (s[h - 1] + s[h]);
        }
        report.communities.push_back(c);

        std::vector<NodeSummary> members;
        for (Index i : G) members.push_back({i, k, report.estimate.theta(i), report.estimate.lambda(i)});
        std::stable_sort(members.begin(), members.end(), [](const NodeSummary& a, const NodeSummary& b) {
            if (std::isnan(a.lambda) != std::isnan(b.lambda)) return std::isnan(b.lambda);
            return a.lambda > b.lambda;
        });
        report.members.push_back(std::move(members));
    }
    for (int k : report.estimate.failed)
        report.notes.push_back("community " + std::to_string(k + 1) +
                               ": no usable off-diagonal block, lambda and B row left undefined");
    return report;
}

nlohmann::json report_json(const AnalysisReport& report, const std::vector<std::string>& ids) {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
    auto mat = [&](const Matrix& m) {
        nlohmann::json a = nlohmann::json::array();
        for (Index r = 0; r < m.rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (Index c = 0; c < m.cols(); ++c) row.push_back(num(m(r, c)));
            a.push_back(std::move(row));
        }
        return a;
    };
    auto id_of = [&](Index i) {
        return ids.empty() ? std::to_string(i + 1) : ids[static_cast<std::size_t>(i)];
    };

    nlohmann::json communities = nlohmann::json::array();
    for (std::size_t k = 0; k < report.communities.size(); ++k) {
        const auto& c = report.communities[k];
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& m : report.members[k])
            nodes.push_back({{"id", id_of(m.node)}, {"theta", num(m.theta)}, {"lambda", num(m.lambda)}});
        communities.push_back({{"community", k + 1},
                               {"size", c.size},
                               {"scored", c.scored},
                               {"score_mean", opt(c.score_mean)},
                               {"score_median", opt(c.score_median)},
                               {"nodes", std::move(nodes)}});
    }
    nlohmann::json labels = nlohmann::json::array();
    const auto one = report.estimate.labels.one_based();
    for (std::size_t i = 0; i < one.size(); ++i) labels.push_back({{"id", id_of(static_cast<Index>(i))}, {"community", one[i]}});
    nlohmann::json failed = nlohmann::json::array();
    for (int k : report.estimate.failed) failed.push_back(k + 1);

    return {{"K", report.estimate.labels.K()},
            {"n", report.estimate.labels.size()},
            {"B", mat(report.estimate.B)},
            {"M", mat(report.M)},
            {"communities", std::move(communities)},
            {"labels", std::move(labels)},
            {"failed_communities", std::move(failed)},
            {"unmatched_scores", report.unmatched_scores},
            {"notes", report.notes}};
}

}  // namespace nsbm

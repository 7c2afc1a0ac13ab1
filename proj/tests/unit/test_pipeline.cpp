#include <doctest.h>

#include <algorithm>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "../common/random_params.hpp"
#include "nsbm/generate.hpp"
#include "nsbm/metrics.hpp"
#include "nsbm/pipeline.hpp"

using namespace nsbm;

namespace {

EdgeList parse(const std::string& text) {
    std::istringstream in(text);
    return parse_edge_list(in);
}

// Ring-like digraph where every node has in- and out-degree `d`.
Matrix regular(Index n, int d) {
    Matrix W = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (int s = 1; s <= d; ++s) W(i, (i + s) % n) = 1.0;
    return W;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("edge list parsing") {
    const auto dup = parse("source,target,weight\na,b,1\na,b,1\n");
    REQUIRE(dup.edges.size() == 1);
    CHECK(dup.edges[0].weight == 2.0);
    CHECK(dup.duplicates_merged == 1);

    const auto loop = parse("source,target,weight\na,a,3\na,b,1\n");
    CHECK(loop.self_loops_dropped == 1);
    CHECK(loop.edges.size() == 1);

    const auto two = parse("source,target\r\nx,y\r\ny,z\r\n\r\n");
    CHECK(two.size() == 3);
    CHECK(std::all_of(two.edges.begin(), two.edges.end(), [](const Edge& e) { return e.weight == 1.0; }));
    const Matrix W = two.to_graph().weights();
    CHECK(W(0, 1) == 1.0);
    CHECK(W(1, 2) == 1.0);
}

TEST_CASE("edge list errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parse(""), "empty file", DataError);
    CHECK_THROWS_WITH_AS(parse("from,to\n"), doctest::Contains("line 1"), DataError);
    CHECK_THROWS_WITH_AS(parse("source,target,weight\na,b,1\na,c\n"), doctest::Contains("line 3"), DataError);
    CHECK_THROWS_WITH_AS(parse("source,target,weight\na,b,x\n"), doctest::Contains("line 2"), DataError);
    CHECK_THROWS_WITH_AS(parse("source,target,weight\na,b,-1\n"), doctest::Contains("line 2"), DataError);
    CHECK_THROWS_AS(parse("source,target\n"), DataError);
}

TEST_CASE("edge list round trip") {
    Matrix W = Matrix::Zero(3, 3);
    W(0, 2) = 1.5;
    W(2, 1) = 1;
    const auto edges = to_edge_list(DirectedGraph(W), {"p", "q", "r"});
    std::ostringstream os;
    write_edge_list(os, edges);
    CHECK(os.str() == "source,target,weight\np,r,1.5\nr,q,1\n");
    const auto back = parse(os.str());
    CHECK(back.ids == std::vector<std::string>{"p", "r", "q"});
    CHECK(back.edges.size() == 2);
}

TEST_CASE("labels and scores") {
    const std::vector<std::string> ids{"a", "b", "c"};
    std::ostringstream os;
    write_labels(os, ids, LabelVector({1, 0, 1}, 2));
    CHECK(os.str() == "id,community\na,2\nb,1\nc,2\n");
    std::istringstream in("id,community\nc,2\na,2\nb,1\nz,1\n");
    CHECK(read_labels(in, ids).values() == std::vector<int>{1, 0, 1});
    std::istringstream missing("id,community\na,1\n");
    CHECK_THROWS_AS(read_labels(missing, ids), DataError);
    std::istringstream scores("id,score\na,3.5\nb,1\n");
    const auto s = read_scores(scores);
    CHECK(s.at("a") == 3.5);
}

TEST_CASE("either-side degree filter and weight cap") {
    Matrix W = regular(12, 5);
    // Node 0 keeps in-degree 5 but is left with out-degree 3.
    W(0, 1) = W(0, 2) = 0.0;
    W(3, 5) = 7.0;
    const auto r = preprocess(DirectedGraph(W));
    CHECK(r.removed == std::vector<Index>{0});
    CHECK(r.kept.size() == 11);
    const Matrix& G = r.graph.weights();
    CHECK(G.maxCoeff() == 2.0);
    CHECK(G(2, 4) == 2.0);  // old (3, 5) after dropping node 0
    CHECK(G(0, 1) == 1.0);

    Matrix hub = regular(15, 10);
    for (Index j = 1; j < 15; ++j) hub(0, j) = 0.0;
    hub(0, 1) = hub(0, 2) = hub(0, 3) = 1.0;
    CHECK(preprocess(DirectedGraph(hub)).removed == std::vector<Index>{0});
}

TEST_CASE("preprocess leaves a conforming graph unchanged") {
    Matrix W = regular(10, 5);
    W(0, 1) = 1.0;
    const auto once = preprocess(DirectedGraph(W));
    CHECK(once.removed.empty());
    CHECK(once.graph.weights() == W);
    const auto twice = preprocess(once.graph);
    CHECK(twice.graph.weights() == once.graph.weights());
}

TEST_CASE("iterated filter reaches a fixed point") {
    // Core 0..5 is complete. Node 8 fails the in-degree test; node 7 only
    // reaches in-degree 4 through node 8.
    Matrix W = Matrix::Ones(9, 9);
    W.block(0, 6, 9, 3).setZero();
    W.block(6, 0, 3, 9).setZero();
    W.diagonal().setZero();
    for (Index c : {0, 1, 2, 3}) W(6, c) = W(c, 6) = 1;
    W(6, 7) = W(7, 6) = 1;
    for (Index c : {0, 1, 2}) W(7, c) = 1;
    W(8, 7) = W(0, 7) = W(1, 7) = 1;
    for (Index c : {0, 1, 2}) W(8, c) = 1;
    W(0, 8) = W(1, 8) = 1;

    const auto single = preprocess(DirectedGraph(W));
    CHECK(single.removed == std::vector<Index>{8});
    PreprocessOptions opts;
    opts.iterate = true;
    const auto fixed = preprocess(DirectedGraph(W), opts);
    CHECK(fixed.removed == std::vector<Index>{7, 8});
    CHECK(fixed.rounds == 3);
    CHECK(preprocess(fixed.graph, opts).removed.empty());
    // A single pass is not idempotent on this graph.
    CHECK(preprocess(single.graph).removed.size() == 1);

    CHECK_THROWS_AS(preprocess(DirectedGraph(regular(6, 2))), DataError);
}

TEST_CASE("analyze orders communities by internal strength") {
    NsbmParams p;
    const Index n = 240;
    std::vector<int> v(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = static_cast<int>((i * 7) % 3);
    p.labels = LabelVector(v, 3);
    p.B.resize(3, 3);
    p.B << 1, 0.3, 0.1, 0.4, 1, 0.2, 0.15, 0.35, 1;
    p.theta.resize(n);
    const double level[3] = {0.2, 0.6, 0.4};
    for (Index i = 0; i < n; ++i) p.theta(i) = level[p.labels[i]];
    p.lambda = Vector::Ones(n);
    const auto A = sample_nsbm(p, 3);

    CHECK_THROWS_AS(analyze(A, 1), DomainError);
    const auto report = analyze(A, 3);
    REQUIRE(report.estimate.ok());
    const auto mc = misclustering(report.estimate.labels, p.labels);
    CHECK(mc.rate < 0.02);
    for (int k = 1; k < 3; ++k) CHECK(report.M(k - 1, k - 1) > report.M(k, k));
    // Strongest, middle and weakest planted communities in that order.
    CHECK(mc.permutation == std::vector<int>{1, 2, 0});
    Index total = 0;
    for (const auto& c : report.communities) total += c.size;
    CHECK(total == n);
    CHECK((report.M - connection_strength(report.estimate)).cwiseAbs().maxCoeff() == 0.0);
    for (const auto& members : report.members)
        for (std::size_t i = 1; i < members.size(); ++i) CHECK(members[i - 1].lambda >= members[i].lambda);

    std::vector<double> scores(static_cast<std::size_t>(n));
    std::iota(scores.begin(), scores.end(), 0.0);
    const auto scored = analyze(A, 3, {}, scores);
    CHECK(scored.communities[0].score_mean.has_value());
    CHECK(scored.communities[0].scored == scored.communities[0].size);

    const auto j = report_json(report, {});
    CHECK(j["communities"].size() == 3);
    CHECK(j["labels"].size() == static_cast<std::size_t>(n));
}

TEST_CASE("analyze breaks ties with external scores") {
    NsbmParams p;
    p.labels = nsbm::testing::balanced_labels(200, 2, 4);
    p.B.resize(2, 2);
    p.B << 1, 0.2, 0.2, 1;
    p.theta = Vector::Constant(200, 0.3);
    p.lambda = Vector::Ones(200);
    // The exact population matrix of a symmetric design gives tied diagonals.
    const DirectedGraph A(expected_matrix(p));
    std::vector<double> scores(200);
    for (Index i = 0; i < 200; ++i) scores[static_cast<std::size_t>(i)] = p.labels[i] == 0 ? 10.0 : 1.0;
    const auto report = analyze(A, 2, {}, scores);
    REQUIRE(report.M(0, 0) == report.M(1, 1));
    CHECK(*report.communities[0].score_mean < *report.communities[1].score_mean);
}

TEST_CASE("analyze is invariant to node order") {
    SimDesign d;
    d.n = 300;
    d.t = 0.5;
    const auto p = make_sim_params(d, 4);
    const Matrix A = sample_nsbm(p, 5).weights();
    std::vector<Index> perm(300);
    std::iota(perm.begin(), perm.end(), Index{0});
    std::reverse(perm.begin(), perm.end());
    const auto base = analyze(DirectedGraph(A), 3);
    const auto rev = analyze(DirectedGraph(A(perm, perm)), 3);
    std::vector<int> back(300);
    for (Index i = 0; i < 300; ++i) back[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = rev.estimate.labels[i];
    CHECK(misclustering(LabelVector(back, 3), base.estimate.labels).rate == 0.0);
}

}

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "lab/discrete.hpp"

using namespace lab;

namespace {

double chord(const CloudPoint& a, const CloudPoint& b) {
    auto emb = [](const CloudPoint& p) {
        double q = p.r * std::sin(p.s);
        return std::array<double, 5>{p.r * std::cos(p.s), q * p.xi.w, q * p.xi.x, q * p.xi.y, q * p.xi.z};
    };
    auto x = emb(a), y = emb(b);
    double s = 0;
    for (int k = 0; k < 5; ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
    return std::sqrt(s);
}

struct FlatFixture {
    WarpedMetric W = flat_cone();
    SampleCloud c = sample_cloud(W, {0.5, 1.5, 0, kPi}, 1500, 7);
    Graph g = build_graph(W, c, 12);
};

}  // namespace

TEST_CASE("sampling is deterministic and keeps anchors") {
    auto W = flat_cone();
    CloudPoint a{1.0, 1.0, {}};
    auto c1 = sample_cloud(W, {0.5, 1.5, 0, kPi}, 300, 3, {a});
    auto c2 = sample_cloud(W, {0.5, 1.5, 0, kPi}, 300, 3, {a});
    REQUIRE(c1.size() == 300);
    CHECK(c1.points[0].r == 1.0);
    for (std::size_t i = 0; i < c1.size(); ++i) {
        CHECK(c1.points[i].r == c2.points[i].r);
        CHECK(c1.points[i].xi.z == c2.points[i].xi.z);
        CHECK(c1.points[i].r >= 0.5);
        CHECK(c1.points[i].r <= 1.5);
    }
}

TEST_CASE("segment lengths agree with flat chords for nearby points") {
    auto W = flat_cone();
    Rng rng(4);
    for (int k = 0; k < 50; ++k) {
        CloudPoint p{rng.uniform(0.6, 1.4), rng.uniform(0.3, 2.8), quat_random(rng)};
        CloudPoint q = p;
        q.r += rng.uniform(-0.02, 0.02);
        q.s += rng.uniform(-0.02, 0.02);
        q.xi = (quat_exp({rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02)}) * p.xi);
        double L = segment_length(W, p, q), d = chord(p, q);
        CHECK(L >= d * (1 - 1e-6));
        CHECK(L <= d * 1.01);
        auto y = tangent_offset(W, p, q);
        double n = 0;
        for (double v : y) n += v * v;
        CHECK(std::sqrt(n) == doctest::Approx(d).epsilon(0.05));
    }
}

TEST_CASE("graph is symmetric, connected and dominates flat distances") {
    FlatFixture F;
    CHECK(component_sizes(F.g).size() == 1);
    for (std::size_t i = 0; i < F.g.n; ++i)
        for (auto e = F.g.offset[i]; e < F.g.offset[i + 1]; ++e) {
            auto j = F.g.target[e];
            bool back = false;
            for (auto f = F.g.offset[j]; f < F.g.offset[j + 1]; ++f)
                if (F.g.target[f] == i && F.g.weight[f] == F.g.weight[e]) back = true;
            CHECK(back);
            CHECK(F.g.weight[e] > 0);
        }
    auto d = dijkstra(F.g, 0);
    for (std::size_t i = 0; i < F.g.n; ++i) CHECK(d[i] >= chord(F.c.points[0], F.c.points[i]) * (1 - 1e-6));
}

TEST_CASE("graph subspaces are metrics and survive a write/read round trip") {
    FlatFixture F;
    std::vector<std::size_t> idx{0, 5, 17, 40, 99, 200};
    auto X = graph_subspace(F.g, idx);
    CHECK(metric_violation(X) <= 1e-12);
    X.provenance = "test space\nsecond line";
    std::stringstream ss;
    write_space(ss, X);
    auto Y = read_space(ss);
    CHECK(Y.n == X.n);
    CHECK(Y.provenance == X.provenance);
    for (std::size_t i = 0; i < X.D.size(); ++i) CHECK(Y.D[i] == X.D[i]);
    std::stringstream bad("3\n0 1\n");
    CHECK_THROWS(read_space(bad));
}

TEST_CASE("farthest point net covers at its reported radius") {
    Rng rng(9);
    std::vector<std::vector<double>> M(60, std::vector<double>(60));
    std::vector<std::array<double, 2>> p(60);
    for (auto& q : p) q = {rng.uniform(), rng.uniform()};
    for (int i = 0; i < 60; ++i)
        for (int j = 0; j < 60; ++j) M[i][j] = std::hypot(p[i][0] - p[j][0], p[i][1] - p[j][1]);
    auto X = space_from_matrix(M);
    auto N = farthest_point_net(X, 10);
    CHECK(N.index.size() == 10);
    double worst = 0;
    for (std::size_t i = 0; i < X.n; ++i) {
        double b = 1e9;
        for (auto j : N.index) b = std::min(b, X(i, j));
        worst = std::max(worst, b);
    }
    CHECK(worst == doctest::Approx(N.radius));
    auto B = ball_indices(X, 0, 0.3);
    for (auto i : B) CHECK(X(0, i) <= 0.3);
    auto sub = ball(X, 0, 0.3, true);
    CHECK(sub.n == B.size());
    CHECK(sub.diameter() <= 2.0 + 1e-12);
}

TEST_CASE("excess vanishes at the endpoints and is nonnegative") {
    FlatFixture F;
    std::vector<std::size_t> idx(300);
    std::iota(idx.begin(), idx.end(), 0);
    auto X = graph_subspace(F.g, idx);
    auto E = excess_field(X, 0, 1);
    CHECK(std::abs(E.e[0]) < 1e-12);
    CHECK(std::abs(E.e[1]) < 1e-12);
    for (double v : E.e) CHECK(v >= -1e-12);
}

TEST_CASE("shortest paths and the gradient flow move towards the source") {
    FlatFixture F;
    auto d = dijkstra(F.g, 0);
    auto P = shortest_path_to(F.g, d, 100);
    CHECK(P.vertices.front() == 100);
    CHECK(P.vertices.back() == 0);
    CHECK(P.length == doctest::Approx(d[100]));
    auto y = gradient_flow_map(F.g, d, 100, 0.8);
    CHECK(d[y] < d[100]);
    CHECK(d[100] - d[y] <= 0.8 + 0.5);
}

TEST_CASE("reweighting with the same metric reproduces the graph") {
    FlatFixture F;
    auto h = reweight_graph(F.g, F.W, F.c);
    for (std::size_t e = 0; e < F.g.weight.size(); ++e) CHECK(h.weight[e] == doctest::Approx(F.g.weight[e]));
    SampleCloud small;
    small.points.resize(3);
    CHECK_THROWS_AS(reweight_graph(F.g, F.W, small), GraphError);
}

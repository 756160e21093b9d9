#include <doctest.h>

#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "lab/heat.hpp"

using namespace lab;

namespace {

Graph path_graph(std::size_t n, double h) {
    std::vector<std::tuple<std::size_t, std::size_t, double>> e;
    for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1, h);
    return graph_from_edges(n, e);
}

struct SliceFixture {
    WarpedMetric W = flat_cone();
    SampleCloud c = sample_slice(W, {0.2, 1.2, 0.3, 2.8}, 400, 2);
    Graph g = build_graph(W, c, 10);
};

// Dense implicit-Euler propagator (M - dt kappa (C - diag C1))^{-1} M.
Eigen::MatrixXd dense_propagator(const Laplacian& L, double dt) {
    Eigen::MatrixXd C = Eigen::MatrixXd(L.C);
    std::size_t n = L.mass.size();
    Eigen::MatrixXd A = -dt * L.kappa * C;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        A(i, i) = L.mass[i] + dt * L.kappa * C.row(i).sum();
        M(i, i) = L.mass[i];
    }
    return A.partialPivLu().solve(M);
}

}  // namespace

TEST_CASE("path graph Laplacian is the second difference") {
    const std::size_t n = 101;
    auto g = path_graph(n, 0.01);
    auto L = graph_laplacian(g, 1);
    std::vector<double> u(n), one(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) u[i] = std::pow(0.01 * i, 2);
    auto Lu = apply_laplacian(L, u);
    for (std::size_t i = 1; i + 1 < n; ++i) CHECK(Lu[i] == doctest::Approx(2.0).epsilon(0.05));
    for (double v : apply_laplacian(L, one)) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("propagator matches a dense solve and is stochastic") {
    SliceFixture F;
    auto L = graph_laplacian(F.g, 2);
    const double dt = 1e-3;
    HeatSolver S(L, dt);
    auto P = dense_propagator(L, dt);
    Eigen::MatrixXd P3 = P * P * P;
    std::vector<double> u(F.g.n);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sin(3 * F.c.points[i].r) + F.c.points[i].s;
    auto v = S.flow(u, 3);
    Eigen::VectorXd w = P3 * Eigen::Map<Eigen::VectorXd>(u.data(), u.size());
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(v[i] == doctest::Approx(w[i]).epsilon(1e-9));
    for (std::size_t x : {0, 50, 399}) {
        auto h = S.kernel_row(x, 3);
        CHECK(std::abs(std::accumulate(h.begin(), h.end(), 0.0) - 1) < 1e-9);
        for (std::size_t j = 0; j < h.size(); ++j) {
            CHECK(h[j] >= -1e-14);
            CHECK(h[j] == doctest::Approx(P3(x, j)).epsilon(1e-8));
        }
    }
}

TEST_CASE("flows compose and obey the maximum principle") {
    SliceFixture F;
    auto L = graph_laplacian(F.g, 2);
    std::vector<double> u(F.g.n);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = F.c.points[i].r < 0.6 ? 1.0 : -0.5;
    auto whole = heat_flow(L, u, 0.005, 10);
    auto split = heat_flow(L, heat_flow(L, u, 0.002, 4), 0.003, 6);
    for (std::size_t i = 0; i < u.size(); ++i) {
        CHECK(std::abs(whole[i] - split[i]) < 1e-8);
        CHECK(whole[i] <= 1.0 + 1e-12);
        CHECK(whole[i] >= -0.5 - 1e-12);
    }
    auto late = heat_flow(L, u, 50.0, 50);
    double mean = 0, mass = 0;
    for (std::size_t i = 0; i < u.size(); ++i) mean += L.mass[i] * u[i], mass += L.mass[i];
    mean /= mass;
    for (double v : late) CHECK(v == doctest::Approx(mean).epsilon(1e-3));
    auto same = heat_flow(L, u, 0.0, 4);
    CHECK(same == u);
}

TEST_CASE("drift-corrected generator has no first-order drift off the fallback rows") {
    SliceFixture F;
    std::size_t fallbacks = 0;
    auto offset = [&](std::size_t i, std::size_t j) { return tangent_offset(F.W, F.c.points[i], F.c.points[j]); };
    auto L = drift_corrected_laplacian(F.g, offset, 2, &fallbacks);
    CHECK(fallbacks < F.g.n / 2);
    std::size_t drifting = 0;
    for (std::size_t i = 0; i < F.g.n; ++i) {
        double lx = 0, ly = 0, scale = 0, quad = 0;
        for (auto e = F.g.offset[i]; e < F.g.offset[i + 1]; ++e) {
            auto y = offset(i, F.g.target[e]);
            double w = L.C.coeff(i, F.g.target[e]);
            CHECK(w >= 0);
            lx += w * y[0];
            ly += w * y[1];
            scale += w * std::hypot(y[0], y[1]);
            quad += w * (y[0] * y[0] + y[1] * y[1]);
        }
        if (std::hypot(lx, ly) > 1e-9 * scale) ++drifting;
        // normalization: the operator maps |y|^2 to 2 * dimension
        CHECK(quad * L.kappa / L.mass[i] == doctest::Approx(4.0).epsilon(1e-9));
    }
    CHECK(drifting <= fallbacks);
    std::vector<double> one(F.g.n, 1.0);
    for (double v : apply_laplacian(L, one)) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("calibration recovers the scale of a mis-scaled operator") {
    const std::size_t n = 51;
    auto g = path_graph(n, 0.02);
    auto L = graph_laplacian(g, 1);
    L.kappa *= 3;
    std::vector<double> u(n), target(n, 2.0);
    std::vector<char> mask(n, 1);
    mask[0] = mask[n - 1] = 0;
    for (std::size_t i = 0; i < n; ++i) u[i] = std::pow(0.02 * i, 2);
    double k = calibrate_laplacian(L, u, target, mask);
    CHECK(k == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("annulus cutoff plateau and support") {
    CHECK(annulus_cutoff(0.5, 0.1, 0.2, 1.0, 2.0) == 1.0);
    CHECK(annulus_cutoff(0.05, 0.1, 0.2, 1.0, 2.0) == 0.0);
    CHECK(annulus_cutoff(2.5, 0.1, 0.2, 1.0, 2.0) == 0.0);
    double v = annulus_cutoff(1.5, 0.1, 0.2, 1.0, 2.0);
    CHECK(v > 0);
    CHECK(v < 1);
}

TEST_CASE("parabolic approximation keeps the excess nonnegative") {
    SliceFixture F;
    auto L = graph_laplacian(F.g, 2);
    auto dp = dijkstra(F.g, 0), dq = dijkstra(F.g, 1);
    auto R = parabolic_approx(L, dp, dq, 0, 1, 0.1, 0.2);
    CHECK(R.min_e_t >= -1e-9);
    CHECK(R.t == doctest::Approx(std::pow(0.1 * dp[1], 2)));
    for (double p : R.psi) {
        CHECK(p >= 0);
        CHECK(p <= 1);
    }
}

TEST_CASE("excess regression recovers a planted exponent") {
    std::vector<double> dp, dq, dc;
    Rng rng(3);
    // excess e = dc^2 exactly: dp + dq - 1 = dc^2 with dp = 0.5, dq = 0.5 + dc^2
    for (int i = 0; i < 4000; ++i) {
        double r = 0.3 * std::sqrt(rng.uniform());
        dc.push_back(r);
        dp.push_back(0.5);
        dq.push_back(0.5 + r * r);
    }
    auto R = excess_mean_check(dp, dq, dc, 1.0, {0.05, 0.1, 0.2, 0.3});
    CHECK(R.slope == doctest::Approx(2.0).epsilon(0.01));
    CHECK_THROWS(excess_mean_check(dp, dq, dc, 1.0, {1e-6, 0.1}, 50));
}

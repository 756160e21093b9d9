#include <doctest.h>

#include <cmath>

#include "lab/examples.hpp"
#include "lab/smooth.hpp"

using namespace lab;

namespace {

double speed(const std::function<Mat5(const Chart5&)>& g, const Chart5& x, const Chart5& v) {
    auto G = g(x);
    Eigen::Matrix<double, 5, 1> w;
    for (int i = 0; i < 5; ++i) w[i] = v[i];
    return std::sqrt(w.dot(G * w));
}

double dist(const std::array<double, 5>& a, const std::array<double, 5>& b) {
    double s = 0;
    for (int i = 0; i < 5; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("flat geodesics are straight lines of the embedding") {
    auto g = chart_metric_fn(flat_cone());
    Chart5 x0{1.0, 1.0, 0.1, 0.2, 0.1}, v0{0.3, 0.2, 0.1, -0.2, 0.15};
    auto geo = chart_geodesic(g, x0, v0, 51);
    auto e0 = flat_embed(geo.x.front()), e1 = flat_embed(geo.x.back()), em = flat_embed(geo.x[25]);
    CHECK(dist(e0, e1) == doctest::Approx(speed(g, x0, v0)).epsilon(1e-7));
    std::array<double, 5> mid;
    for (int i = 0; i < 5; ++i) mid[i] = 0.5 * (e0[i] + e1[i]);
    CHECK(dist(em, mid) < 1e-7);
}

TEST_CASE("flat Jacobi fields vanishing at the start grow linearly") {
    auto g = chart_metric_fn(flat_cone());
    Chart5 x0{1.0, 1.0, 0.1, 0.2, 0.1}, v0{0.3, 0.2, 0.1, -0.2, 0.15}, w{0.1, -0.3, 0.2, 0.1, 0.05};
    auto J = jacobi_ratio(g, x0, v0, w, 0.1, 51);
    for (std::size_t i = 1; i < J.t.size(); ++i)
        for (std::size_t j = 1; j < i; j += 7)
            CHECK(J.norm[i] / J.norm[j] == doctest::Approx(J.t[i] / J.t[j]).epsilon(1e-6));
}

TEST_CASE("Hessian of the flat distance integrates to the closed form") {
    auto g = chart_metric_fn(flat_cone());
    Chart5 x0{1.0, 1.2, 0.1, 0.0, 0.2}, v0{0.6, 0.5, 0.2, -0.1, 0.3};
    double sp = speed(g, x0, v0);
    for (auto& c : v0) c /= sp;
    auto geo = chart_geodesic(g, x0, v0, 201);
    auto P = flat_embed(x0);
    ChartScalar f = [&](const Chart5& x) { return dist(flat_embed(x), P); };
    for (double d : {0.1, 0.2}) CHECK(hessian_along_geodesic(g, geo, f, d) == doctest::Approx(4 * (1 / d - 1 / (1 - d))).epsilon(0.01));
}

TEST_CASE("Hessian identities in flat space") {
    auto g = chart_metric_fn(flat_cone());
    Chart5 x{0.9, 1.1, 0.2, -0.1, 0.3};
    ChartScalar lin = [](const Chart5& y) {
        auto e = flat_embed(y);
        return 0.4 * e[0] - 1.3 * e[2] + 0.2 * e[4];
    };
    CHECK(hessian_norm2(g, lin, x) < 1e-8);
    // |Hess (|y|^2 / 2)|^2 = |identity|^2 = 5
    auto P = flat_embed({1.3, 0.7, 0, 0, 0});
    ChartScalar half = [&](const Chart5& y) {
        double d = dist(flat_embed(y), P);
        return 0.5 * d * d;
    };
    CHECK(hessian_norm2(g, half, x) == doctest::Approx(5.0).epsilon(1e-5));
}

TEST_CASE("base distance from a ray point agrees with the flat law of cosines") {
    auto W = flat_cone();
    Rng rng(1);
    for (int k = 0; k < 60; ++k) {
        double rp = rng.uniform(0.3, 1.5), r = rng.uniform(0.3, 1.5), s = rng.uniform(0, 1.5) * (k % 3 ? 1 : 0.05);
        double ex = std::sqrt(rp * rp + r * r - 2 * rp * r * std::cos(s));
        CHECK(base_distance_from_ray(*W.a, rp, r, s) == doctest::Approx(ex).epsilon(1e-8));
    }
    CHECK(base_distance_from_ray(*W.a, 1.0, 0.5, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("base distance in the first example is a metric along the ray") {
    auto W = build_example_A(canonical_A());
    double dpq = 1.0;
    for (double s : {0.0, 0.02, 0.1}) {
        double e = base_distance_from_ray(*W.a, 0.25, 0.75, s) + base_distance_from_ray(*W.a, 1.25, 0.75, s) - dpq;
        CHECK(e >= -1e-9);
        if (s == 0.0) CHECK(std::abs(e) < 1e-12);
    }
    // shooting towards the tip stays well defined
    CHECK(base_distance_from_ray(*W.a, 0.3, 0.2, 0.5) > 0);
}

TEST_CASE("Example-A Jacobi envelope constant stays small away from the rays") {
    auto g = chart_metric_fn(build_example_A(canonical_A()));
    Chart5 x0{0.8, 1.0, 0, 0, 0}, v0{0.2, 0.3, -0.5, 0.4, 0.1}, w{0.3, -0.2, 0.1, 0.5, -0.4};
    double sp = speed(g, x0, v0);
    for (auto& c : v0) c *= 0.3 / sp;
    auto J = jacobi_ratio(g, x0, v0, w, 0.1);
    CHECK(J.c_ratio <= 10);
    CHECK(J.c_log <= 10);
}

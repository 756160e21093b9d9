#include <doctest.h>

#include <cmath>

#include "lab/gh.hpp"
#include "lab/sweeps.hpp"

using namespace lab;

namespace {

FiniteMetricSpace random_space(Rng& r, std::size_t n) {
    auto X = make_space(n);
    std::vector<std::array<double, 2>> p(n);
    for (auto& q : p) q = {r.uniform(), r.uniform()};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) X.at(i, j) = std::hypot(p[i][0] - p[j][0], p[i][1] - p[j][1]);
    return X;
}

// Half the least distortion over every relation R in X x Y that is a correspondence.
double brute_force_gh(const FiniteMetricSpace& X, const FiniteMetricSpace& Y) {
    std::size_t m = X.n * Y.n;
    double best = 1e300;
    for (std::size_t mask = 1; mask < (std::size_t(1) << m); ++mask) {
        Correspondence R;
        for (std::size_t b = 0; b < m; ++b)
            if (mask >> b & 1) R.pairs.push_back({b / Y.n, b % Y.n});
        if (!is_correspondence(R, X.n, Y.n)) continue;
        best = std::min(best, distortion(X, Y, R));
    }
    return best / 2;
}

FiniteMetricSpace scaled(FiniteMetricSpace X, double c) {
    for (auto& v : X.D) v *= c;
    return X;
}

}  // namespace

TEST_CASE("exact solver matches brute force over all relations") {
    Rng rng(3);
    for (int t = 0; t < 40; ++t) {
        auto X = random_space(rng, 1 + rng.index(3));
        auto Y = random_space(rng, 1 + rng.index(3));
        CHECK(gh_exact(X, Y) == doctest::Approx(brute_force_gh(X, Y)).epsilon(1e-12));
    }
}

TEST_CASE("known distances: one point and two points") {
    auto P = space_from_matrix({{0}});
    auto S = space_from_matrix({{0, 2}, {2, 0}});
    CHECK(gh_exact(P, S) == doctest::Approx(1.0));
    CHECK(gh_exact(S, S) == 0.0);
    CHECK(gh_lower(P, S) == doctest::Approx(1.0));
}

TEST_CASE("lower <= exact <= upper, and bounds scale with the spaces") {
    Rng rng(8);
    for (int t = 0; t < 60; ++t) {
        auto X = random_space(rng, 1 + rng.index(5));
        auto Y = random_space(rng, 1 + rng.index(5));
        double ex = gh_exact(X, Y);
        GhOptions o;
        o.seed = t;
        auto b = gh_upper(X, Y, o);
        CHECK(b.lower <= ex + 1e-12);
        CHECK(b.upper >= ex - 1e-12);
        CHECK(is_correspondence(b.witness, X.n, Y.n));
        CHECK(distortion(X, Y, b.witness) / 2 == doctest::Approx(b.upper));
        CHECK(gh_exact(scaled(X, 3), scaled(Y, 3)) == doctest::Approx(3 * ex));
        CHECK(gh_lower(scaled(X, 3), scaled(Y, 3)) == doctest::Approx(3 * b.lower));
    }
}

TEST_CASE("annealer is deterministic and does not get worse with more iterations") {
    Rng rng(21);
    auto X = random_space(rng, 30), Y = random_space(rng, 30);
    GhOptions a;
    a.iters = 500;
    GhOptions b = a;
    b.iters = 4000;
    auto u1 = gh_upper(X, Y, a), u2 = gh_upper(X, Y, a), u3 = gh_upper(X, Y, b);
    CHECK(u1.upper == u2.upper);
    CHECK(u3.upper <= u1.upper + 1e-15);
}

TEST_CASE("netted bounds bracket the direct bounds") {
    Rng rng(5);
    auto X = random_space(rng, 80), Y = random_space(rng, 70);
    auto d = gh_upper(X, Y);
    auto n = gh_netted(X, Y, 20);
    CHECK(n.lower <= d.upper + 1e-12);
    CHECK(n.upper >= d.lower - 1e-12);
    CHECK(gh_netted(X, X, 20).upper <= 2 * n.net_radius_x + 1e-12);
}

TEST_CASE("cone distance is the law of cosines in R x C(F)") {
    CHECK(cone_distance(0, 1, 0, 1, kPi) == doctest::Approx(2.0));
    CHECK(cone_distance(0, 1, 0, 1, 0) == doctest::Approx(0.0));
    CHECK(cone_distance(0, 0, 3, 0, 1.0) == doctest::Approx(3.0));
    CHECK(cone_distance(1, 1, 2, 1, kPi / 2) == doctest::Approx(std::sqrt(3.0)));
    // angles beyond pi are capped
    CHECK(cone_distance(0, 1, 0, 2, 4.0) == doctest::Approx(3.0));
}

TEST_CASE("cone ball over a round fiber sample is a metric with unit radius") {
    auto F = sample_fiber(300, 10, 2);
    auto S = fiber_space(F, {-1, -1, -1});  // diameter about pi / e, no clamping
    auto net = farthest_point_net(S, 20).index;
    auto B = cone_ball(subspace(S, net), {{-0.5, 0, 0.5}, {0, 0.5, 1}});
    CHECK(metric_violation(B.space) <= 1e-12);
    CHECK(B.space.n == B.coords.size());
    CHECK(B.fiber.size() == B.space.n);
    CHECK_FALSE(B.clamped);
}

TEST_CASE("fiber graph distances dominate great-circle distances") {
    auto F = sample_fiber(500, 12, 4);
    auto S = fiber_space(F, {0, 0, 0});
    for (std::size_t i = 0; i < 500; i += 37)
        for (std::size_t j = 0; j < 500; j += 41) {
            double g = quat_angle(F.xi[i], F.xi[j]);
            CHECK(S(i, j) >= g - 1e-9);
            if (g > 0.5) CHECK(S(i, j) <= 1.5 * g);
        }
}

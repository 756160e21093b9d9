#include <doctest.h>

#include <cmath>

#include "lab/examples.hpp"
#include "lab/warped.hpp"

using namespace lab;

namespace {

// Milnor's formula for left-invariant metrics on SU(2): with [E2,E3] = l1 E1 (cyclic) in an
// orthonormal frame, Ric(E1) = 2 n2 n3 with n1 = (-l1 + l2 + l3)/2 and so on.
std::array<double, 3> milnor_ricci(const std::array<double, 3>& m) {
    double mu[3] = {std::exp(m[0]), std::exp(m[1]), std::exp(m[2])};
    double l[3];
    for (int i = 0; i < 3; ++i) l[i] = 2 * mu[i] / (mu[(i + 1) % 3] * mu[(i + 2) % 3]);
    double n[3];
    for (int i = 0; i < 3; ++i) n[i] = 0.5 * (-l[i] + l[(i + 1) % 3] + l[(i + 2) % 3]);
    return {2 * n[1] * n[2], 2 * n[2] * n[0], 2 * n[0] * n[1]};
}

}  // namespace

TEST_CASE("S3 Ricci agrees with Milnor's closed form") {
    Rng rng(11);
    for (int k = 0; k < 50; ++k) {
        std::array<double, 3> m{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        auto a = s3_ricci_orthonormal(m);
        auto b = milnor_ricci(m);
        for (int j = 0; j < 3; ++j) CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-12));
    }
    auto round = s3_ricci_orthonormal({0, 0, 0});
    for (double v : round) CHECK(v == doctest::Approx(2.0));
}

TEST_CASE("flat cone has vanishing Ricci in both computations") {
    auto W = flat_cone();
    for (double r : {0.4, 1.0, 1.7})
        for (double s : {0.3, 1.2, 2.5}) {
            auto C = ricci_closed_form(W, r, s);
            CHECK(std::abs(C.rr) < 1e-12);
            CHECK(std::abs(C.ss) < 1e-12);
            for (double v : C.jj) CHECK(std::abs(v) < 1e-12);
            CHECK(ricci_oracle(W, {r, s, {}}).cwiseAbs().maxCoeff() < 1e-8);
        }
}

TEST_CASE("round five-sphere has Ricci eigenvalues 4") {
    WarpedMetric S{sine_profile(), sine_profile(), constant_fiber({0, 0, 0}), "sphere"};
    for (double r : {0.5, 1.3})
        for (double s : {0.4, 2.0}) {
            for (double e : ricci_eigenvalues(S, r, s)) CHECK(e == doctest::Approx(4.0).epsilon(1e-10));
            Mat5 O = ricci_oracle(S, {r, s, {}});
            Mat5 g = eval_metric(S, {r, s, {}});
            CHECK((O - 4 * g).cwiseAbs().maxCoeff() < 1e-6);
        }
}

TEST_CASE("product R^2 x round S^3 has fiber Ricci 2 and flat base") {
    WarpedMetric P{constant_profile(1), constant_profile(1), constant_fiber({0, 0, 0}), "product"};
    auto ev = ricci_eigenvalues(P, 1.0, 1.0);
    CHECK(std::abs(ev[0]) < 1e-12);
    CHECK(std::abs(ev[1]) < 1e-12);
    for (int j = 2; j < 5; ++j) CHECK(ev[j] == doctest::Approx(2.0));
}

TEST_CASE("closed form matches the finite-difference oracle on random configurations") {
    Rng rng(5);
    for (int c = 0; c < 6; ++c) {
        auto W = random_warped_metric(rng);
        for (int i = 0; i < 4; ++i) {
            double r = rng.uniform(0.5, 1.5), s = rng.uniform(0.2, kPi - 0.2);
            Mat5 O = ricci_oracle(W, {r, s, {}});
            auto C = ricci_closed_form(W, r, s);
            Mat5 M = Mat5::Zero();
            M(0, 0) = C.rr;
            M(1, 1) = C.ss;
            for (int j = 0; j < 3; ++j) M(2 + j, 2 + j) = C.jj[j];
            CHECK((O - M).cwiseAbs().maxCoeff() / std::max(1.0, O.cwiseAbs().maxCoeff()) < 1e-5);
        }
    }
}

TEST_CASE("chart metric does not depend on the base quaternion") {
    auto W = build_example_A(canonical_A());
    Rng rng(2);
    ChartPoint p{0.8, 1.0, {}};
    Mat5 g0 = eval_metric(W, p);
    p.xi = quat_random(rng);
    CHECK((eval_metric(W, p) - g0).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("out-of-domain points are rejected") {
    auto W = flat_cone();
    CHECK_THROWS(eval_metric(W, {-1.0, 1.0, {}}));
}

#include <doctest.h>

#include <cmath>

#include "lab/sweeps.hpp"

using namespace lab;

TEST_CASE("fit recovers a planted power law and is scale equivariant") {
    std::vector<double> x{0.01, 0.02, 0.04, 0.08, 0.16, 0.32}, y, z;
    for (double v : x) y.push_back(3 * std::pow(v, 0.6));
    auto F = fit_holder(x, y);
    CHECK(F.slope == doctest::Approx(0.6));
    CHECK(F.intercept == doctest::Approx(std::log(3.0)));
    CHECK(F.residual < 1e-12);
    CHECK(F.ci_lo <= F.slope + 1e-12);
    CHECK(F.ci_hi >= F.slope - 1e-12);
    for (double v : y) z.push_back(7 * v);
    auto G = fit_holder(x, z);
    CHECK(G.slope == doctest::Approx(F.slope));
    CHECK(G.intercept == doctest::Approx(F.intercept + std::log(7.0)));
    CHECK_THROWS_AS(fit_holder({1, 2, 3}, {1, 2, 3}), DomainError);
}

TEST_CASE("bootstrap interval covers the slope under noise") {
    Rng rng(1);
    std::vector<double> x, y;
    for (int i = 0; i < 12; ++i) {
        double v = 0.01 * std::pow(2.0, i * 0.5);
        x.push_back(v);
        y.push_back(std::pow(v, 0.9) * std::exp(0.05 * rng.normal()));
    }
    auto F = fit_holder(x, y, 200, 3);
    CHECK(F.ci_lo < F.ci_hi);
    CHECK(F.ci_lo < 0.9 + 0.1);
    CHECK(F.ci_hi > 0.9 - 0.1);
    auto G = fit_holder(x, y, 200, 3);
    CHECK(G.ci_lo == F.ci_lo);
}

TEST_CASE("cone fiber exponents freeze under the control") {
    ConeSweepConfig c;
    auto a = cone_fiber_exponents(c, 1.0), b = cone_fiber_exponents(c, 1.05);
    CHECK(a != b);
    c.constant_fiber = true;
    CHECK(cone_fiber_exponents(c, 1.0) == cone_fiber_exponents(c, 1.05));
}

TEST_CASE("excess along the singular ray is nonnegative and grows with the radius") {
    ExcessSweepConfig c;
    c.radii = {0.03, 0.05, 0.08, 0.12, 0.2};
    c.samples = 30;
    auto R = excess_sweep(c);
    REQUIRE(R.rows.size() == 5);
    for (auto& r : R.rows) CHECK(r.mean >= 0);
    CHECK(R.rows[0].mean < R.rows[4].mean);
    c.radii = {0.6};
    CHECK_THROWS_AS(excess_sweep(c), DomainError);
}

TEST_CASE("ball sweep rejects pairs inside the end margins") {
    BallSweepConfig c;
    c.base = 0.52;
    CHECK_THROWS_AS(holder_ball_sweep(c), DomainError);
}

TEST_CASE("Reifenberg check rejects radii beyond the fiber injectivity scale") {
    ReifenbergConfig c;
    c.radii = {5.0};
    CHECK_THROWS(reifenberg_check(c));
}

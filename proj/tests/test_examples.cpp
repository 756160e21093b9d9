#include <doctest.h>

#include <cmath>

#include "lab/examples.hpp"
#include "lab/numeric.hpp"

using namespace lab;

TEST_CASE("circle curve keeps sum m_j = 0 and sum m_j^2 = c") {
    CircleCurve C(0.01, smooth_ramp_angle(0.0, 0.3, 0.5, 1.0));
    for (double r : {0.2, 0.6, 0.75, 0.9, 1.3}) {
        auto v = C.values(r);
        CHECK(std::abs(v[0] + v[1] + v[2]) < 1e-15);
        CHECK(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] == doctest::Approx(0.01).epsilon(1e-12));
    }
    // the angle only moves inside the ramp
    CHECK(C.component(0, 0.4).d1 == 0.0);
    CHECK(C.component(0, 1.1).d1 == 0.0);
}

TEST_CASE("limit curve of the second example is Holder with exponent (1 + delta)/2") {
    auto k = canonical_B();
    auto C = example_B_limit_curve(k);
    std::vector<double> x, y;
    for (int i = 0; i < 8; ++i) {
        double h = 1e-6 * std::pow(10.0, i * 3.0 / 7);
        x.push_back(std::log(h));
        y.push_back(std::log(std::abs(C.values(1 + h)[1] - C.values(1)[1])));
    }
    CHECK(fit_line(x, y).slope == doctest::Approx(0.5 * (1 + k.delta)).epsilon(0.02));
}

TEST_CASE("canonical examples pass their certificates and the control fails") {
    auto kA = canonical_A();
    auto RA = verify_positivity_conditions(build_example_A(kA), kA, certification_grid_A(kA, 20));
    CHECK(RA.all_pass());
    CHECK(RA.min_ricci.value >= -1e-8);
    auto kB = canonical_B();
    auto RB = verify_positivity_conditions(build_example_B(kB), kB, certification_grid_B(kB, 20));
    CHECK(RB.all_pass());
    CHECK(RB.min_ricci.value >= -1e-8);
    auto kC = kA;
    kC.a1 *= 100;
    CHECK(min_ricci_eigenvalue(build_example_A(kC), certification_grid_A(kC, 50)).value < 0);
}

TEST_CASE("constants round-trip through key/value form") {
    auto kA = canonical_A();
    kA.b1 = 0.123456789;
    auto back = constants_A_from(to_keyvalues(kA));
    CHECK(back.b1 == kA.b1);
    CHECK(back.theta_amp == kA.theta_amp);
    auto kB = canonical_B();
    kB.delta = 0.15;
    CHECK(constants_B_from(to_keyvalues(kB)).delta == 0.15);
}

TEST_CASE("cutoff respects its derivative bound") {
    auto k = canonical_A();
    auto W = build_example_A(k);
    auto F = std::dynamic_pointer_cast<const ExampleAFiber>(W.fiber);
    REQUIRE(F);
    auto psi = F->cutoff();
    CHECK(psi->value(psi->lo() / 2) == 0.0);
    CHECK(psi->value(0.5 * (psi->plateau_lo() + psi->plateau_hi())) == doctest::Approx(1.0));
    for (double s = 0.001; s < kPi; s += 0.01) {
        double v = psi->value(s);
        CHECK(v >= -1e-12);
        CHECK(v <= 1 + 1e-12);
    }
}

TEST_CASE("invalid parameters are rejected") {
    auto kB = canonical_B();
    kB.delta = 0.5;
    CHECK_THROWS_AS(build_example_B(kB), DomainError);
}

#include <doctest.h>

#include <cmath>

#include "lab/cutlocus.hpp"

using namespace lab;

namespace {

// Points of the unit square with Euclidean distances.
struct Plane {
    std::vector<double> x, y;
    MetricOracle oracle() const {
        return {x.size(), [this](std::size_t i, std::size_t j) { return std::hypot(x[i] - x[j], y[i] - y[j]); }};
    }
};

Plane random_plane(std::size_t n, std::uint64_t seed) {
    Plane P;
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        P.x.push_back(rng.uniform());
        P.y.push_back(rng.uniform());
    }
    return P;
}

Plane segment(std::size_t n) {
    Plane P;
    for (std::size_t i = 0; i < n; ++i) {
        P.x.push_back(double(i) / (n - 1));
        P.y.push_back(0);
    }
    return P;
}

}  // namespace

TEST_CASE("distance to the diagonal is d(x,y)/sqrt2 on a dense segment") {
    auto P = segment(401);
    auto O = P.oracle();
    for (PairIndex xy : {PairIndex{0, 400}, PairIndex{10, 90}, PairIndex{100, 102}}) {
        auto D = diagonal_projection(O, xy);
        CHECK(D.distance == doctest::Approx(O(xy.first, xy.second) / std::sqrt(2.0)).epsilon(1e-9));
    }
}

TEST_CASE("diagonal excess trivia") {
    auto P = random_plane(50, 1);
    auto O = P.oracle();
    CHECK(diagonal_excess(O, {3, 7}, {3, 7}) == 0.0);
    for (std::size_t z = 0; z < 50; z += 7)
        for (std::size_t w = 0; w < 50; w += 5) {
            CHECK(diagonal_excess(O, {4, 9}, {z, w}) >= -1e-9);
            // on the diagonal the excess is the distance to (z,w) minus its diagonal distance
            double e = diagonal_excess(O, {4, 4}, {z, w});
            CHECK(e == doctest::Approx(product_distance(O, {4, 4}, {z, w}) - O(z, w) / std::sqrt(2.0)));
            CHECK(e >= -1e-12);
        }
}

TEST_CASE("pairs inside a long sampled geodesic are not in the cutlocus") {
    auto P = segment(201);
    auto O = P.oracle();
    // the extension to the segment ends has zero excess and reaches far
    CHECK_FALSE(in_cutlocus(O, {90, 110}, 0.05, 0.0));
    auto R = cutlocus_reach(O, {90, 110}, 0.0);
    CHECK(R.found);
    CHECK(R.rho >= 0.45 - 1e-9);
    CHECK(diagonal_excess(O, {90, 110}, R.witness) <= 1e-9);
    // the extension through the endpoints is blocked
    CHECK(in_cutlocus(O, {0, 200}, 0.05, 0.0));
}

TEST_CASE("vacuous parameters") {
    auto P = random_plane(40, 2);
    auto O = P.oracle();
    auto pairs = sample_pairs(40, 100, 3);
    // any witness is admissible, so nothing stays blocked
    auto huge_eps = effective_cutlocus(O, pairs, 0.1, 10.0);
    CHECK(huge_eps.count() == 0);
    auto huge_r = effective_cutlocus(O, pairs, 10.0, 0.0);
    CHECK(huge_r.count() == pairs.size());
}

TEST_CASE("cutlocus sets grow with r and shrink with eps") {
    auto P = random_plane(300, 4);
    auto O = P.oracle();
    auto pairs = sample_pairs(300, 200, 5);
    const std::vector<double> rs{0.02, 0.05, 0.1, 0.2}, es{0.2, 0.1, 0.05, 0.0};
    for (std::size_t i = 0; i < rs.size(); ++i)
        for (std::size_t j = 0; j < es.size(); ++j) {
            auto A = effective_cutlocus(O, pairs, rs[i], es[j]);
            if (i + 1 < rs.size()) {
                auto B = effective_cutlocus(O, pairs, rs[i + 1], es[j]);
                for (std::size_t p = 0; p < pairs.size(); ++p) CHECK((!A.member[p] || B.member[p]));
            }
            if (j + 1 < es.size()) {
                auto B = effective_cutlocus(O, pairs, rs[i], es[j + 1]);
                for (std::size_t p = 0; p < pairs.size(); ++p) CHECK((!A.member[p] || B.member[p]));
            }
        }
}

TEST_CASE("reach agrees with a brute-force scan") {
    auto P = random_plane(60, 6);
    auto O = P.oracle();
    for (PairIndex xy : {PairIndex{1, 2}, PairIndex{5, 40}, PairIndex{10, 11}}) {
        const double thr = 0.01;
        double best = -1;
        for (std::size_t z = 0; z < 60; ++z)
            for (std::size_t w = 0; w < 60; ++w)
                if (diagonal_excess(O, xy, {z, w}) < thr)
                    best = std::max(best, product_distance(O, xy, {z, w}) / std::sqrt(2.0));
        auto R = extension_reach(O, xy, thr);
        CHECK(R.found);
        CHECK(R.rho == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("midpoints of flat pairs") {
    auto P = random_plane(3000, 7);
    auto O = P.oracle();
    auto same = midpoint_check(O, {5, 5});
    CHECK(same.z == 5);
    CHECK(same.imbalance == 0.0);
    Rng rng(8);
    int checked = 0;
    while (checked < 20) {
        std::size_t x = rng.index(3000), y = rng.index(3000);
        double d = O(x, y);
        if (d < 0.5) continue;
        auto M = midpoint_check(O, {x, y});
        CHECK(M.imbalance / d < 0.1);  // limited by the sample spacing
        CHECK(M.join_excess / d < 0.02);
        CHECK(M.diag_defect >= -1e-12);
        ++checked;
    }
}

TEST_CASE("decay fractions are probabilities and grow with r") {
    auto P = random_plane(1500, 9);
    auto O = P.oracle();
    std::vector<char> S(1500, 1);
    auto D = measure_decay(O, S, 0.1, {0.02, 0.05, 0.1, 0.2}, 0.05, 400, 1);
    CHECK(D.population > 0);
    CHECK(D.monotone);
    for (double f : D.fraction) {
        CHECK(f >= 0);
        CHECK(f <= 1);
    }
    std::vector<char> none(1500, 0);
    CHECK_THROWS(measure_decay(O, none, 0.1, {0.02, 0.05}, 0.05, 400, 1));
}

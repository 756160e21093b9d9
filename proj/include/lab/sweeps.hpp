#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lab/discrete.hpp"
#include "lab/examples.hpp"
#include "lab/gh.hpp"

namespace lab {

// -------------------------------------------------------------------- fits

struct HolderFit {
    std::vector<double> x, y;  ///< log|s - t|, log signal
    double slope = 0, intercept = 0, residual = 0;
    double ci_lo = 0, ci_hi = 0;  ///< 95% residual-bootstrap interval of the slope
};

/// Least squares in log-log over at least 5 positive points; the slope interval comes
/// from `resamples` residual-bootstrap refits drawn with `seed`.
HolderFit fit_holder(const std::vector<double>& sep, const std::vector<double>& signal, int resamples = 200,
                     std::uint64_t seed = 1);

// -------------------------------------------------------------------- fibers

/// Fixed sample of S^3 with a k-nearest-neighbour edge set chosen in the round metric.
struct FiberSample {
    std::vector<Quat> xi;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
};

FiberSample sample_fiber(std::size_t n, std::size_t k, std::uint64_t seed);

/// Graph distances of the sample under sum_j e^{2 m_j} sigma_j^2, sigma_j dual to the
/// right-invariant frame e_j q. Edge lengths are exact along one-parameter subgroups.
FiniteMetricSpace fiber_space(const FiberSample& F, const std::array<double, 3>& m);

// -------------------------------------------------------------------- cones

struct ConeSweepConfig {
    ConstantsB constants = canonical_B();
    bool constant_fiber = false;  ///< control: theta frozen at its value at r_ref
    double r_ref = 1.0;
    std::vector<double> offsets{0.005, 0.01, 0.02, 0.04, 0.08, 0.16};
    std::size_t fiber_samples = 2000, knn = 12, net = 64;
    std::vector<double> line{-0.5, 0.0, 0.5};
    std::vector<double> radial{0.0, 0.5, 1.0};
    GhOptions gh{};
    std::uint64_t seed = 1;
};

struct ConeSweepRow {
    double r1 = 0, r2 = 0;
    double coupled = 0;  ///< identity witness on the shared sample, distortion / 2
    double upper = 0;    ///< min of coupled and the annealed witness
    double lower = 0;    ///< gh_lower of the two cone balls
};

struct ConeSweepResult {
    std::vector<ConeSweepRow> rows;
    HolderFit fit;
    double noise_floor = 0;  ///< GH upper between cone balls over two independent fiber samples at r_ref
    double target = 0, forbidden = 0;  ///< (1 + delta)/2 and 1/2 + delta
    std::size_t ball_size = 0;
    bool clamped = false;
};

/// Fiber metric of the tangent cone at the ray point r: m_j(r) - 2 m0 from the limit curve.
std::array<double, 3> cone_fiber_exponents(const ConeSweepConfig& cfg, double r);

ConeSweepResult holder_cone_sweep(const ConeSweepConfig& cfg);

// -------------------------------------------------------------------- balls

struct BallSweepConfig {
    ConstantsA constants = canonical_A();
    bool constant_fiber = false;  ///< control: no rotation of the circle curve
    double base = 0.6;            ///< ray parameter s; partners at s + h
    std::vector<double> offsets{0.025, 0.0354, 0.05, 0.0707, 0.1, 0.141, 0.2};
    double radius = 0.05;
    double ell_lo = 0.5, ell_hi = 1.0;  ///< ray segment; pairs must avoid its delta-margins
    double delta = 0.1;                 ///< end margin as a fraction of the segment length
    std::size_t samples = 6000, knn = 12, net = 64;
    GhOptions gh{};
    std::uint64_t seed = 1;
};

struct BallSweepRow {
    double s = 0, t = 0;
    std::size_t size_s = 0, size_t_ = 0;
    double coupled = 0;  ///< coupled witness distortion / 2, divided by r
    double upper = 0;    ///< min(coupled, netted annealer) / r
    double lower = 0;    ///< netted lower bound / r
};

struct BallSweepResult {
    std::vector<BallSweepRow> rows;
    HolderFit fit;
    double noise_floor = 0;  ///< netted GH upper / r between two independent samplings at s
    bool monotone = true;
    bool loose = false;  ///< some upper/lower ratio exceeded 10
};

WarpedMetric sweep_metric_A(const BallSweepConfig& cfg);

BallSweepResult holder_ball_sweep(const BallSweepConfig& cfg);

// -------------------------------------------------------------------- Reifenberg

struct ReifenbergConfig {
    std::string metric = "flat";  ///< "flat" or "exampleA"
    bool exact = false;           ///< flat only: distances from the isometric embedding in R^5
    double r_anchor = 1.0, s_anchor = kPi / 2;
    std::vector<double> radii{0.1, 0.05, 0.025};
    std::size_t samples = 3000, knn = 24, net = 64;
    GhOptions gh{};
    std::uint64_t seed = 1;
};

struct ReifenbergRow {
    double r = 0;
    std::size_t size = 0;
    double upper = 0;  ///< d_GH / r against the Euclidean image of the same points
    double lower = 0;
};

struct ReifenbergResult {
    std::vector<ReifenbergRow> rows;
};

/// B_r(anchor) rescaled by 1/r against a Euclidean 5-ball. The Euclidean sample is the
/// image of the ball points under normal coordinates at the anchor (first-order chart
/// map), which serves as the correspondence witness; the netted annealer is also run.
/// Radii whose chart ball would leave the fiber's injectivity scale are rejected.
ReifenbergResult reifenberg_check(const ReifenbergConfig& cfg);

// -------------------------------------------------------------------- excess

struct ExcessSweepConfig {
    ConstantsA constants = canonical_A();
    double p = 0.25, q = 1.25, center = 0.75;  ///< ray parameters of the endpoints and ball centre
    std::vector<double> radii{0.02, 0.0277, 0.0384, 0.0532, 0.0737, 0.102, 0.142, 0.2};
    std::size_t samples = 400;  ///< points per ball
    std::uint64_t seed = 1;
};

struct ExcessSweepRow {
    double radius = 0;
    double mean = 0, max = 0;
    std::size_t proposals = 0;
};

struct ExcessSweepResult {
    std::vector<ExcessSweepRow> rows;
    HolderFit fit;  ///< log mean excess against log radius
};

/// Mean of e_{p,q} over B_R(center) for the ray points p, q, center of the first example. Distances
/// from ray points only see (r, s), so each ball is sampled by rejection from the base density
/// a^4 b^3 e^{sum m} (the fiber is Haar) and all distances come from base_distance_from_ray.
ExcessSweepResult excess_sweep(const ExcessSweepConfig& cfg);

}  // namespace lab

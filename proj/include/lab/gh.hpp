#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lab/discrete.hpp"

namespace lab {

/// Relation R between X and Y as (x, y) pairs.
struct Correspondence {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

struct GhBounds {
    double lower = 0;
    double upper = 0;
    Correspondence witness;
    double net_radius_x = 0, net_radius_y = 0;
};

/// max over pairs |d_X(x,x') - d_Y(y,y')|.
double distortion(const FiniteMetricSpace& X, const FiniteMetricSpace& Y, const Correspondence& R);

/// Every point of X and of Y appears in some pair.
bool is_correspondence(const Correspondence& R, std::size_t nx, std::size_t ny);

/// Half the minimal distortion by exhaustive branch and bound over map pairs
/// (f: X -> Y, g: Y -> X); every correspondence contains such a union.
/// pointed: index 0 of X must be related to index 0 of Y.
double gh_exact(const FiniteMetricSpace& X, const FiniteMetricSpace& Y, bool pointed = false);

/// Certified lower bound: max of the diameter bound and the distance-profile bound
/// 1/2 max( max_x min_y H(P_x, P_y), max_y min_x H(P_x, P_y) ), with P_x the multiset of
/// distances from x and H the Hausdorff distance on the line.
double gh_lower(const FiniteMetricSpace& X, const FiniteMetricSpace& Y, bool pointed = false);

struct GhOptions {
    std::uint64_t seed = 1;
    int restarts = 8;
    int iters = 4000;
    bool pointed = false;
};

/// Annealing over map pairs seeded by greedy distance-profile matching. upper is
/// distortion(witness)/2; lower is gh_lower.
GhBounds gh_upper(const FiniteMetricSpace& X, const FiniteMetricSpace& Y, const GhOptions& opt = {});

/// GH bounds after farthest-point subsampling to at most m points; the net radii are
/// added to the upper bound and subtracted from the lower bound.
GhBounds gh_netted(const FiniteMetricSpace& X, const FiniteMetricSpace& Y, std::size_t m,
                   const GhOptions& opt = {});

struct ConeSamples {
    std::vector<double> line;    ///< t values of the R factor
    std::vector<double> radial;  ///< rho values of the cone factor
};

struct ConeBall {
    FiniteMetricSpace space;
    bool clamped = false;  ///< some fiber distance exceeded pi
    std::vector<std::array<double, 2>> coords;  ///< (t, rho) per point
    std::vector<std::size_t> fiber;              ///< fiber index per point; tips carry 0
};

/// Unit ball of R x C(F) on the product grid (t, rho, fiber point); tip points are
/// kept once per t. Cone legs use the law of cosines with angle min(d_F, pi).
ConeBall cone_ball(const FiniteMetricSpace& fiber, const ConeSamples& grid);

/// Distance in R x C(F) between (t1, rho1, angle) and (t2, rho2).
double cone_distance(double t1, double rho1, double t2, double rho2, double angle);

}  // namespace lab

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lab/discrete.hpp"

namespace lab {

using PairIndex = std::pair<std::size_t, std::size_t>;

/// l2 product distance on X x X.
double product_distance(const MetricOracle& X, PairIndex a, PairIndex b);

/// e_{(z,w)}(x,y) = d(x,y)/sqrt2 + d_{MxM}((x,y),(z,w)) - d(z,w)/sqrt2.
double diagonal_excess(const MetricOracle& X, PairIndex xy, PairIndex zw);

struct DiagonalProjection {
    std::size_t z = 0;    ///< sample point realizing the distance to the diagonal
    double distance = 0;  ///< min_z sqrt(d(x,z)^2 + d(y,z)^2)
};

DiagonalProjection diagonal_projection(const MetricOracle& X, PairIndex xy);

/// Largest extension radius rho such that some (z,w) with product distance sqrt2 rho has
/// diagonal excess below `threshold` (at most `threshold` when strict is false). The pair
/// belongs to Cl(M, r, .) exactly when reach < r. Candidates are pruned exactly: e < threshold
/// forces d(z,x) + d(x,y) - d(z,y) < sqrt2 threshold, and likewise for w.
struct Reach {
    double rho = 0;
    PairIndex witness{0, 0};
    bool found = false;
};

Reach extension_reach(const MetricOracle& X, PairIndex xy, double threshold, bool strict = true);

/// Threshold used for Cl(M, r, eps): eps^2, or the strict tolerance tol when eps = 0.
Reach cutlocus_reach(const MetricOracle& X, PairIndex xy, double eps, double tol = 1e-9);

/// Membership in Cl(M, r, eps): e >= eps^2 for every (z,w) outside the open product ball of
/// radius sqrt2 r. For eps = 0 the strict version e > tol is used.
bool in_cutlocus(const MetricOracle& X, PairIndex xy, double r, double eps, double tol = 1e-9);

struct CutlocusSet {
    double r = 0, eps = 0;
    std::vector<PairIndex> candidates;
    std::vector<char> member;
    std::size_t count() const;
};

CutlocusSet effective_cutlocus(const MetricOracle& X, const std::vector<PairIndex>& pairs, double r, double eps,
                               double tol = 1e-9);

/// Uniform sample of at most cap ordered pairs x != y.
std::vector<PairIndex> sample_pairs(std::size_t n, std::size_t cap, std::uint64_t seed);

struct DecayReport {
    std::vector<double> radii, fraction;
    std::size_t population = 0;  ///< pairs in A_{delta, 1/delta}(S)
    double slope = 0, intercept = 0;
    bool monotone = true;
};

/// Fraction of pairs of A_{delta, 1/delta}(S) lying in Cl(M, r, eps) for each r. S is a
/// membership mask over the points; the diagonal projection is taken over the samples.
DecayReport measure_decay(const MetricOracle& X, const std::vector<char>& S, double delta,
                          const std::vector<double>& radii, double eps, std::size_t max_pairs, std::uint64_t seed);

struct MidpointReport {
    std::size_t z = 0;
    double imbalance = 0;    ///< |d(x,z) - d(z,y)|
    double join_excess = 0;  ///< d(x,z) + d(z,y) - d(x,y)
    double diag_defect = 0;  ///< distance to the diagonal minus d(x,y)/sqrt2
};

MidpointReport midpoint_check(const MetricOracle& X, PairIndex xy);

/// Same from the two distance rows of x and y.
MidpointReport midpoint_from_rows(const std::vector<double>& dx, const std::vector<double>& dy, std::size_t y);

}  // namespace lab

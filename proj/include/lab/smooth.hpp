#pragma once

#include <array>
#include <functional>
#include <vector>

#include "lab/warped.hpp"

namespace lab {

using Chart5 = std::array<double, 5>;
using ChartScalar = std::function<double(const Chart5&)>;

/// Coordinate metric of a warped metric in the Euler chart around q0 = 1.
std::function<Mat5(const Chart5&)> chart_metric_fn(const WarpedMetric& W);

/// Flat-cone chart point as a vector of R^5 = R x R^4: r (cos s, sin s xi).
std::array<double, 5> flat_embed(const Chart5& x);

/// Samples of a geodesic on the unit parameter interval.
struct GeodesicSamples {
    std::vector<double> t;
    std::vector<Chart5> x, v;
};

/// Geodesic x(0) = x0, x'(0) = v0 on [0, 1] via the chart geodesic equation; the
/// Christoffel symbols come from central differences of the chart metric.
GeodesicSamples chart_geodesic(const std::function<Mat5(const Chart5&)>& g, const Chart5& x0, const Chart5& v0,
                               int samples = 101, double fd_step = 1e-4);

struct JacobiCurve {
    std::vector<double> t, norm;  ///< |J|(t) in the metric
    double delta = 0;
    double c_ratio = 0;  ///< smallest c with |ratio - 1| <= c sqrt(t - s) / sqrt(delta)
    double c_log = 0;    ///< smallest c with |log(|J|^2(t) / |J|^2(s))| <= c sqrt(t - s) / sqrt(delta)
};

/// Jacobi field with J(0) = 0, J'(0) = w along the geodesic from x0 with velocity v0; the
/// linearised geodesic equation uses finite-difference Christoffel derivatives. Ratios are
/// fitted over s < t in [delta, 1 - delta].
JacobiCurve jacobi_ratio(const std::function<Mat5(const Chart5&)>& g, const Chart5& x0, const Chart5& v0,
                         const Chart5& w, double delta, int samples = 101, double fd_step = 1e-4);

/// Fits the two envelope constants for a ratio curve.
void fit_jacobi_envelope(JacobiCurve& J);

/// Squared norm |Hess f|^2 at x, with Hess f_ij = d_ij f - Gamma^k_ij d_k f.
double hessian_norm2(const std::function<Mat5(const Chart5&)>& g, const ChartScalar& f, const Chart5& x,
                     double h = 1e-4);

/// Trapezoid integral of |Hess f|^2 over the parameter interval [delta, 1 - delta].
double hessian_along_geodesic(const std::function<Mat5(const Chart5&)>& g, const GeodesicSamples& geo,
                              const ChartScalar& f, double delta, double h = 1e-4);

// ------------------------------------------------------------------ base surface

/// Distance from the ray point (r_p, s = 0) to (r, s) in the quotient surface
/// dr^2 + a(r)^2 ds^2, which equals the distance in M because the fiber action fixes the
/// ray. Minimizers are found by shooting r(s) from r_p over the launch slope.
double base_distance_from_ray(const Profile& a, double r_p, double r, double s);

}  // namespace lab

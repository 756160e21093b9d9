#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lab/profile.hpp"
#include "lab/quat.hpp"

namespace lab {

using Mat5 = Eigen::Matrix<double, 5, 5>;
using Mat3 = Eigen::Matrix3d;

/// Log-scale factors m_j(r,s) of the fiber metric and their partial derivatives.
struct FiberJet {
    std::array<double, 3> m{}, mr{}, ms{}, mrr{}, mss{};
};

class MetricFunctions {
public:
    virtual ~MetricFunctions() = default;
    virtual FiberJet eval(double r, double s) const = 0;
};

using MetricFunctionsPtr = std::shared_ptr<const MetricFunctions>;

/// Fiber functions m_j = const_j.
MetricFunctionsPtr constant_fiber(std::array<double, 3> m);

/// g = dr^2 + a(r)^2 (ds^2 + b(s)^2 sum_j e^{2 m_j} sigma_j^2)
struct WarpedMetric {
    ProfilePtr a;
    ProfilePtr b;
    MetricFunctionsPtr fiber;
    std::string id = "custom";
};

/// Flat R^5 written as the cone over the round S^4.
WarpedMetric flat_cone();

/// Random smooth configuration satisfying the structural hypotheses of the closed form:
/// a(r) = r (1 + u sin(w r + phi)), b(s) = sin s (1 + v cos s),
/// m_j = psi(s) R cos(theta(r) + 2 pi j / 3) + c with psi, theta trigonometric. Then
/// sum_j m_j is constant and sum_j m_j' dm_j/ds = 0.
WarpedMetric random_warped_metric(Rng& rng);

struct ChartPoint {
    double r = 1.0;
    double s = kPi / 2;
    Quat xi{};
};

/// Metric components in the frame (d_r, d_s, V_1, V_2, V_3).
Mat5 eval_metric(const WarpedMetric& W, const ChartPoint& p);

/// Metric in the coordinates (r, s, x1, x2, x3) where the fiber point is
/// exp(x1 e1) exp(x2 e2) exp(x3 e3) q0. Independent of q0 by right invariance.
Mat5 chart_metric(const WarpedMetric& W, const std::array<double, 5>& x);

/// Coordinate vector fields d/dx_i expressed in the right-invariant frame V_k (columns).
Mat3 euler_frame(double x1, double x2, double x3);

struct RicciDiagonal {
    double rr = 0, ss = 0;
    std::array<double, 3> jj{};
};

/// Ricci of the diagonal right-invariant metric sum e^{2m_k} sigma_k^2 on S^3 in the
/// orthonormal frame e^{-m_k} V_k, via the Koszul formula on structure constants.
std::array<double, 3> s3_ricci_orthonormal(const std::array<double, 3>& m);

/// Same, as components on the frame V_j (scaled by e^{2 m_j}).
std::array<double, 3> s3_ricci_frame(const std::array<double, 3>& m);

/// Closed-form Ricci components in the frame (d_r, d_s, V_j).
RicciDiagonal ricci_closed_form(const WarpedMetric& W, double r, double s);

/// Full Ricci tensor by finite differences of chart_metric at x = (r, s, 0, 0, 0).
/// Central differences at step h and h/2 combined by Richardson extrapolation.
Mat5 ricci_oracle(const WarpedMetric& W, const ChartPoint& p, double h = 1e-3);

/// Christoffel symbols G[l][i][j] = Gamma^l_ij and (optionally) dG[m][l][i][j] = d_m Gamma^l_ij
/// of a coordinate metric from Richardson-extrapolated central differences.
struct Christoffel {
    Mat5 g, gi;
    double G[5][5][5];
    double dG[5][5][5][5];
};

Christoffel christoffel_fd(const std::function<Mat5(const std::array<double, 5>&)>& g,
                           const std::array<double, 5>& x0, double h, bool second);

/// Ricci tensor of an arbitrary coordinate metric by the same scheme.
Mat5 ricci_fd(const std::function<Mat5(const std::array<double, 5>&)>& g,
              const std::array<double, 5>& x0, double h);

/// Eigenvalues of Ric relative to g at (r, s): rr, ss/a^2, jj/(a^2 b^2 e^{2m_j}).
std::array<double, 5> ricci_eigenvalues(const WarpedMetric& W, double r, double s);

struct MinRicci {
    double value = 0;
    double r = 0, s = 0;
    int component = -1;
};

struct Grid2 {
    std::vector<double> r, s;
};

/// Uniform grid with n points per axis on [r_lo, r_hi] x [s_lo, s_hi].
Grid2 uniform_grid(double r_lo, double r_hi, double s_lo, double s_hi, int nr, int ns);

MinRicci min_ricci_eigenvalue(const WarpedMetric& W, const Grid2& grid);

}  // namespace lab

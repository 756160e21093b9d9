#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "lab/discrete.hpp"

namespace lab {

/// Random-walk Laplacian (L u)_i = kappa / m_i * sum_j c_ij (u_j - u_i) with conductances
/// c_ij = len_ij^-2 and vertex masses m_i = number of neighbours. kappa calibrates the
/// operator against Laplace-Beltrami; 2 * dimension is exact for isotropic neighbourhoods.
struct Laplacian {
    const Graph* graph = nullptr;
    std::vector<double> mass;
    double kappa = 1.0;
    Eigen::SparseMatrix<double> C;  ///< conductance matrix, zero diagonal
    bool symmetric = true;          ///< C symmetric; false for the drift-corrected generator
};

Laplacian graph_laplacian(const Graph& g, double dimension);

/// Tangent offset of edge i -> j in an orthonormal frame at i.
using EdgeOffset = std::function<std::array<double, 5>(std::size_t, std::size_t)>;

/// Generator with linear precision: at each vertex the conductances len^-2 are tilted to
/// c_j (1 - y_j . beta) so that sum_j w_j y_j = 0 (no first-order drift), then scaled so the
/// operator is exact on |y|^2. Rows where a tilted weight would turn negative keep the
/// symmetric weights; their count is returned through `fallbacks`.
Laplacian drift_corrected_laplacian(const Graph& g, const EdgeOffset& offset, double dimension,
                                    std::size_t* fallbacks = nullptr);

std::vector<double> apply_laplacian(const Laplacian& L, const std::vector<double>& u);

/// Least-squares kappa so that L f matches `target` on vertices with mask set; returns it.
double calibrate_laplacian(Laplacian& L, const std::vector<double>& f, const std::vector<double>& target,
                           const std::vector<char>& mask);

/// Implicit Euler propagator P = (I - dt L)^{-1} for a fixed step, solved in the form
/// (M - dt kappa (C - diag C1)) u' = M u: LDLT when C is symmetric, LU otherwise.
class HeatSolver {
public:
    HeatSolver(const Laplacian& L, double dt);
    std::vector<double> step(const std::vector<double>& u) const;
    std::vector<double> flow(std::vector<double> u, int steps) const;
    /// Row x of P^steps: the discrete heat kernel seen from x (a probability vector).
    std::vector<double> kernel_row(std::size_t x, int steps) const;
    double dt() const { return dt_; }

private:
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    Eigen::VectorXd solve_transposed(const Eigen::VectorXd& b) const;
    const Laplacian& L_;
    double dt_;
    std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
    std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_, lut_;
};

/// Implicit Euler with `substeps` equal steps of size t / substeps.
std::vector<double> heat_flow(const Laplacian& L, const std::vector<double>& u0, double t, int substeps);

// ------------------------------------------------------------------ parabolic approximation

struct ParabolicReport {
    double t = 0, d_pq = 0, d_eps = 0;
    std::vector<double> h_minus, h_plus, e_t, psi;
    std::size_t interior_points = 0;   ///< low-excess points with d_p, d_q >= delta d_pq
    double max_dev = 0;                ///< max |h^pm - d^pm| on those points
    double c_dev = 0;                  ///< max_dev / (eps^2 d_pq)
    double lipschitz = 0;              ///< max edge difference quotient of h^- on M_{delta/2,4}
    double c_lip = 0;                  ///< (lipschitz - 1) / d_eps^2
    double grad_mean = 0;              ///< along the p-q path, mean over balls of ||grad h^-|^2 - 1|
    double lap_excess = 0;             ///< max d_pq * L e_t on M_{delta/2,4}
    double min_e_t = 0;
};

/// Cutoff psi(d) equal to 1 on [lo1, hi1] and 0 outside [lo0, hi0] with smooth ramps.
double annulus_cutoff(double d, double lo0, double lo1, double hi1, double hi0);

/// Flows psi d^-, psi d^+ and psi e for time (eps d_pq)^2. dp, dq are distance rows from
/// p and q (graph or exact). `checked` masks the vertices entering the deviation, gradient
/// and Laplacian checks (empty: all); use it to keep clear of the sample boundary.
ParabolicReport parabolic_approx(const Laplacian& L, const std::vector<double>& dp,
                                 const std::vector<double>& dq, std::size_t p, std::size_t q, double eps,
                                 double delta, int substeps = 16, const std::vector<char>& checked = {});

// ------------------------------------------------------------------ kernel estimates

struct HarnackReport {
    double mean_u0 = 0;          ///< average of u0 over B_r(x) in the vertex measure
    double u_r2 = 0;             ///< u_{r^2}(x)
    double c_mean_value = 0;     ///< mean_u0 / u_r2
    std::vector<double> times;
    std::vector<double> offball_mass;  ///< kernel mass outside B_r(x)
    std::vector<double> c_offball;     ///< offball_mass * r^2 / t
    std::vector<double> diag_ratio;    ///< H_t(x,x) * |B_sqrt(t)(x)|
    double slope = 0;                  ///< log-log slope of offball_mass in t
};

/// u0 = kernel row from x at time t_seed (t_seed = 0: indicator of B_r(x)). Off-ball masses
/// are measured at t / r^2 in [1/16, 1/4] on `nt` log-spaced times.
HarnackReport harnack_check(const Laplacian& L, const std::vector<double>& dx, std::size_t x, double r,
                            double t_seed, int nt = 5, int substeps = 8);

// ------------------------------------------------------------------ excess regression

struct ExcessRegression {
    std::vector<double> radii, mean_excess;
    std::vector<std::size_t> population;
    double slope = 0, intercept = 0, residual = 0;
};

/// Mean excess over balls B_r(center) from distance rows; requires min_population points per ball.
ExcessRegression excess_mean_check(const std::vector<double>& dp, const std::vector<double>& dq,
                                   const std::vector<double>& dc, double dpq, const std::vector<double>& radii,
                                   std::size_t min_population = 8);

}  // namespace lab

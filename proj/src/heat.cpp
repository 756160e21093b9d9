#include "lab/heat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lab {

Laplacian graph_laplacian(const Graph& g, double dimension) {
    if (g.n == 0) throw GraphError("graph_laplacian: empty graph");
    if (component_sizes(g).size() > 1) throw GraphError("graph_laplacian: graph is disconnected");
    Laplacian L;
    L.graph = &g;
    L.kappa = 2.0 * dimension;
    L.mass.resize(g.n);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(g.target.size());
    for (std::size_t i = 0; i < g.n; ++i) {
        L.mass[i] = static_cast<double>(g.degree(i));
        for (auto e = g.offset[i]; e < g.offset[i + 1]; ++e) {
            if (!(g.weight[e] > 0)) throw GraphError("graph_laplacian: non-positive edge weight");
            t.emplace_back(static_cast<int>(i), static_cast<int>(g.target[e]), 1.0 / (g.weight[e] * g.weight[e]));
        }
    }
    L.C.resize(static_cast<int>(g.n), static_cast<int>(g.n));
    L.C.setFromTriplets(t.begin(), t.end());
    return L;
}

Laplacian drift_corrected_laplacian(const Graph& g, const EdgeOffset& offset, double dimension,
                                    std::size_t* fallbacks) {
    Laplacian L = graph_laplacian(g, dimension);
    L.symmetric = false;
    std::vector<std::vector<Eigen::Triplet<double>>> rows(g.n);
    std::vector<char> fell(g.n, 0);
    parallel_for(g.n, [&](std::size_t i) {
        const auto deg = g.degree(i);
        Eigen::MatrixXd Y(deg, 5);
        Eigen::VectorXd c(deg);
        for (std::size_t k = 0; k < deg; ++k) {
            auto e = g.offset[i] + k;
            auto y = offset(i, g.target[e]);
            for (int a = 0; a < 5; ++a) Y(k, a) = y[a];
            c[k] = 1.0 / (g.weight[e] * g.weight[e]);
        }
        Eigen::MatrixXd S = Y.transpose() * c.asDiagonal() * Y;
        Eigen::VectorXd m = Y.transpose() * c;
        Eigen::VectorXd beta = S.completeOrthogonalDecomposition().solve(m);
        Eigen::VectorXd w = c.array() * (1.0 - (Y * beta).array());
        if (w.minCoeff() < 0) {
            w = c;
            fell[i] = 1;
        }
        double second = (w.array() * Y.rowwise().squaredNorm().array()).sum();
        L.mass[i] = second;
        for (std::size_t k = 0; k < deg; ++k)
            rows[i].emplace_back(static_cast<int>(i), static_cast<int>(g.target[g.offset[i] + k]), w[k]);
    });
    std::vector<Eigen::Triplet<double>> t;
    for (auto& r : rows) t.insert(t.end(), r.begin(), r.end());
    L.C.setZero();
    L.C.setFromTriplets(t.begin(), t.end());
    if (fallbacks) *fallbacks = static_cast<std::size_t>(std::count(fell.begin(), fell.end(), 1));
    return L;
}

namespace {

std::vector<double> raw_laplacian(const Laplacian& L, const std::vector<double>& u) {
    std::vector<double> out(u.size(), 0.0);
    for (int k = 0; k < L.C.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(L.C, k); it; ++it)
            out[it.row()] += it.value() * (u[it.col()] - u[it.row()]);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] /= L.mass[i];
    return out;
}

}  // namespace

std::vector<double> apply_laplacian(const Laplacian& L, const std::vector<double>& u) {
    auto out = raw_laplacian(L, u);
    for (double& x : out) x *= L.kappa;
    return out;
}

double calibrate_laplacian(Laplacian& L, const std::vector<double>& f, const std::vector<double>& target,
                           const std::vector<char>& mask) {
    auto raw = raw_laplacian(L, f);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < raw.size(); ++i)
        if (mask[i]) {
            num += raw[i] * target[i];
            den += raw[i] * raw[i];
        }
    if (!(den > 0)) throw DomainError("calibrate_laplacian: empty calibration set");
    L.kappa = num / den;
    return L.kappa;
}

HeatSolver::HeatSolver(const Laplacian& L, double dt) : L_(L), dt_(dt) {
    if (!(dt > 0)) throw DomainError("HeatSolver: step must be positive");
    const int n = static_cast<int>(L.mass.size());
    Eigen::SparseMatrix<double> A = -dt * L.kappa * L.C;
    Eigen::VectorXd rows = L.C * Eigen::VectorXd::Ones(n);
    std::vector<Eigen::Triplet<double>> d;
    for (int i = 0; i < n; ++i) d.emplace_back(i, i, L.mass[i] + dt * L.kappa * rows[i]);
    Eigen::SparseMatrix<double> D(n, n);
    D.setFromTriplets(d.begin(), d.end());
    A += D;
    A.makeCompressed();
    if (L.symmetric) {
        ldlt_ = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
        ldlt_->compute(A);
        if (ldlt_->info() != Eigen::Success) throw std::runtime_error("HeatSolver: factorization failed");
    } else {
        lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
        lu_->compute(A);
        Eigen::SparseMatrix<double> At = A.transpose();
        At.makeCompressed();
        lut_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
        lut_->compute(At);
        if (lu_->info() != Eigen::Success || lut_->info() != Eigen::Success)
            throw std::runtime_error("HeatSolver: factorization failed");
    }
}

Eigen::VectorXd HeatSolver::solve(const Eigen::VectorXd& b) const {
    return ldlt_ ? Eigen::VectorXd(ldlt_->solve(b)) : Eigen::VectorXd(lu_->solve(b));
}

Eigen::VectorXd HeatSolver::solve_transposed(const Eigen::VectorXd& b) const {
    return ldlt_ ? Eigen::VectorXd(ldlt_->solve(b)) : Eigen::VectorXd(lut_->solve(b));
}

std::vector<double> HeatSolver::step(const std::vector<double>& u) const {
    const int n = static_cast<int>(u.size());
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b[i] = L_.mass[i] * u[i];
    Eigen::VectorXd x = solve(b);
    return {x.data(), x.data() + n};
}

std::vector<double> HeatSolver::flow(std::vector<double> u, int steps) const {
    for (int k = 0; k < steps; ++k) u = step(u);
    return u;
}

std::vector<double> HeatSolver::kernel_row(std::size_t x, int steps) const {
    // row x of (A^{-1} M)^steps, accumulated as v <- M A^{-T} v
    const int n = static_cast<int>(L_.mass.size());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v[static_cast<int>(x)] = 1.0;
    for (int k = 0; k < steps; ++k) {
        v = solve_transposed(v);
        for (int i = 0; i < n; ++i) v[i] *= L_.mass[i];
    }
    return {v.data(), v.data() + n};
}

std::vector<double> heat_flow(const Laplacian& L, const std::vector<double>& u0, double t, int substeps) {
    if (t < 0) throw DomainError("heat_flow: negative time");
    if (t == 0 || substeps <= 0) return u0;
    HeatSolver S(L, t / substeps);
    return S.flow(u0, substeps);
}

// ------------------------------------------------------------------ parabolic approximation

double annulus_cutoff(double d, double lo0, double lo1, double hi1, double hi0) {
    if (d <= lo0 || d >= hi0) return 0.0;
    if (d < lo1) return smoothstep7((d - lo0) / (lo1 - lo0));
    if (d > hi1) return smoothstep7((hi0 - d) / (hi0 - hi1));
    return 1.0;
}

ParabolicReport parabolic_approx(const Laplacian& L, const std::vector<double>& dp, const std::vector<double>& dq,
                                 std::size_t p, std::size_t q, double eps, double delta, int substeps,
                                 const std::vector<char>& checked) {
    const Graph& g = *L.graph;
    const std::size_t n = g.n;
    if (!checked.empty() && checked.size() != n) throw DomainError("parabolic_approx: mask size mismatch");
    auto ok = [&](std::size_t i) { return checked.empty() || checked[i]; };
    ParabolicReport R;
    R.d_pq = dp[q];
    R.d_eps = eps * R.d_pq;
    R.t = R.d_eps * R.d_eps;
    if (!(eps > 0 && eps < 1) || !(delta > 0 && delta < 1)) throw DomainError("parabolic_approx: eps, delta must lie in (0,1)");
    double reach = *std::max_element(dp.begin(), dp.end());
    if (10 * R.d_eps > reach) throw DomainError("parabolic_approx: eps too large for the sampled region");

    const double D = R.d_pq;
    R.psi.resize(n);
    std::vector<double> h0m(n), h0p(n), e0(n);
    for (std::size_t i = 0; i < n; ++i) {
        double pm = annulus_cutoff(dp[i] / D, delta / 16, delta / 4, 8, 16);
        double pp = annulus_cutoff(dq[i] / D, delta / 16, delta / 4, 8, 16);
        R.psi[i] = pm * pp;
        h0m[i] = R.psi[i] * dp[i];
        h0p[i] = R.psi[i] * (D - dq[i]);
        e0[i] = R.psi[i] * (dp[i] + dq[i] - D);
    }
    HeatSolver S(L, R.t / substeps);
    R.h_minus = S.flow(h0m, substeps);
    R.h_plus = S.flow(h0p, substeps);
    R.e_t = S.flow(e0, substeps);
    R.min_e_t = *std::min_element(R.e_t.begin(), R.e_t.end());

    auto in_M = [&](std::size_t i, double lo, double hi) {
        return ok(i) && dp[i] >= lo * D && dp[i] <= hi * D && dq[i] >= lo * D && dq[i] <= hi * D;
    };
    auto lap_e = apply_laplacian(L, R.e_t);
    for (std::size_t i = 0; i < n; ++i) {
        double e = dp[i] + dq[i] - D;
        if (ok(i) && e <= eps * eps * D && dp[i] >= delta * D && dq[i] >= delta * D) {
            ++R.interior_points;
            R.max_dev = std::max({R.max_dev, std::abs(R.h_minus[i] - dp[i]), std::abs(R.h_plus[i] - (D - dq[i]))});
        }
        if (in_M(i, delta / 2, 4)) {
            R.lap_excess = std::max(R.lap_excess, D * lap_e[i]);
            for (auto k = g.offset[i]; k < g.offset[i + 1]; ++k) {
                auto j = g.target[k];
                if (!in_M(j, delta / 2, 4)) continue;
                R.lipschitz = std::max(R.lipschitz, std::abs(R.h_minus[j] - R.h_minus[i]) / g.weight[k]);
            }
        }
    }
    R.c_dev = R.max_dev / (eps * eps * D);
    R.c_lip = (R.lipschitz - 1.0) / (R.d_eps * R.d_eps);

    // gradient defect along the p-q path, averaged over balls of radius 10 d_eps
    auto grad = [&](std::size_t i) {
        double m = 0;
        for (auto k = g.offset[i]; k < g.offset[i + 1]; ++k)
            m = std::max(m, std::abs(R.h_minus[g.target[k]] - R.h_minus[i]) / g.weight[k]);
        return m;
    };
    auto path = shortest_path_to(g, dq, p);
    std::vector<std::size_t> centers;
    for (auto v : path.vertices)
        if (dp[v] >= delta * D && dp[v] <= (1 - delta) * D) centers.push_back(v);
    std::vector<double> means(centers.size(), 0.0);
    parallel_for(centers.size(), [&](std::size_t c) {
        auto dc = dijkstra(g, centers[c]);
        double s = 0;
        std::size_t cnt = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (ok(i) && dc[i] <= 10 * R.d_eps) {
                double gr = grad(i);
                s += std::abs(gr * gr - 1.0);
                ++cnt;
            }
        means[c] = cnt ? s / cnt : 0.0;
    });
    double tot = 0;
    for (double m : means) tot += m;
    R.grad_mean = means.empty() ? 0.0 : tot / means.size();
    return R;
}

// ------------------------------------------------------------------ kernel estimates

HarnackReport harnack_check(const Laplacian& L, const std::vector<double>& dx, std::size_t x, double r,
                            double t_seed, int nt, int substeps) {
    const std::size_t n = dx.size();
    HarnackReport H;
    double mbar = 0;
    for (double m : L.mass) mbar += m;
    mbar /= n;
    auto mu = [&](std::size_t i) { return L.mass[i] / mbar; };
    auto ball_measure = [&](double rad) {
        double v = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (dx[i] <= rad) v += mu(i);
        return v;
    };

    // mean value inequality for u0 >= 0 solving the heat equation
    std::vector<double> u0(n, 0.0);
    if (t_seed > 0) {
        HeatSolver S(L, t_seed / substeps);
        auto row = S.kernel_row(x, substeps);
        for (std::size_t i = 0; i < n; ++i) u0[i] = row[i] / mu(i);
    } else {
        for (std::size_t i = 0; i < n; ++i) u0[i] = dx[i] <= r ? 1.0 : 0.0;
    }
    double num = 0, vol = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (dx[i] <= r) {
            num += u0[i] * mu(i);
            vol += mu(i);
        }
    H.mean_u0 = vol > 0 ? num / vol : 0.0;
    H.u_r2 = heat_flow(L, u0, r * r, substeps)[x];
    H.c_mean_value = H.u_r2 > 0 ? H.mean_u0 / H.u_r2 : (H.mean_u0 == 0 ? 0.0 : std::numeric_limits<double>::infinity());

    // kernel masses
    std::vector<double> lt, lm;
    for (int k = 0; k < nt; ++k) {
        double frac = (1.0 / 16) * std::pow(4.0, nt == 1 ? 0.0 : double(k) / (nt - 1));
        double t = frac * r * r;
        HeatSolver S(L, t / substeps);
        auto row = S.kernel_row(x, substeps);
        double off = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (dx[i] > r) off += row[i];
        H.times.push_back(t);
        H.offball_mass.push_back(off);
        H.c_offball.push_back(off * r * r / t);
        H.diag_ratio.push_back(row[x] / mu(x) * ball_measure(std::sqrt(t)));
        if (off > 0) {
            lt.push_back(std::log(t));
            lm.push_back(std::log(off));
        }
    }
    if (lt.size() >= 2) H.slope = fit_line(lt, lm).slope;
    return H;
}

// ------------------------------------------------------------------ excess regression

ExcessRegression excess_mean_check(const std::vector<double>& dp, const std::vector<double>& dq,
                                   const std::vector<double>& dc, double dpq, const std::vector<double>& radii,
                                   std::size_t min_population) {
    ExcessRegression E;
    std::vector<double> lx, ly;
    for (double r : radii) {
        double s = 0;
        std::size_t cnt = 0;
        for (std::size_t i = 0; i < dc.size(); ++i)
            if (dc[i] <= r) {
                s += dp[i] + dq[i] - dpq;
                ++cnt;
            }
        if (cnt < min_population) throw DomainError("excess_mean_check: insufficient ball population");
        E.radii.push_back(r);
        E.population.push_back(cnt);
        E.mean_excess.push_back(s / cnt);
        if (s > 0) {
            lx.push_back(std::log(r));
            ly.push_back(std::log(s / cnt));
        }
    }
    if (lx.size() >= 2) {
        auto f = fit_line(lx, ly);
        E.slope = f.slope;
        E.intercept = f.intercept;
        E.residual = f.residual;
    }
    return E;
}

}  // namespace lab

#include "lab/warped.hpp"

#include <cmath>
#include <limits>

namespace lab {

namespace {

class ConstantFiber : public MetricFunctions {
public:
    explicit ConstantFiber(std::array<double, 3> m) : m_(m) {}
    FiberJet eval(double, double) const override {
        FiberJet j;
        j.m = m_;
        return j;
    }

private:
    std::array<double, 3> m_;
};

void check_point(double r, double s) {
    if (!(r > 0)) throw DomainError("cone tip or negative radius");
    if (!(s > 0 && s < kPi)) throw DomainError("point on a singular ray");
}

// Levi-Civita symbol on {0,1,2}
double eps3(int i, int j, int k) {
    if (i == j || j == k || i == k) return 0.0;
    return ((i + 1) % 3 == j) ? 1.0 : -1.0;
}

}  // namespace

MetricFunctionsPtr constant_fiber(std::array<double, 3> m) {
    return std::make_shared<ConstantFiber>(m);
}

WarpedMetric flat_cone() {
    return {identity_profile(), sine_profile(), constant_fiber({0, 0, 0}), "flat"};
}

Mat5 eval_metric(const WarpedMetric& W, const ChartPoint& p) {
    check_point(p.r, p.s);
    double a = W.a->value(p.r), b = W.b->value(p.s);
    FiberJet f = W.fiber->eval(p.r, p.s);
    Mat5 g = Mat5::Zero();
    g(0, 0) = 1.0;
    g(1, 1) = a * a;
    for (int j = 0; j < 3; ++j) g(2 + j, 2 + j) = a * a * b * b * std::exp(2.0 * f.m[j]);
    return g;
}

Mat3 euler_frame(double x1, double x2, double x3) {
    (void)x3;
    Quat q1 = quat_exp({x1, 0, 0});
    Quat q12 = q1 * quat_exp({0, x2, 0});
    Vec3 c2 = quat_rotate(q1, {0, 1, 0});
    Vec3 c3 = quat_rotate(q12, {0, 0, 1});
    Mat3 C;
    C << 1, c2[0], c3[0], 0, c2[1], c3[1], 0, c2[2], c3[2];
    return C;
}

Mat5 chart_metric(const WarpedMetric& W, const std::array<double, 5>& x) {
    check_point(x[0], x[1]);
    double a = W.a->value(x[0]), b = W.b->value(x[1]);
    FiberJet f = W.fiber->eval(x[0], x[1]);
    Mat3 C = euler_frame(x[2], x[3], x[4]);
    Mat3 D = Mat3::Zero();
    for (int j = 0; j < 3; ++j) D(j, j) = std::exp(2.0 * f.m[j]);
    Mat5 g = Mat5::Zero();
    g(0, 0) = 1.0;
    g(1, 1) = a * a;
    g.block<3, 3>(2, 2) = a * a * b * b * (C.transpose() * D * C);
    return g;
}

std::array<double, 3> s3_ricci_orthonormal(const std::array<double, 3>& m) {
    // [V_i, V_j] = -2 eps_ijk V_k for the right-invariant fields q -> e_i q
    double C[3][3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                C[i][j][k] = -2.0 * eps3(i, j, k) * std::exp(m[k] - m[i] - m[j]);
    // Gamma[i][j][k] = <nabla_{E_i} E_j, E_k>
    double G[3][3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                G[i][j][k] = 0.5 * (C[i][j][k] - C[j][k][i] + C[k][i][j]);
    std::array<double, 3> ric{};
    for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (int a = 0; a < 3; ++a) {
            // <R(E_a,E_c)E_c, E_a>
            double v = 0.0;
            for (int d = 0; d < 3; ++d) {
                v += G[c][c][d] * G[a][d][a];
                v -= G[a][c][d] * G[c][d][a];
                v -= C[a][c][d] * G[d][c][a];
            }
            sum += v;
        }
        ric[c] = sum;
    }
    return ric;
}

std::array<double, 3> s3_ricci_frame(const std::array<double, 3>& m) {
    auto o = s3_ricci_orthonormal(m);
    for (int j = 0; j < 3; ++j) o[j] *= std::exp(2.0 * m[j]);
    return o;
}

RicciDiagonal ricci_closed_form(const WarpedMetric& W, double r, double s) {
    check_point(r, s);
    Jet a = W.a->eval(r), b = W.b->eval(s);
    FiberJet f = W.fiber->eval(r, s);
    const double A2 = a.d2 / a.v, A1 = a.d1 / a.v, B2 = b.d2 / b.v, B1 = b.d1 / b.v;
    RicciDiagonal R;
    double smr = 0, sms = 0;
    for (int k = 0; k < 3; ++k) {
        smr += f.mr[k] * f.mr[k];
        sms += f.ms[k] * f.ms[k];
    }
    R.rr = -4.0 * A2 - smr;
    R.ss = -3.0 * B2 - sms + a.v * a.v * (-A2 - 3.0 * A1 * A1);
    auto s3 = s3_ricci_frame(f.m);
    for (int j = 0; j < 3; ++j) {
        double e = std::exp(2.0 * f.m[j]);
        double bt = b.v * b.v * (-B2 - 2.0 * B1 * B1 - 3.0 * B1 * f.ms[j] - f.mss[j]);
        double at = a.v * a.v * b.v * b.v *
                    (-A2 - 3.0 * A1 * A1 - 4.0 * A1 * f.mr[j] - f.mrr[j]);
        R.jj[j] = s3[j] + e * (bt + at);
    }
    return R;
}

std::array<double, 5> ricci_eigenvalues(const WarpedMetric& W, double r, double s) {
    RicciDiagonal R = ricci_closed_form(W, r, s);
    double a = W.a->value(r), b = W.b->value(s);
    FiberJet f = W.fiber->eval(r, s);
    std::array<double, 5> e{};
    e[0] = R.rr;
    e[1] = R.ss / (a * a);
    for (int j = 0; j < 3; ++j) e[2 + j] = R.jj[j] / (a * a * b * b * std::exp(2.0 * f.m[j]));
    return e;
}

namespace {

struct Derivs {
    std::array<Mat5, 5> d1;
    std::array<std::array<Mat5, 5>, 5> d2;
};

Derivs fd_derivatives(const std::function<Mat5(const std::array<double, 5>&)>& g,
                      const std::array<double, 5>& x0, double h, const Mat5& g0, bool second = true) {
    Derivs D;
    auto shifted = [&](int i, double di, int j, double dj) {
        std::array<double, 5> x = x0;
        x[i] += di;
        if (j >= 0) x[j] += dj;
        return g(x);
    };
    std::array<Mat5, 5> gp, gm;
    for (int i = 0; i < 5; ++i) {
        gp[i] = shifted(i, h, -1, 0);
        gm[i] = shifted(i, -h, -1, 0);
        D.d1[i] = (gp[i] - gm[i]) / (2.0 * h);
        D.d2[i][i] = (gp[i] - 2.0 * g0 + gm[i]) / (h * h);
    }
    if (!second) return D;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) {
            Mat5 v = (shifted(i, h, j, h) - shifted(i, h, j, -h) - shifted(i, -h, j, h) +
                      shifted(i, -h, j, -h)) /
                     (4.0 * h * h);
            D.d2[i][j] = v;
            D.d2[j][i] = v;
        }
    return D;
}

}  // namespace

Christoffel christoffel_fd(const std::function<Mat5(const std::array<double, 5>&)>& g,
                           const std::array<double, 5>& x0, double h, bool second) {
    Christoffel C;
    C.g = g(x0);
    Derivs A = fd_derivatives(g, x0, h, C.g, second);
    Derivs B = fd_derivatives(g, x0, 0.5 * h, C.g, second);
    Derivs D;
    for (int i = 0; i < 5; ++i) {
        D.d1[i] = (4.0 * B.d1[i] - A.d1[i]) / 3.0;
        if (second)
            for (int j = 0; j < 5; ++j) D.d2[i][j] = (4.0 * B.d2[i][j] - A.d2[i][j]) / 3.0;
    }
    C.gi = C.g.inverse();
    // first kind: G1[k](i,j) = Gamma_{k,ij}
    double G1[5][5][5];
    for (int k = 0; k < 5; ++k)
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                G1[k][i][j] = 0.5 * (D.d1[i](j, k) + D.d1[j](i, k) - D.d1[k](i, j));
    for (int l = 0; l < 5; ++l)
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                double v = 0;
                for (int k = 0; k < 5; ++k) v += C.gi(l, k) * G1[k][i][j];
                C.G[l][i][j] = v;
            }
    if (!second) return C;
    std::array<Mat5, 5> dgi;
    for (int m = 0; m < 5; ++m) dgi[m] = -C.gi * D.d1[m] * C.gi;
    for (int m = 0; m < 5; ++m)
        for (int l = 0; l < 5; ++l)
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) {
                    double v = 0;
                    for (int k = 0; k < 5; ++k) {
                        double dg1 = 0.5 * (D.d2[m][i](j, k) + D.d2[m][j](i, k) - D.d2[m][k](i, j));
                        v += dgi[m](l, k) * G1[k][i][j] + C.gi(l, k) * dg1;
                    }
                    C.dG[m][l][i][j] = v;
                }
    return C;
}

Mat5 ricci_fd(const std::function<Mat5(const std::array<double, 5>&)>& g,
              const std::array<double, 5>& x0, double h) {
    const Christoffel C = christoffel_fd(g, x0, h, true);
    Mat5 R = Mat5::Zero();
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            double v = 0;
            for (int l = 0; l < 5; ++l) {
                v += C.dG[l][l][i][j] - C.dG[j][l][i][l];
                for (int m = 0; m < 5; ++m)
                    v += C.G[l][l][m] * C.G[m][i][j] - C.G[l][j][m] * C.G[m][i][l];
            }
            R(i, j) = v;
        }
    return R;
}

Mat5 ricci_oracle(const WarpedMetric& W, const ChartPoint& p, double h) {
    check_point(p.r, p.s);
    if (!(p.r - h > 0) || !(p.s - h > 0) || !(p.s + h < kPi))
        throw DomainError("ricci_oracle: finite-difference stencil leaves the chart");
    auto g = [&W](const std::array<double, 5>& x) { return chart_metric(W, x); };
    return ricci_fd(g, {p.r, p.s, 0, 0, 0}, h);
}

Grid2 uniform_grid(double r_lo, double r_hi, double s_lo, double s_hi, int nr, int ns) {
    Grid2 g;
    for (int i = 0; i < nr; ++i) g.r.push_back(nr == 1 ? r_lo : r_lo + (r_hi - r_lo) * i / (nr - 1));
    for (int i = 0; i < ns; ++i) g.s.push_back(ns == 1 ? s_lo : s_lo + (s_hi - s_lo) * i / (ns - 1));
    return g;
}

MinRicci min_ricci_eigenvalue(const WarpedMetric& W, const Grid2& grid) {
    MinRicci out;
    out.value = std::numeric_limits<double>::infinity();
    for (double r : grid.r)
        for (double s : grid.s) {
            auto e = ricci_eigenvalues(W, r, s);
            for (int k = 0; k < 5; ++k)
                if (e[k] < out.value) out = {e[k], r, s, k};
        }
    return out;
}

namespace {

class CircleFiber : public MetricFunctions {
public:
    double R, c, p1, p2, k, t1, t2, om;
    FiberJet eval(double r, double s) const override {
        // psi(s) = p1 + p2 cos(k s), theta(r) = t1 + t2 sin(om r)
        double ps = p1 + p2 * std::cos(k * s), ps1 = -p2 * k * std::sin(k * s), ps2 = -p2 * k * k * std::cos(k * s);
        double th = t1 + t2 * std::sin(om * r), th1 = t2 * om * std::cos(om * r), th2 = -t2 * om * om * std::sin(om * r);
        FiberJet J;
        for (int j = 0; j < 3; ++j) {
            double ang = th + 2 * kPi * j / 3, C = std::cos(ang), S = std::sin(ang);
            J.m[j] = ps * R * C + c;
            J.mr[j] = -ps * R * S * th1;
            J.mrr[j] = -ps * R * (C * th1 * th1 + S * th2);
            J.ms[j] = ps1 * R * C;
            J.mss[j] = ps2 * R * C;
        }
        return J;
    }
};

}  // namespace

WarpedMetric random_warped_metric(Rng& rng) {
    double u = rng.uniform(-0.3, 0.3), w = rng.uniform(0.5, 3.0), phi = rng.uniform(0, 2 * kPi);
    double v = rng.uniform(-0.5, 0.5);
    auto F = std::make_shared<CircleFiber>();
    F->R = rng.uniform(0.05, 0.5);
    F->c = rng.uniform(-1.0, 0.5);
    F->p1 = rng.uniform(0.5, 1.0);
    F->p2 = rng.uniform(-0.5, 0.5);
    F->k = rng.uniform(0.5, 3.0);
    F->t1 = rng.uniform(0, 2 * kPi);
    F->t2 = rng.uniform(-1.0, 1.0);
    F->om = rng.uniform(0.5, 4.0);
    WarpedMetric W;
    W.a = make_profile([u, w, phi](double r) {
        double S = std::sin(w * r + phi), C = std::cos(w * r + phi);
        return Jet{r * (1 + u * S), 1 + u * S + r * u * w * C, 2 * u * w * C - r * u * w * w * S};
    });
    W.b = make_profile([v](double s) {
        double S = std::sin(s), C = std::cos(s);
        return Jet{S * (1 + v * C), C * (1 + v * C) - v * S * S, -S * (1 + v * C) - 3 * v * S * C};
    });
    W.fiber = F;
    W.id = "random";
    return W;
}

}  // namespace lab

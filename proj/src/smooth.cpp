#include "lab/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/numeric/odeint.hpp>

namespace lab {

namespace odeint = boost::numeric::odeint;

std::function<Mat5(const Chart5&)> chart_metric_fn(const WarpedMetric& W) {
    return [W](const Chart5& x) { return chart_metric(W, x); };
}

std::array<double, 5> flat_embed(const Chart5& x) {
    Quat xi = quat_exp({x[2], 0, 0}) * quat_exp({0, x[3], 0}) * quat_exp({0, 0, x[4]});
    double c = std::cos(x[1]), s = std::sin(x[1]);
    return {x[0] * c, x[0] * s * xi.w, x[0] * s * xi.x, x[0] * s * xi.y, x[0] * s * xi.z};
}

namespace {

using State = std::vector<double>;
using Stepper = odeint::runge_kutta_dopri5<State>;

Chart5 slice(const State& y, int off) {
    Chart5 c;
    for (int i = 0; i < 5; ++i) c[i] = y[off + i];
    return c;
}

}  // namespace

GeodesicSamples chart_geodesic(const std::function<Mat5(const Chart5&)>& g, const Chart5& x0, const Chart5& v0,
                               int samples, double fd_step) {
    auto rhs = [&](const State& y, State& dy, double) {
        Chart5 x = slice(y, 0);
        auto C = christoffel_fd(g, x, fd_step, false);
        for (int l = 0; l < 5; ++l) {
            dy[l] = y[5 + l];
            double a = 0;
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) a += C.G[l][i][j] * y[5 + i] * y[5 + j];
            dy[5 + l] = -a;
        }
    };
    State y(10);
    for (int i = 0; i < 5; ++i) y[i] = x0[i], y[5 + i] = v0[i];
    GeodesicSamples out;
    std::vector<double> times;
    for (int k = 0; k < samples; ++k) times.push_back(double(k) / (samples - 1));
    odeint::integrate_times(odeint::make_dense_output(1e-10, 1e-10, Stepper()), rhs, y, times.begin(), times.end(),
                            1e-3, [&](const State& s, double t) {
                                out.t.push_back(t);
                                out.x.push_back(slice(s, 0));
                                out.v.push_back(slice(s, 5));
                            });
    return out;
}

void fit_jacobi_envelope(JacobiCurve& J) {
    J.c_ratio = J.c_log = 0;
    const double d = J.delta;
    for (std::size_t a = 0; a < J.t.size(); ++a) {
        if (J.t[a] < d - 1e-12 || J.t[a] > 1 - d + 1e-12) continue;
        for (std::size_t b = a + 1; b < J.t.size(); ++b) {
            if (J.t[b] > 1 - d + 1e-12) break;
            double w = std::sqrt(J.t[b] - J.t[a]) / std::sqrt(d);
            double ratio = J.norm[b] / J.norm[a];
            J.c_ratio = std::max(J.c_ratio, std::abs(ratio - 1) / w);
            J.c_log = std::max(J.c_log, std::abs(2 * std::log(ratio)) / w);
        }
    }
}

JacobiCurve jacobi_ratio(const std::function<Mat5(const Chart5&)>& g, const Chart5& x0, const Chart5& v0,
                         const Chart5& w, double delta, int samples, double fd_step) {
    if (!(delta > 0 && delta < 0.5)) throw DomainError("jacobi_ratio: delta must lie in (0, 1/2)");
    auto rhs = [&](const State& y, State& dy, double) {
        Chart5 x = slice(y, 0);
        auto C = christoffel_fd(g, x, fd_step, true);
        for (int l = 0; l < 5; ++l) {
            dy[l] = y[5 + l];
            dy[10 + l] = y[15 + l];
            double a = 0, b = 0;
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) {
                    double vv = y[5 + i] * y[5 + j];
                    a += C.G[l][i][j] * vv;
                    double dg = 0;
                    for (int m = 0; m < 5; ++m) dg += C.dG[m][l][i][j] * y[10 + m];
                    b += dg * vv + 2.0 * C.G[l][i][j] * y[5 + i] * y[15 + j];
                }
            dy[5 + l] = -a;
            dy[15 + l] = -b;
        }
    };
    State y(20, 0.0);
    for (int i = 0; i < 5; ++i) y[i] = x0[i], y[5 + i] = v0[i], y[15 + i] = w[i];
    JacobiCurve J;
    J.delta = delta;
    std::vector<double> times;
    for (int k = 0; k < samples; ++k) times.push_back(double(k) / (samples - 1));
    try {
        odeint::integrate_times(odeint::make_dense_output(1e-10, 1e-10, Stepper()), rhs, y, times.begin(),
                                times.end(), 1e-3, [&](const State& s, double t) {
                                    Chart5 x = slice(s, 0);
                                    Eigen::Matrix<double, 5, 1> j;
                                    for (int i = 0; i < 5; ++i) j[i] = s[10 + i];
                                    J.t.push_back(t);
                                    J.norm.push_back(std::sqrt(j.dot(g(x) * j)));
                                });
    } catch (const odeint::step_adjustment_error& e) {
        throw std::runtime_error(std::string("jacobi_ratio: ODE step failure: ") + e.what());
    }
    fit_jacobi_envelope(J);
    return J;
}

double hessian_norm2(const std::function<Mat5(const Chart5&)>& g, const ChartScalar& f, const Chart5& x, double h) {
    auto C = christoffel_fd(g, x, h, false);
    // Richardson-extrapolated derivatives of f
    auto derivs = [&](double s, std::array<double, 5>& d1, std::array<std::array<double, 5>, 5>& d2) {
        double f0 = f(x);
        auto sh = [&](int i, double di, int j, double dj) {
            Chart5 y = x;
            y[i] += di;
            if (j >= 0) y[j] += dj;
            return f(y);
        };
        for (int i = 0; i < 5; ++i) {
            double p = sh(i, s, -1, 0), m = sh(i, -s, -1, 0);
            d1[i] = (p - m) / (2 * s);
            d2[i][i] = (p - 2 * f0 + m) / (s * s);
        }
        for (int i = 0; i < 5; ++i)
            for (int j = i + 1; j < 5; ++j)
                d2[i][j] = d2[j][i] =
                    (sh(i, s, j, s) - sh(i, s, j, -s) - sh(i, -s, j, s) + sh(i, -s, j, -s)) / (4 * s * s);
    };
    std::array<double, 5> a1, b1;
    std::array<std::array<double, 5>, 5> a2, b2;
    derivs(2 * h, a1, a2);
    derivs(h, b1, b2);
    Mat5 H;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            double v = (4 * b2[i][j] - a2[i][j]) / 3;
            for (int k = 0; k < 5; ++k) v -= C.G[k][i][j] * (4 * b1[k] - a1[k]) / 3;
            H(i, j) = v;
        }
    Mat5 A = C.gi * H;
    return (A * A).trace();
}

double hessian_along_geodesic(const std::function<Mat5(const Chart5&)>& g, const GeodesicSamples& geo,
                              const ChartScalar& f, double delta, double h) {
    double I = 0, prev_t = 0, prev_v = 0;
    bool have = false;
    for (std::size_t k = 0; k < geo.t.size(); ++k) {
        double t = geo.t[k];
        if (t < delta - 1e-12 || t > 1 - delta + 1e-12) continue;
        double v = hessian_norm2(g, f, geo.x[k], h);
        if (have) I += 0.5 * (v + prev_v) * (t - prev_t);
        prev_t = t;
        prev_v = v;
        have = true;
    }
    return I;
}

// ------------------------------------------------------------------ base surface

namespace {

// unit-speed geodesic of dr^2 + a^2 ds^2: r' = sin th, s' = cos th / a, th' = a' cos th / a
struct BaseRhs {
    const Profile& a;
    void operator()(const State& y, State& dy, double) const {
        Jet j = a.eval(std::max(y[0], 1e-9));  // trial stages may probe past the tip
        dy[0] = std::sin(y[2]);
        dy[1] = std::cos(y[2]) / j.v;
        dy[2] = j.d1 * std::cos(y[2]) / j.v;
    }
};

struct Hit {
    bool ok = false;
    double r = 0, tau = 0;
    // misses: r = +inf if the curve escaped outward before reaching s_target, -inf if it fell into the tip
};

// r and arclength where the geodesic launched at angle th first reaches s_target
Hit shoot(const Profile& a, double r_p, double th, double s_target, double tau_max) {
    BaseRhs rhs{a};
    State y{r_p, 0.0, th};
    auto st = odeint::make_dense_output(1e-11, 1e-11, Stepper());
    st.initialize(y, 0.0, 1e-3);
    Hit h;
    h.r = -std::numeric_limits<double>::infinity();
    while (st.current_time() < tau_max) {
        st.do_step(rhs);
        const State& c = st.current_state();
        if (c[0] <= 1e-6) return h;
        if (st.current_time() >= tau_max) {
            h.r = std::sin(c[2]) > 0 ? std::numeric_limits<double>::infinity()
                                      : -std::numeric_limits<double>::infinity();
            return h;
        }
        if (c[1] >= s_target) {
            double lo = st.previous_time(), hi = st.current_time();
            State tmp(3);
            for (int it = 0; it < 80 && hi - lo > 1e-14; ++it) {
                double mid = 0.5 * (lo + hi);
                st.calc_state(mid, tmp);
                (tmp[1] >= s_target ? hi : lo) = mid;
            }
            st.calc_state(hi, tmp);
            h.ok = true;
            h.r = tmp[0];
            h.tau = hi;
            return h;
        }
    }
    return h;
}

}  // namespace

double base_distance_from_ray(const Profile& a, double r_p, double r, double s) {
    if (!(r_p > 0) || !(r > 0) || s < 0 || s > kPi) throw DomainError("base_distance_from_ray: bad point");
    if (s == 0) return std::abs(r - r_p);
    // Any curve has length >= |dr|, and at most the path along s = 0 then the arc at radius r.
    double tau_max = 2.0 * (std::abs(r - r_p) + a.value(r) * s) + 1e-9;
    double target = r;
    std::vector<double> ths;
    const int K = 48;
    for (int k = 1; k < K; ++k) ths.push_back(-kPi / 2 + kPi * k / K);
    for (int j = 1; j <= 10; ++j) {
        double e = std::pow(10.0, -j) * kPi / 2;
        ths.push_back(-kPi / 2 + e);
        ths.push_back(kPi / 2 - e);
    }
    std::sort(ths.begin(), ths.end());
    std::vector<Hit> hits;
    for (double th : ths) hits.push_back(shoot(a, r_p, th, s, tau_max));
    double best = std::abs(r - r_p) + a.value(r) * s;  // broken path along the ray then the arc
    best = std::min(best, std::abs(r - r_p) + a.value(r_p) * s);
    // misses count as r = +-inf, so sign changes bracket every root
    for (std::size_t k = 0; k + 1 < ths.size(); ++k) {
        double f0 = hits[k].r - target, f1 = hits[k + 1].r - target;
        if (hits[k].ok && f0 == 0) {
            best = std::min(best, hits[k].tau);
            continue;
        }
        if ((f0 < 0) == (f1 < 0)) continue;
        double lo = ths[k], hi = ths[k + 1];
        bool lo_neg = f0 < 0;
        Hit h;
        for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
            double mid = 0.5 * (lo + hi);
            h = shoot(a, r_p, mid, s, tau_max);
            bool neg = h.r - target < 0;
            (neg == lo_neg ? lo : hi) = mid;
        }
        h = shoot(a, r_p, 0.5 * (lo + hi), s, tau_max);
        if (h.ok && std::abs(h.r - target) < 1e-9 * std::max(1.0, target)) best = std::min(best, h.tau);
    }
    return best;
}

}  // namespace lab

#include "lab/numeric.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace lab {

namespace {

GaussRule make_rule(int n) {
    GaussRule g;
    g.x.resize(n);
    g.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) {
                g.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
                break;
            }
            g.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
        g.x[i] = z;
    }
    return g;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
    return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, int n) {
    if (b == a) return 0.0;
    const GaussRule& g = gauss_legendre(n);
    double c = 0.5 * (a + b), h = 0.5 * (b - a), s = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(c + h * g.x[i]);
    return s * h;
}

double integrate_composite(const std::function<double(double)>& f, double a, double b,
                           int pieces, int n) {
    double s = 0.0, h = (b - a) / pieces;
    for (int k = 0; k < pieces; ++k) s += integrate(f, a + k * h, a + (k + 1) * h, n);
    return s;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit f;
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) return f;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    f.slope = sxx > 0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = y[i] - (f.slope * x[i] + f.intercept);
        ss += r * r;
    }
    f.residual = std::sqrt(ss / n);
    return f;
}

double smoothstep7(double u) {
    if (u <= 0) return 0.0;
    if (u >= 1) return 1.0;
    double u2 = u * u, u4 = u2 * u2;
    return u4 * (35.0 - 84.0 * u + 70.0 * u2 - 20.0 * u2 * u);
}

double smoothstep7_d1(double u) {
    if (u <= 0 || u >= 1) return 0.0;
    double v = u * (1.0 - u);
    return 140.0 * v * v * v;
}

double smoothstep7_d2(double u) {
    if (u <= 0 || u >= 1) return 0.0;
    double v = u * (1.0 - u);
    return 420.0 * v * v * (1.0 - 2.0 * u);
}

}  // namespace lab

#include <atomic>
#include <thread>

namespace lab {

namespace {
std::atomic<int> g_jobs{0};
}

void set_jobs(int j) { g_jobs = j; }

int jobs() {
    int j = g_jobs.load();
    if (j > 0) return j;
    unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1 : static_cast<int>(h);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
    int nt = std::min<std::size_t>(jobs(), n);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex emu;
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next++;
                if (i >= n) return;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> l(emu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace lab

#include "lab/gh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lab {

double distortion(const FiniteMetricSpace& X, const FiniteMetricSpace& Y, const Correspondence& R) {
    double d = 0;
    for (auto& [x, y] : R.pairs)
        for (auto& [x2, y2] : R.pairs) d = std::max(d, std::abs(X(x, x2) - Y(y, y2)));
    return d;
}

bool is_correspondence(const Correspondence& R, std::size_t nx, std::size_t ny) {
    std::vector<char> cx(nx, 0), cy(ny, 0);
    for (auto& [x, y] : R.pairs) {
        if (x >= nx || y >= ny) return false;
        cx[x] = cy[y] = 1;
    }
    return std::all_of(cx.begin(), cx.end(), [](char c) { return c; }) &&
           std::all_of(cy.begin(), cy.end(), [](char c) { return c; });
}

// ------------------------------------------------------------------ exact

namespace {

// Pairs (x_k, y_k) are the map f on k < nx and g on k >= nx.
struct Exact {
    const FiniteMetricSpace& X;
    const FiniteMetricSpace& Y;
    std::size_t nx, ny, N;
    bool pointed;
    std::vector<std::size_t> px, py;
    double best;

    void rec(std::size_t k, double cur) {
        if (k == N) {
            best = cur;
            return;
        }
        std::size_t lo = 0, hi = (k < nx ? ny : nx);
        bool fixed = pointed && (k == 0 || k == nx);
        if (fixed) hi = 1;
        for (std::size_t c = lo; c < hi; ++c) {
            if (k < nx) {
                px[k] = k;
                py[k] = c;
            } else {
                px[k] = c;
                py[k] = k - nx;
            }
            double m = cur;
            for (std::size_t j = 0; j < k && m < best; ++j)
                m = std::max(m, std::abs(X(px[k], px[j]) - Y(py[k], py[j])));
            if (m < best) rec(k + 1, m);
        }
    }
};

std::vector<std::vector<double>> profiles(const FiniteMetricSpace& X) {
    std::vector<std::vector<double>> P(X.n);
    for (std::size_t i = 0; i < X.n; ++i) {
        P[i].assign(X.D.begin() + i * X.n, X.D.begin() + (i + 1) * X.n);
        std::sort(P[i].begin(), P[i].end());
    }
    return P;
}

// one-sided sup_{a in A} dist(a, B) for sorted A, B
double directed_hausdorff(const std::vector<double>& A, const std::vector<double>& B) {
    double h = 0;
    std::size_t j = 0;
    for (double a : A) {
        while (j + 1 < B.size() && B[j + 1] <= a) ++j;
        double d = std::abs(a - B[j]);
        if (j + 1 < B.size()) d = std::min(d, std::abs(B[j + 1] - a));
        h = std::max(h, d);
    }
    return h;
}

double hausdorff(const std::vector<double>& A, const std::vector<double>& B) {
    return std::max(directed_hausdorff(A, B), directed_hausdorff(B, A));
}

}  // namespace

double gh_exact(const FiniteMetricSpace& X, const FiniteMetricSpace& Y, bool pointed) {
    if (X.n > 6 || Y.n > 6) throw DomainError("gh_exact: spaces larger than 6 points");
    if (X.n == 0 || Y.n == 0) throw DomainError("gh_exact: empty space");
    Exact E{X, Y, X.n, Y.n, X.n + Y.n, pointed, {}, {}, 0};
    E.px.resize(E.N);
    E.py.resize(E.N);
    // X x Y is a correspondence with distortion at most max(diam); a margin makes it strict
    E.best = std::max(X.diameter(), Y.diameter()) * (1 + 1e-12) + 1e-300;
    E.rec(0, 0.0);
    return 0.5 * E.best;
}

double gh_lower(const FiniteMetricSpace& X, const FiniteMetricSpace& Y, bool pointed) {
    double lb = 0.5 * std::abs(X.diameter() - Y.diameter());
    auto PX = profiles(X), PY = profiles(Y);
    std::vector<double> H(X.n * Y.n);
    for (std::size_t i = 0; i < X.n; ++i)
        for (std::size_t j = 0; j < Y.n; ++j) H[i * Y.n + j] = hausdorff(PX[i], PY[j]);
    double a = 0, b = 0;
    for (std::size_t i = 0; i < X.n; ++i) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < Y.n; ++j) m = std::min(m, H[i * Y.n + j]);
        a = std::max(a, m);
    }
    for (std::size_t j = 0; j < Y.n; ++j) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < X.n; ++i) m = std::min(m, H[i * Y.n + j]);
        b = std::max(b, m);
    }
    lb = std::max(lb, 0.5 * std::max(a, b));
    if (pointed && X.n && Y.n) lb = std::max(lb, 0.5 * H[0]);
    return lb;
}

// ------------------------------------------------------------------ annealing

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Pair state with cached pairwise discrepancies and row maxima.
class Anneal {
public:
    Anneal(const FiniteMetricSpace& X, const FiniteMetricSpace& Y, std::vector<std::size_t> px,
           std::vector<std::size_t> py)
        : X_(&X), Y_(&Y), N_(px.size()), px_(std::move(px)), py_(std::move(py)), M_(N_ * N_), rmax_(N_) {
        for (std::size_t i = 0; i < N_; ++i)
            for (std::size_t j = 0; j < N_; ++j) M_[i * N_ + j] = disc(i, j);
        for (std::size_t i = 0; i < N_; ++i) rmax_[i] = rowmax(i);
    }

    double value() const { return *std::max_element(rmax_.begin(), rmax_.end()); }

    // value after reassigning element k; state unchanged
    double trial(std::size_t k, std::size_t xv, std::size_t yv) const {
        double m = 0;
        for (std::size_t j = 0; j < N_; ++j) {
            if (j == k) continue;
            double d = std::abs((*X_)(xv, px_[j]) - (*Y_)(yv, py_[j]));
            m = std::max(m, d);
            double r = rmax_[j];
            if (r > m) {
                // row j keeps its max unless that max came from k
                if (M_[j * N_ + k] < r) m = r;
                else m = std::max(m, rowmax_excluding(j, k));
            }
        }
        return m;
    }

    void apply(std::size_t k, std::size_t xv, std::size_t yv) {
        px_[k] = xv;
        py_[k] = yv;
        for (std::size_t j = 0; j < N_; ++j) {
            double old = M_[j * N_ + k];
            double d = disc(k, j);
            M_[k * N_ + j] = M_[j * N_ + k] = d;
            if (j == k) continue;
            if (d >= rmax_[j]) rmax_[j] = d;
            else if (old >= rmax_[j]) rmax_[j] = rowmax(j);
        }
        rmax_[k] = rowmax(k);
    }

    // element attaining the max discrepancy (lowest index pair)
    std::pair<std::size_t, std::size_t> worst() const {
        std::size_t i = static_cast<std::size_t>(std::max_element(rmax_.begin(), rmax_.end()) - rmax_.begin());
        std::size_t j = 0;
        for (std::size_t c = 0; c < N_; ++c)
            if (M_[i * N_ + c] >= rmax_[i]) {
                j = c;
                break;
            }
        return {i, j};
    }

    const std::vector<std::size_t>& px() const { return px_; }
    const std::vector<std::size_t>& py() const { return py_; }

private:
    double disc(std::size_t i, std::size_t j) const { return std::abs((*X_)(px_[i], px_[j]) - (*Y_)(py_[i], py_[j])); }
    double rowmax(std::size_t i) const {
        double m = 0;
        for (std::size_t j = 0; j < N_; ++j) m = std::max(m, M_[i * N_ + j]);
        return m;
    }
    double rowmax_excluding(std::size_t i, std::size_t k) const {
        double m = 0;
        for (std::size_t j = 0; j < N_; ++j)
            if (j != k) m = std::max(m, M_[i * N_ + j]);
        return m;
    }

    const FiniteMetricSpace* X_;
    const FiniteMetricSpace* Y_;
    std::size_t N_;
    std::vector<std::size_t> px_, py_;
    std::vector<double> M_, rmax_;
};

struct RunResult {
    double value;
    std::vector<std::size_t> px, py;
};

constexpr int kStageLength = 64;
constexpr int kStages = 160;

RunResult anneal_run(const FiniteMetricSpace& X, const FiniteMetricSpace& Y, const std::vector<std::size_t>& f0,
                     const std::vector<std::size_t>& g0, int restart, const GhOptions& opt) {
    const std::size_t nx = X.n, ny = Y.n, N = nx + ny;
    Rng rng(splitmix(opt.seed ^ splitmix(static_cast<std::uint64_t>(restart) + 1)));
    std::vector<std::size_t> f = f0, g = g0;
    if (restart > 0) {
        // perturb a random fraction of the greedy seed
        double frac = std::min(1.0, 0.15 * restart);
        for (std::size_t i = 0; i < nx; ++i)
            if (rng.uniform() < frac) f[i] = rng.index(ny);
        for (std::size_t j = 0; j < ny; ++j)
            if (rng.uniform() < frac) g[j] = rng.index(nx);
        if (opt.pointed) f[0] = g[0] = 0;
    }
    std::vector<std::size_t> px(N), py(N);
    for (std::size_t i = 0; i < nx; ++i) px[i] = i, py[i] = f[i];
    for (std::size_t j = 0; j < ny; ++j) px[nx + j] = g[j], py[nx + j] = j;
    Anneal A(X, Y, px, py);
    double cur = A.value();
    RunResult best{cur, A.px(), A.py()};
    double T0 = 0.05 * std::max({X.diameter(), Y.diameter(), 1e-300});
    auto movable = [&](std::size_t k) { return !(opt.pointed && (k == 0 || k == nx)); };
    auto reassign = [&](std::size_t k, std::size_t v, std::size_t& xv, std::size_t& yv) {
        if (k < nx) { xv = A.px()[k]; yv = v; }
        else { xv = v; yv = A.py()[k]; }
    };
    for (int it = 0; it < opt.iters; ++it) {
        double T = T0 * std::pow(0.95, (it / kStageLength) % kStages);
        double u = rng.uniform();
        if (u < 0.2 && nx > 1 && ny > 1) {
            // swap the targets of two elements on the same side
            bool side = rng.uniform() < 0.5;
            std::size_t n = side ? nx : ny, off = side ? 0 : nx;
            std::size_t a = off + rng.index(n), b = off + rng.index(n);
            if (a == b || !movable(a) || !movable(b)) continue;
            std::size_t va = side ? A.py()[a] : A.px()[a], vb = side ? A.py()[b] : A.px()[b];
            std::size_t xa, ya, xb, yb;
            reassign(a, vb, xa, ya);
            reassign(b, va, xb, yb);
            std::size_t oxa = A.px()[a], oya = A.py()[a], oxb = A.px()[b], oyb = A.py()[b];
            A.apply(a, xa, ya);
            A.apply(b, xb, yb);
            double nv = A.value();
            if (nv <= cur || rng.uniform() < std::exp(-(nv - cur) / T)) {
                cur = nv;
            } else {
                A.apply(a, oxa, oya);
                A.apply(b, oxb, oyb);
            }
        } else {
            std::size_t k;
            if (u < 0.4) {
                // resample one end of the worst pair
                auto [i, j] = A.worst();
                k = rng.uniform() < 0.5 ? i : j;
            } else {
                k = rng.index(N);
            }
            if (!movable(k)) continue;
            std::size_t v = rng.index(k < nx ? ny : nx), xv, yv;
            reassign(k, v, xv, yv);
            double nv = A.trial(k, xv, yv);
            if (nv <= cur || rng.uniform() < std::exp(-(nv - cur) / T)) {
                A.apply(k, xv, yv);
                cur = nv;
            }
        }
        if (cur < best.value) best = {cur, A.px(), A.py()};
    }
    return best;
}

}  // namespace

GhBounds gh_upper(const FiniteMetricSpace& X, const FiniteMetricSpace& Y, const GhOptions& opt) {
    if (X.n == 0 || Y.n == 0) throw DomainError("gh_upper: empty space");
    GhBounds out;
    out.lower = gh_lower(X, Y, opt.pointed);
    auto PX = profiles(X), PY = profiles(Y);
    std::vector<std::size_t> f(X.n), g(Y.n);
    std::vector<double> H(X.n * Y.n);
    for (std::size_t i = 0; i < X.n; ++i)
        for (std::size_t j = 0; j < Y.n; ++j) H[i * Y.n + j] = hausdorff(PX[i], PY[j]);
    for (std::size_t i = 0; i < X.n; ++i) {
        std::size_t b = 0;
        for (std::size_t j = 1; j < Y.n; ++j)
            if (H[i * Y.n + j] < H[i * Y.n + b]) b = j;
        f[i] = b;
    }
    for (std::size_t j = 0; j < Y.n; ++j) {
        std::size_t b = 0;
        for (std::size_t i = 1; i < X.n; ++i)
            if (H[i * Y.n + j] < H[b * Y.n + j]) b = i;
        g[j] = b;
    }
    if (opt.pointed) f[0] = g[0] = 0;
    int R = std::max(1, opt.restarts);
    std::vector<RunResult> runs(R);
    parallel_for(R, [&](std::size_t r) { runs[r] = anneal_run(X, Y, f, g, static_cast<int>(r), opt); });
    std::size_t b = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].value < runs[b].value) b = r;
    for (std::size_t k = 0; k < runs[b].px.size(); ++k) out.witness.pairs.push_back({runs[b].px[k], runs[b].py[k]});
    std::sort(out.witness.pairs.begin(), out.witness.pairs.end());
    out.witness.pairs.erase(std::unique(out.witness.pairs.begin(), out.witness.pairs.end()), out.witness.pairs.end());
    out.upper = 0.5 * distortion(X, Y, out.witness);
    out.lower = std::min(out.lower, out.upper);
    return out;
}

GhBounds gh_netted(const FiniteMetricSpace& X, const FiniteMetricSpace& Y, std::size_t m, const GhOptions& opt) {
    auto nx = farthest_point_net(X, m, 0), ny = farthest_point_net(Y, m, 0);
    auto Xs = subspace(X, nx.index), Ys = subspace(Y, ny.index);
    auto b = gh_upper(Xs, Ys, opt);
    b.net_radius_x = nx.radius;
    b.net_radius_y = ny.radius;
    b.upper += nx.radius + ny.radius;
    b.lower = std::max(0.0, b.lower - nx.radius - ny.radius);
    b.lower = std::max(b.lower, 0.5 * std::abs(X.diameter() - Y.diameter()));
    return b;
}

// ------------------------------------------------------------------ cones

double cone_distance(double t1, double rho1, double t2, double rho2, double angle) {
    double c = std::cos(std::min(angle, kPi));
    double leg = rho1 * rho1 + rho2 * rho2 - 2 * rho1 * rho2 * c;
    double dt = t1 - t2;
    return std::sqrt(std::max(0.0, dt * dt + leg));
}

ConeBall cone_ball(const FiniteMetricSpace& F, const ConeSamples& grid) {
    struct P {
        double t, rho;
        std::size_t f;
    };
    std::vector<P> pts;
    for (double t : grid.line)
        for (double rho : grid.radial) {
            if (t * t + rho * rho > 1 + 1e-12) continue;
            if (rho == 0) {
                pts.push_back({t, 0, 0});
                continue;
            }
            for (std::size_t f = 0; f < F.n; ++f) pts.push_back({t, rho, f});
        }
    ConeBall out;
    out.space = make_space(pts.size());
    out.space.provenance = "cone ball";
    out.clamped = F.diameter() > kPi;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        out.coords.push_back({pts[i].t, pts[i].rho});
        out.fiber.push_back(pts[i].f);
        for (std::size_t j = 0; j < i; ++j) {
            double ang = (pts[i].rho == 0 || pts[j].rho == 0) ? 0.0 : F(pts[i].f, pts[j].f);
            double d = cone_distance(pts[i].t, pts[i].rho, pts[j].t, pts[j].rho, ang);
            out.space.at(i, j) = out.space.at(j, i) = d;
        }
    }
    return out;
}

}  // namespace lab

#include "lab/cutlocus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lab {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

double product_distance(const MetricOracle& X, PairIndex a, PairIndex b) {
    return std::hypot(X(a.first, b.first), X(a.second, b.second));
}

double diagonal_excess(const MetricOracle& X, PairIndex xy, PairIndex zw) {
    return X(xy.first, xy.second) / kSqrt2 + product_distance(X, xy, zw) - X(zw.first, zw.second) / kSqrt2;
}

DiagonalProjection diagonal_projection(const MetricOracle& X, PairIndex xy) {
    DiagonalProjection P;
    P.distance = std::numeric_limits<double>::infinity();
    for (std::size_t z = 0; z < X.n; ++z) {
        double d = std::hypot(X(xy.first, z), X(xy.second, z));
        if (d < P.distance) P = {z, d};
    }
    return P;
}

Reach extension_reach(const MetricOracle& X, PairIndex xy, double threshold, bool strict) {
    const auto [x, y] = xy;
    const double dxy = X(x, y);
    const double cut = kSqrt2 * threshold;
    struct C {
        std::size_t v;
        double d;
    };
    std::vector<C> Z, W;
    for (std::size_t v = 0; v < X.n; ++v) {
        double dvx = X(v, x), dvy = X(v, y);
        if (dvx + dxy - dvy <= cut) Z.push_back({v, dvx});
        if (dvy + dxy - dvx <= cut) W.push_back({v, dvy});
    }
    Reach R;
    double best = -1;
    for (auto& z : Z)
        for (auto& w : W) {
            double D2 = z.d * z.d + w.d * w.d;
            if (D2 <= best) continue;
            double e = dxy / kSqrt2 + std::sqrt(D2) - X(z.v, w.v) / kSqrt2;
            if (strict ? e < threshold : e <= threshold) {
                best = D2;
                R.witness = {z.v, w.v};
                R.found = true;
            }
        }
    R.rho = R.found ? std::sqrt(best / 2) : 0.0;
    return R;
}

Reach cutlocus_reach(const MetricOracle& X, PairIndex xy, double eps, double tol) {
    return eps > 0 ? extension_reach(X, xy, eps * eps, true) : extension_reach(X, xy, tol, false);
}

bool in_cutlocus(const MetricOracle& X, PairIndex xy, double r, double eps, double tol) {
    auto R = cutlocus_reach(X, xy, eps, tol);
    // a witness at product distance >= sqrt2 r exists iff rho >= r
    return !(R.found && R.rho >= r);
}

std::size_t CutlocusSet::count() const {
    return static_cast<std::size_t>(std::count(member.begin(), member.end(), 1));
}

CutlocusSet effective_cutlocus(const MetricOracle& X, const std::vector<PairIndex>& pairs, double r, double eps,
                               double tol) {
    CutlocusSet C;
    C.r = r;
    C.eps = eps;
    C.candidates = pairs;
    C.member.assign(pairs.size(), 0);
    parallel_for(pairs.size(), [&](std::size_t i) { C.member[i] = in_cutlocus(X, pairs[i], r, eps, tol) ? 1 : 0; });
    return C;
}

std::vector<PairIndex> sample_pairs(std::size_t n, std::size_t cap, std::uint64_t seed) {
    std::vector<PairIndex> out;
    if (n < 2) return out;
    std::size_t total = n * (n - 1);
    if (total <= cap) {
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y)
                if (x != y) out.push_back({x, y});
        return out;
    }
    Rng rng(seed);
    while (out.size() < cap) {
        std::size_t x = rng.index(n), y = rng.index(n);
        if (x != y) out.push_back({x, y});
    }
    return out;
}

DecayReport measure_decay(const MetricOracle& X, const std::vector<char>& S, double delta,
                          const std::vector<double>& radii, double eps, std::size_t max_pairs, std::uint64_t seed) {
    DecayReport R;
    auto cand = sample_pairs(X.n, max_pairs, seed);
    std::vector<char> keep(cand.size(), 0);
    parallel_for(cand.size(), [&](std::size_t i) {
        double h = X(cand[i].first, cand[i].second) / kSqrt2;
        if (h < delta || h > 1 / delta) return;
        keep[i] = S[diagonal_projection(X, cand[i]).z];
    });
    std::vector<PairIndex> pop;
    for (std::size_t i = 0; i < cand.size(); ++i)
        if (keep[i]) pop.push_back(cand[i]);
    R.population = pop.size();
    if (pop.empty()) throw DomainError("measure_decay: annulus A_{delta,1/delta}(S) is empty");
    std::vector<Reach> reach(pop.size());
    parallel_for(pop.size(), [&](std::size_t i) { reach[i] = cutlocus_reach(X, pop[i], eps); });
    std::vector<double> lx, ly;
    double prev = -1;
    for (double r : radii) {
        std::size_t m = 0;
        for (auto& q : reach)
            if (!(q.found && q.rho >= r)) ++m;
        double f = double(m) / pop.size();
        if (f < prev) R.monotone = false;
        prev = f;
        R.radii.push_back(r);
        R.fraction.push_back(f);
        if (f > 0) {
            lx.push_back(std::log(r));
            ly.push_back(std::log(f));
        }
    }
    if (lx.size() >= 2) {
        auto fit = fit_line(lx, ly);
        R.slope = fit.slope;
        R.intercept = fit.intercept;
    }
    return R;
}

MidpointReport midpoint_check(const MetricOracle& X, PairIndex xy) {
    auto P = diagonal_projection(X, xy);
    MidpointReport M;
    M.z = P.z;
    double a = X(xy.first, P.z), b = X(P.z, xy.second), d = X(xy.first, xy.second);
    M.imbalance = std::abs(a - b);
    M.join_excess = a + b - d;
    M.diag_defect = P.distance - d / kSqrt2;
    return M;
}

MidpointReport midpoint_from_rows(const std::vector<double>& dx, const std::vector<double>& dy, std::size_t y) {
    MidpointReport M;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t z = 0; z < dx.size(); ++z) {
        double d = std::hypot(dx[z], dy[z]);
        if (d < best) {
            best = d;
            M.z = z;
        }
    }
    double a = dx[M.z], b = dy[M.z], d = dx[y];
    M.imbalance = std::abs(a - b);
    M.join_excess = a + b - d;
    M.diag_defect = best - d / kSqrt2;
    return M;
}

}  // namespace lab

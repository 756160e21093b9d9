#include "lab/sweeps.hpp"

#include "lab/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace lab {

HolderFit fit_holder(const std::vector<double>& sep, const std::vector<double>& signal, int resamples,
                     std::uint64_t seed) {
    if (sep.size() != signal.size()) throw DomainError("fit_holder: size mismatch");
    HolderFit F;
    for (std::size_t i = 0; i < sep.size(); ++i)
        if (sep[i] > 0 && signal[i] > 0) {
            F.x.push_back(std::log(sep[i]));
            F.y.push_back(std::log(signal[i]));
        }
    if (F.x.size() < 5) throw DomainError("fit_holder: fewer than 5 positive points");
    auto L = fit_line(F.x, F.y);
    F.slope = L.slope;
    F.intercept = L.intercept;
    F.residual = L.residual;
    std::vector<double> res(F.x.size());
    for (std::size_t i = 0; i < F.x.size(); ++i) res[i] = F.y[i] - (L.slope * F.x[i] + L.intercept);
    Rng rng(seed);
    std::vector<double> slopes;
    for (int b = 0; b < resamples; ++b) {
        std::vector<double> y(F.x.size());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = L.slope * F.x[i] + L.intercept + res[rng.index(res.size())];
        slopes.push_back(fit_line(F.x, y).slope);
    }
    if (!slopes.empty()) {
        std::sort(slopes.begin(), slopes.end());
        F.ci_lo = slopes[static_cast<std::size_t>(0.025 * (slopes.size() - 1))];
        F.ci_hi = slopes[static_cast<std::size_t>(std::ceil(0.975 * (slopes.size() - 1)))];
    } else {
        F.ci_lo = F.ci_hi = F.slope;
    }
    return F;
}

// -------------------------------------------------------------------- fibers

FiberSample sample_fiber(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (n < 2 || k == 0) throw DomainError("sample_fiber: need n >= 2 and k >= 1");
    k = std::min(k, n - 1);
    FiberSample F;
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) F.xi.push_back(quat_random(rng));
    std::vector<std::vector<std::size_t>> nn(n);
    parallel_for(n, [&](std::size_t i) {
        std::vector<std::pair<double, std::size_t>> c;
        c.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) c.push_back({quat_angle(F.xi[i], F.xi[j]), j});
        std::partial_sort(c.begin(), c.begin() + k, c.end());
        for (std::size_t t = 0; t < k; ++t) nn[i].push_back(c[t].second);
    });
    for (std::size_t i = 0; i < n; ++i)
        for (auto j : nn[i]) F.edges.push_back({std::min(i, j), std::max(i, j)});
    std::sort(F.edges.begin(), F.edges.end());
    F.edges.erase(std::unique(F.edges.begin(), F.edges.end()), F.edges.end());
    return F;
}

FiniteMetricSpace fiber_space(const FiberSample& F, const std::array<double, 3>& m) {
    std::array<double, 3> e2;
    for (int j = 0; j < 3; ++j) e2[j] = std::exp(2 * m[j]);
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
    edges.reserve(F.edges.size());
    for (auto [i, j] : F.edges) {
        Vec3 w = quat_log(F.xi[j] * F.xi[i].conj());
        edges.emplace_back(i, j, std::sqrt(e2[0] * w[0] * w[0] + e2[1] * w[1] * w[1] + e2[2] * w[2] * w[2]));
    }
    Graph g = graph_from_edges(F.xi.size(), edges);
    if (component_sizes(g).size() > 1) throw GraphError("fiber_space: fiber graph is disconnected");
    std::vector<std::size_t> all(g.n);
    std::iota(all.begin(), all.end(), 0);
    auto rows = shortest_paths(g, all);
    auto X = space_from_matrix(rows);
    X.provenance = "fiber graph";
    return X;
}

// -------------------------------------------------------------------- cones

std::array<double, 3> cone_fiber_exponents(const ConeSweepConfig& cfg, double r) {
    auto curve = example_B_limit_curve(cfg.constants);
    auto m = curve.values(cfg.constant_fiber ? cfg.r_ref : r);
    for (auto& x : m) x -= 2 * cfg.constants.m0;
    return m;
}

namespace {

double coupled_half_distortion(const FiniteMetricSpace& X, const FiniteMetricSpace& Y) {
    double worst = 0;
    for (std::size_t i = 0; i < X.n; ++i)
        for (std::size_t j = 0; j < i; ++j) worst = std::max(worst, std::abs(X(i, j) - Y(i, j)));
    return 0.5 * worst;
}

/// Witness between cone balls over two fiber samples on the same grid: equal grid slots,
/// fiber points matched to their nearest partner in the round angle, both directions.
Correspondence slot_witness(const ConeBall& A, const std::vector<Quat>& qa, const ConeBall& B,
                            const std::vector<Quat>& qb) {
    auto nearest = [](const Quat& q, const std::vector<Quat>& pool) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < pool.size(); ++i)
            if (quat_angle(q, pool[i]) < quat_angle(q, pool[best])) best = i;
        return best;
    };
    std::vector<std::size_t> ab(qa.size()), ba(qb.size());
    for (std::size_t i = 0; i < qa.size(); ++i) ab[i] = nearest(qa[i], qb);
    for (std::size_t i = 0; i < qb.size(); ++i) ba[i] = nearest(qb[i], qa);
    auto find = [](const ConeBall& C, std::array<double, 2> at, std::size_t f) {
        for (std::size_t i = 0; i < C.coords.size(); ++i)
            if (C.coords[i] == at && (at[1] == 0 || C.fiber[i] == f)) return i;
        throw DomainError("slot_witness: grids differ");
    };
    Correspondence R;
    for (std::size_t i = 0; i < A.coords.size(); ++i) R.pairs.push_back({i, find(B, A.coords[i], ab[A.fiber[i]])});
    for (std::size_t j = 0; j < B.coords.size(); ++j) R.pairs.push_back({find(A, B.coords[j], ba[B.fiber[j]]), j});
    return R;
}

}  // namespace

ConeSweepResult holder_cone_sweep(const ConeSweepConfig& cfg) {
    if (cfg.offsets.size() < 5) throw DomainError("holder_cone_sweep: need at least 5 offsets");
    ConeSweepResult R;
    R.target = 0.5 * (1 + cfg.constants.delta);
    R.forbidden = 0.5 + cfg.constants.delta;
    ConeSamples grid{cfg.line, cfg.radial};

    auto F = sample_fiber(cfg.fiber_samples, cfg.knn, cfg.seed);
    auto ref = fiber_space(F, cone_fiber_exponents(cfg, cfg.r_ref));
    auto net = farthest_point_net(ref, cfg.net, 0).index;
    auto cone_at = [&](const FiberSample& S, const std::vector<std::size_t>& idx, double r) {
        auto fib = subspace(fiber_space(S, cone_fiber_exponents(cfg, r)), idx);
        return cone_ball(fib, grid);
    };
    auto base = cone_ball(subspace(ref, net), grid);
    R.ball_size = base.space.n;
    R.clamped = base.clamped;

    std::vector<double> sep, sig;
    for (std::size_t k = 0; k < cfg.offsets.size(); ++k) {
        double r2 = cfg.r_ref + cfg.offsets[k];
        auto other = cone_at(F, net, r2);
        R.clamped = R.clamped || other.clamped;
        ConeSweepRow row{cfg.r_ref, r2};
        row.coupled = coupled_half_distortion(base.space, other.space);
        GhOptions o = cfg.gh;
        o.seed = cfg.gh.seed + 7919 * (k + 1);
        auto b = gh_upper(base.space, other.space, o);
        row.upper = std::min(row.coupled, b.upper);
        row.lower = b.lower;
        R.rows.push_back(row);
        sep.push_back(cfg.offsets[k]);
        sig.push_back(row.upper);
    }
    // independent resampling of the same fiber at r_ref
    auto F2 = sample_fiber(cfg.fiber_samples, cfg.knn, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    auto ref2 = fiber_space(F2, cone_fiber_exponents(cfg, cfg.r_ref));
    auto net2 = farthest_point_net(ref2, cfg.net, 0).index;
    auto b2 = cone_ball(subspace(ref2, net2), grid);
    std::vector<Quat> qa, qb;
    for (auto i : net) qa.push_back(F.xi[i]);
    for (auto i : net2) qb.push_back(F2.xi[i]);
    R.noise_floor = std::min(gh_upper(base.space, b2.space, cfg.gh).upper,
                             0.5 * distortion(base.space, b2.space, slot_witness(base, qa, b2, qb)));

    bool positive = std::all_of(sig.begin(), sig.end(), [](double v) { return v > 0; });
    if (positive) R.fit = fit_holder(sep, sig, 200, cfg.seed);
    return R;
}

// -------------------------------------------------------------------- balls

WarpedMetric sweep_metric_A(const BallSweepConfig& cfg) {
    ConstantsA k = cfg.constants;
    if (cfg.constant_fiber) k.theta_amp = 0;
    return build_example_A(k);
}

namespace {

struct LocalBall {
    SampleCloud cloud;
    Graph graph;
    std::vector<std::size_t> members;
};

Region ball_region(const WarpedMetric& W, double center, double radius) {
    Region reg;
    reg.r_lo = center - 1.1 * radius;
    reg.r_hi = center + 1.1 * radius;
    double amin = W.a->value(reg.r_lo);
    for (int i = 0; i <= 64; ++i) amin = std::min(amin, W.a->value(reg.r_lo + (reg.r_hi - reg.r_lo) * i / 64.0));
    reg.s_lo = 0;
    reg.s_hi = std::min(kPi, 1.1 * radius / amin);
    return reg;
}

std::vector<std::size_t> ball_members(const Graph& g, std::size_t center, double radius) {
    auto d = dijkstra(g, center);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i] <= radius) out.push_back(i);
    return out;
}

/// Metric on `members` from rows computed over `sources` (a superset of members).
FiniteMetricSpace restrict_rows(const std::vector<std::vector<double>>& rows, const std::vector<std::size_t>& sources,
                                const std::vector<std::size_t>& members) {
    std::vector<std::size_t> pos(members.size());
    for (std::size_t a = 0; a < members.size(); ++a)
        pos[a] = static_cast<std::size_t>(std::lower_bound(sources.begin(), sources.end(), members[a]) - sources.begin());
    auto X = make_space(members.size());
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = 0; b < a; ++b) {
            double d = 0.5 * (rows[pos[a]][members[b]] + rows[pos[b]][members[a]]);
            X.at(a, b) = X.at(b, a) = d;
        }
    X.labels = members;
    return X;
}

LocalBall local_ball(const WarpedMetric& W, const BallSweepConfig& cfg, double center, std::uint64_t seed) {
    LocalBall B;
    B.cloud = sample_cloud(W, ball_region(W, center, cfg.radius), cfg.samples, seed, {ray_point(center)});
    B.graph = build_graph(W, B.cloud, cfg.knn);
    B.members = ball_members(B.graph, 0, cfg.radius);
    return B;
}

}  // namespace

BallSweepResult holder_ball_sweep(const BallSweepConfig& cfg) {
    const double len = cfg.ell_hi - cfg.ell_lo, margin = cfg.delta * len;
    for (double h : cfg.offsets)
        if (!(cfg.base > cfg.ell_lo + margin && cfg.base + h < cfg.ell_hi - margin))
            throw DomainError("holder_ball_sweep: pair leaves the interior of the ray segment");
    if (cfg.offsets.size() < 5) throw DomainError("holder_ball_sweep: need at least 5 offsets");
    auto W = sweep_metric_A(cfg);
    auto B = local_ball(W, cfg, cfg.base, cfg.seed);
    BallSweepResult R;
    std::vector<double> sep, sig;
    double prev = -1;
    for (std::size_t k = 0; k < cfg.offsets.size(); ++k) {
        const double h = cfg.offsets[k];
        // chart-matched copy: (r - center, a(center) s, xi) is preserved
        SampleCloud shifted = B.cloud;
        const double scale = W.a->value(cfg.base) / W.a->value(cfg.base + h);
        for (auto& p : shifted.points) {
            p.r += h;
            p.s *= scale;
        }
        Graph g2 = reweight_graph(B.graph, W, shifted);
        auto m2 = ball_members(g2, 0, cfg.radius);
        auto rows1 = shortest_paths(B.graph, B.members), rows2 = shortest_paths(g2, B.members);
        auto X = restrict_rows(rows1, B.members, B.members), S2 = restrict_rows(rows2, B.members, B.members);
        // d_GH(B1, B2) <= dis(id on S)/2 + sup_S |d2(c,.) - d1(c,.)| with S the index set of
        // B1: every point of B2 lies within that sup of S along its d2-ray to the center
        double shift = 0;
        for (auto v : B.members) shift = std::max(shift, std::abs(rows2[0][v] - rows1[0][v]));
        std::vector<std::size_t> U = B.members;
        for (auto v : m2)
            if (!std::binary_search(U.begin(), U.end(), v)) U.push_back(v);
        std::sort(U.begin(), U.end());
        auto Y = restrict_rows(shortest_paths(g2, U), U, m2);
        Correspondence id;
        for (std::size_t a = 0; a < X.n; ++a) id.pairs.push_back({a, a});
        BallSweepRow row;
        row.s = cfg.base;
        row.t = cfg.base + h;
        row.size_s = X.n;
        row.size_t_ = Y.n;
        row.coupled = (0.5 * distortion(X, S2, id) + shift) / cfg.radius;
        GhOptions o = cfg.gh;
        o.seed = cfg.gh.seed + 7919 * (k + 1);
        auto b = gh_netted(X, Y, cfg.net, o);
        row.upper = std::min(row.coupled, b.upper / cfg.radius);
        row.lower = b.lower / cfg.radius;
        if (row.lower > 0 && row.upper / row.lower > 10) R.loose = true;
        if (row.upper < prev) R.monotone = false;
        prev = row.upper;
        R.rows.push_back(row);
        sep.push_back(h);
        sig.push_back(row.upper);
    }
    auto B2 = local_ball(W, cfg, cfg.base, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    auto X1 = graph_subspace(B.graph, B.members), X2 = graph_subspace(B2.graph, B2.members);
    // nearest-partner witness between the two samplings, partners by short-segment length
    Correspondence near;
    auto partner = [&](const CloudPoint& p, const LocalBall& other) {
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < other.members.size(); ++c) {
            double d = segment_length(W, p, other.cloud.points[other.members[c]]);
            if (d < bd) {
                bd = d;
                best = c;
            }
        }
        return best;
    };
    for (std::size_t a = 0; a < B.members.size(); ++a)
        near.pairs.push_back({a, partner(B.cloud.points[B.members[a]], B2)});
    for (std::size_t b = 0; b < B2.members.size(); ++b)
        near.pairs.push_back({partner(B2.cloud.points[B2.members[b]], B), b});
    R.noise_floor = std::min(gh_netted(X1, X2, cfg.net, cfg.gh).upper, 0.5 * distortion(X1, X2, near)) / cfg.radius;
    bool positive = std::all_of(sig.begin(), sig.end(), [](double v) { return v > 0; });
    if (positive) R.fit = fit_holder(sep, sig, 200, cfg.seed);
    return R;
}

// -------------------------------------------------------------------- Reifenberg

ReifenbergResult reifenberg_check(const ReifenbergConfig& cfg) {
    WarpedMetric W;
    if (cfg.metric == "flat") W = flat_cone();
    else if (cfg.metric == "exampleA") W = build_example_A(canonical_A());
    else throw DomainError("reifenberg_check: unknown metric " + cfg.metric);
    ReifenbergResult out;
    Rng pick(cfg.seed);
    CloudPoint anchor{cfg.r_anchor, cfg.s_anchor, quat_random(pick)};
    const double a0 = W.a->value(anchor.r), b0 = W.b->value(anchor.s);
    auto f0 = W.fiber->eval(anchor.r, anchor.s);
    if (cfg.exact && cfg.metric != "flat") throw DomainError("reifenberg_check: exact distances need the flat cone");
    const double fiber_scale = a0 * b0 * std::exp(std::min({f0.m[0], f0.m[1], f0.m[2]}));
    for (double r : cfg.radii) {
        if (1.5 * r > 0.5 * kPi * fiber_scale)
            throw DomainError("reifenberg_check: radius exceeds the fiber injectivity scale");
        // uniform in the chart ball of radius 1.5 r around the anchor; the chart is the
        // first-order map y = (dr, a ds, a b e^{m_j} omega_j), so the sample is volume
        // distributed up to O(r)
        Rng rng(cfg.seed + 17);
        SampleCloud local;
        local.seed = cfg.seed;
        local.points.push_back(anchor);
        local.anchors = 1;
        std::vector<std::array<double, 5>> chart{{0, 0, 0, 0, 0}};
        while (local.size() < cfg.samples) {
            std::array<double, 5> y;
            double n2 = 0;
            for (auto& c : y) {
                c = rng.uniform(-1.5 * r, 1.5 * r);
                n2 += c * c;
            }
            if (n2 > 1.5 * 1.5 * r * r) continue;
            CloudPoint p;
            p.r = anchor.r + y[0];
            p.s = anchor.s + y[1] / a0;
            if (p.r <= 0 || p.s <= 0 || p.s >= kPi) continue;
            Vec3 w;
            for (int j = 0; j < 3; ++j) w[j] = y[2 + j] / (a0 * b0 * std::exp(f0.m[j]));
            p.xi = quat_exp(w) * anchor.xi;
            local.points.push_back(p);
            chart.push_back(y);
        }
        std::vector<std::size_t> members;
        FiniteMetricSpace X;
        if (cfg.exact) {
            auto emb = [](const CloudPoint& p) {
                double c = p.r * std::cos(p.s), q = p.r * std::sin(p.s);
                return std::array<double, 5>{c, q * p.xi.w, q * p.xi.x, q * p.xi.y, q * p.xi.z};
            };
            std::vector<std::array<double, 5>> e;
            for (auto& p : local.points) e.push_back(emb(p));
            auto dist = [&](std::size_t i, std::size_t j) {
                double s2 = 0;
                for (int c = 0; c < 5; ++c) s2 += (e[i][c] - e[j][c]) * (e[i][c] - e[j][c]);
                return std::sqrt(s2);
            };
            for (std::size_t i = 0; i < local.size(); ++i)
                if (dist(0, i) <= r) members.push_back(i);
            X = make_space(members.size());
            for (std::size_t a = 0; a < members.size(); ++a)
                for (std::size_t b = 0; b < a; ++b) X.at(a, b) = X.at(b, a) = dist(members[a], members[b]);
        } else {
            Graph g = build_graph(W, local, cfg.knn);
            members = ball_members(g, 0, r);
            X = graph_subspace(g, members);
        }
        auto E = make_space(members.size());
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = 0; b < a; ++b) {
                double s2 = 0;
                for (int c = 0; c < 5; ++c) {
                    double d = chart[members[a]][c] - chart[members[b]][c];
                    s2 += d * d;
                }
                E.at(a, b) = E.at(b, a) = std::sqrt(s2);
            }
        Correspondence id;
        for (std::size_t a = 0; a < members.size(); ++a) id.pairs.push_back({a, a});
        ReifenbergRow row;
        row.r = r;
        row.size = members.size();
        auto nb = gh_netted(X, E, cfg.net, cfg.gh);
        row.upper = std::min(0.5 * distortion(X, E, id), nb.upper) / r;
        row.lower = nb.lower / r;
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace lab

namespace lab {

ExcessSweepResult excess_sweep(const ExcessSweepConfig& cfg) {
    if (!(cfg.p < cfg.center && cfg.center < cfg.q)) throw DomainError("excess_sweep: need p < center < q");
    if (cfg.samples < 2) throw DomainError("excess_sweep: need at least two samples per ball");
    auto W = build_example_A(cfg.constants);
    const Profile& a = *W.a;
    const double dpq = cfg.q - cfg.p;
    ExcessSweepResult out;
    std::vector<double> rad, mean;
    for (std::size_t k = 0; k < cfg.radii.size(); ++k) {
        const double R = cfg.radii[k];
        if (!(R > 0) || cfg.center - R <= cfg.p || cfg.center + R >= cfg.q)
            throw DomainError("excess_sweep: ball must stay strictly between p and q");
        // A path of length <= R from the centre stays in r >= center - R where a >= a(center - R),
        // so it sweeps at most R / a(center - R) in s.
        const double r_lo = cfg.center - R, r_hi = cfg.center + R;
        const double s_hi = std::min(kPi / 2, R / a.value(r_lo));
        double dmax = 0;
        for (int i = 0; i <= 24; ++i)
            for (int j = 1; j <= 24; ++j)
                dmax = std::max(dmax, volume_density(W, r_lo + (r_hi - r_lo) * i / 24.0, s_hi * j / 24.0));
        dmax *= 1.25;
        Rng rng(cfg.seed + 1000003ull * (k + 1));
        ExcessSweepRow row;
        row.radius = R;
        std::vector<double> ex;
        while (ex.size() < cfg.samples) {
            std::vector<std::array<double, 2>> cand;
            while (cand.size() < 256) {
                double r = rng.uniform(r_lo, r_hi), s = rng.uniform(0, s_hi);
                ++row.proposals;
                if (s <= 0) continue;
                if (rng.uniform() * dmax <= volume_density(W, r, s)) cand.push_back({r, s});
            }
            std::vector<double> dc(cand.size()), e(cand.size());
            parallel_for(cand.size(), [&](std::size_t i) {
                auto [r, s] = cand[i];
                dc[i] = base_distance_from_ray(a, cfg.center, r, s);
                if (dc[i] <= R)
                    e[i] = base_distance_from_ray(a, cfg.p, r, s) + base_distance_from_ray(a, cfg.q, r, s) - dpq;
            });
            for (std::size_t i = 0; i < cand.size() && ex.size() < cfg.samples; ++i)
                if (dc[i] <= R) ex.push_back(std::max(0.0, e[i]));
        }
        row.mean = std::accumulate(ex.begin(), ex.end(), 0.0) / ex.size();
        row.max = *std::max_element(ex.begin(), ex.end());
        out.rows.push_back(row);
        rad.push_back(R);
        mean.push_back(row.mean);
    }
    out.fit = fit_holder(rad, mean, 200, cfg.seed);
    return out;
}

}  // namespace lab

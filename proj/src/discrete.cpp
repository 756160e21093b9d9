#include "lab/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

namespace lab {

double volume_density(const WarpedMetric& W, double r, double s) {
    double a = W.a->value(r), b = W.b->value(s);
    auto f = W.fiber->eval(r, s);
    return std::pow(a, 4) * std::pow(b, 3) * std::exp(f.m[0] + f.m[1] + f.m[2]);
}

CloudPoint ray_point(double r) { return {r, 0.0, Quat{}}; }

SampleCloud sample_cloud(const WarpedMetric& W, const Region& R, std::size_t n, std::uint64_t seed,
                         const std::vector<CloudPoint>& anchors) {
    if (!(R.r_hi > R.r_lo) || !(R.s_hi > R.s_lo) || R.s_lo < 0 || R.s_hi > kPi)
        throw DomainError("sample_cloud: empty or invalid region");
    SampleCloud c;
    c.seed = seed;
    c.points = anchors;
    c.anchors = anchors.size();
    if (n <= anchors.size()) {
        c.points.resize(n);
        c.anchors = n;
        return c;
    }
    std::size_t want = n - anchors.size();

    // density bound from a coarse scan; interior points only (the density vanishes on rays)
    const int G = 64;
    double rho_max = 0;
    for (int i = 0; i <= G; ++i)
        for (int j = 0; j <= G; ++j) {
            double r = R.r_lo + (R.r_hi - R.r_lo) * i / G;
            double s = R.s_lo + (R.s_hi - R.s_lo) * j / G;
            s = std::clamp(s, 1e-9, kPi - 1e-9);
            rho_max = std::max(rho_max, volume_density(W, r, s));
        }
    rho_max *= 1.25;
    if (!(rho_max > 0)) throw DomainError("sample_cloud: region has zero volume");

    std::size_t side = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(double(want))));
    std::size_t cells = side * side;
    Rng rng(seed);
    std::size_t t = 0, tries = 0;
    while (c.points.size() < n) {
        std::size_t cell = t++ % cells;
        double r = R.r_lo + (R.r_hi - R.r_lo) * (double(cell / side) + rng.uniform()) / side;
        double s = R.s_lo + (R.s_hi - R.s_lo) * (double(cell % side) + rng.uniform()) / side;
        double u = rng.uniform();
        Quat xi = quat_random(rng);
        if (++tries > 2000 * n) throw DomainError("sample_cloud: rejection sampling stalled");
        if (s <= 0 || s >= kPi) continue;
        if (u * rho_max > volume_density(W, r, s)) continue;
        c.points.push_back({r, s, xi});
    }
    return c;
}

SampleCloud sample_slice(const WarpedMetric& W, const Region& R, std::size_t n, std::uint64_t seed, const Quat& xi0) {
    if (!(R.r_hi > R.r_lo) || !(R.s_hi > R.s_lo) || R.s_lo < 0 || R.s_hi > kPi)
        throw DomainError("sample_slice: empty or invalid region");
    double amax = 0;
    for (int i = 0; i <= 256; ++i) amax = std::max(amax, W.a->value(R.r_lo + (R.r_hi - R.r_lo) * i / 256.0));
    amax *= 1.25;
    SampleCloud c;
    c.seed = seed;
    Rng rng(seed);
    std::size_t side = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(double(n))));
    std::size_t t = 0;
    while (c.points.size() < n) {
        std::size_t cell = t++ % (side * side);
        double r = R.r_lo + (R.r_hi - R.r_lo) * (double(cell / side) + rng.uniform()) / side;
        double s = R.s_lo + (R.s_hi - R.s_lo) * (double(cell % side) + rng.uniform()) / side;
        double u = rng.uniform();
        if (s <= 0 || s >= kPi || u * amax > W.a->value(r)) continue;
        c.points.push_back({r, s, xi0});
    }
    return c;
}

// ------------------------------------------------------------------ graph

namespace {

struct PointCache {
    double a, b;
    std::array<double, 3> em;
};

PointCache cache_point(const WarpedMetric& W, const CloudPoint& p) {
    PointCache c;
    c.a = W.a->value(p.r);
    c.b = p.on_ray() ? 0.0 : W.b->value(p.s);
    auto f = W.fiber->eval(p.r, std::clamp(p.s, 1e-12, kPi - 1e-12));
    for (int k = 0; k < 3; ++k) c.em[k] = std::exp(f.m[k]);
    return c;
}

Vec3 fiber_log(const CloudPoint& p, const CloudPoint& q) {
    if (p.on_ray() || q.on_ray()) return {0, 0, 0};
    return quat_log(q.xi * p.xi.conj());
}

double surrogate2(const CloudPoint& p, const PointCache& cp, const CloudPoint& q, const PointCache& cq) {
    double dr = q.r - p.r, ds = q.s - p.s;
    double a = 0.5 * (cp.a + cq.a), b = 0.5 * (cp.b + cq.b);
    Vec3 w = fiber_log(p, q);
    double f = 0;
    for (int k = 0; k < 3; ++k) {
        double e = 0.5 * (cp.em[k] + cq.em[k]);
        f += e * e * w[k] * w[k];
    }
    return dr * dr + a * a * (ds * ds + b * b * f);
}

}  // namespace

double segment_length(const WarpedMetric& W, const CloudPoint& p, const CloudPoint& q) {
    Vec3 w = fiber_log(p, q);
    double dr = q.r - p.r, ds = q.s - p.s;
    auto speed = [&](double tau) {
        double r = p.r + tau * dr, s = p.s + tau * ds;
        double a = W.a->value(r);
        double v = dr * dr + a * a * ds * ds;
        if (s > 0 && s < kPi && (w[0] != 0 || w[1] != 0 || w[2] != 0)) {
            double b = W.b->value(s);
            auto f = W.fiber->eval(r, s);
            double fib = 0;
            for (int k = 0; k < 3; ++k) fib += std::exp(2 * f.m[k]) * w[k] * w[k];
            v += a * a * b * b * fib;
        }
        return std::sqrt(v);
    };
    return (speed(0.0) + 4.0 * speed(0.5) + speed(1.0)) / 6.0;
}

std::array<double, 5> tangent_offset(const WarpedMetric& W, const CloudPoint& p, const CloudPoint& q) {
    const double a = W.a->value(p.r);
    std::array<double, 5> y{q.r - p.r, a * (q.s - p.s), 0, 0, 0};
    if (p.on_ray() || q.on_ray()) return y;
    const double b = W.b->value(p.s);
    auto f = W.fiber->eval(p.r, p.s);
    Vec3 w = fiber_log(p, q);
    for (int j = 0; j < 3; ++j) y[2 + j] = a * b * std::exp(f.m[j]) * w[j];
    return y;
}

Graph graph_from_edges(std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& e) {
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    for (auto [i, j, w] : e) {
        if (i >= n || j >= n || i == j) throw GraphError("graph_from_edges: bad edge");
        adj[i].push_back({j, w});
        adj[j].push_back({i, w});
    }
    Graph g;
    g.n = n;
    g.offset.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto& a = adj[i];
        std::sort(a.begin(), a.end());
        std::vector<std::pair<std::size_t, double>> u;
        for (auto& x : a) {
            if (!u.empty() && u.back().first == x.first)
                u.back().second = std::min(u.back().second, x.second);
            else
                u.push_back(x);
        }
        for (auto& x : u) {
            g.target.push_back(x.first);
            g.weight.push_back(x.second);
        }
        g.offset[i + 1] = g.target.size();
    }
    return g;
}

std::vector<std::size_t> component_sizes(const Graph& g) {
    std::vector<int> comp(g.n, -1);
    std::vector<std::size_t> sizes;
    for (std::size_t s = 0; s < g.n; ++s) {
        if (comp[s] >= 0) continue;
        int c = static_cast<int>(sizes.size());
        sizes.push_back(0);
        std::vector<std::size_t> st{s};
        comp[s] = c;
        while (!st.empty()) {
            auto v = st.back();
            st.pop_back();
            ++sizes[c];
            for (auto e = g.offset[v]; e < g.offset[v + 1]; ++e)
                if (comp[g.target[e]] < 0) {
                    comp[g.target[e]] = c;
                    st.push_back(g.target[e]);
                }
        }
    }
    return sizes;
}

Graph build_graph(const WarpedMetric& W, const SampleCloud& cloud, std::size_t k) {
    const std::size_t n = cloud.size();
    if (k < 4 && k + 1 < n) throw DomainError("build_graph: k must be at least 4");
    if (n < 2) throw GraphError("build_graph: need at least two points");
    k = std::min(k, n - 1);
    std::vector<PointCache> pc(n);
    parallel_for(n, [&](std::size_t i) { pc[i] = cache_point(W, cloud.points[i]); });

    std::vector<std::vector<std::size_t>> nn(n);
    parallel_for(n, [&](std::size_t i) {
        std::vector<std::pair<double, std::size_t>> d;
        d.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) d.push_back({surrogate2(cloud.points[i], pc[i], cloud.points[j], pc[j]), j});
        std::nth_element(d.begin(), d.begin() + (k - 1), d.end());
        d.resize(k);
        for (auto& x : d) nn[i].push_back(x.second);
    });
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (auto j : nn[i]) pairs.push_back({std::min(i, j), std::max(i, j)});
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t e) {
        auto [i, j] = pairs[e];
        edges[e] = {i, j, segment_length(W, cloud.points[i], cloud.points[j])};
    });
    Graph g = graph_from_edges(n, edges);
    auto sizes = component_sizes(g);
    if (sizes.size() > 1) {
        std::ostringstream os;
        os << "build_graph: graph is disconnected; component sizes";
        for (auto s : sizes) os << ' ' << s;
        throw GraphError(os.str());
    }
    return g;
}

Graph reweight_graph(const Graph& g, const WarpedMetric& W, const SampleCloud& cloud) {
    if (cloud.size() != g.n) throw GraphError("reweight_graph: cloud size differs from graph");
    Graph h = g;
    parallel_for(g.n, [&](std::size_t i) {
        for (std::size_t e = g.offset[i]; e < g.offset[i + 1]; ++e)
            h.weight[e] = segment_length(W, cloud.points[i], cloud.points[g.target[e]]);
    });
    return h;
}

std::vector<double> dijkstra(const Graph& g, std::size_t source) {
    if (source >= g.n) throw DomainError("dijkstra: source out of range");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> d(g.n, inf);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    d[source] = 0;
    pq.push({0, source});
    while (!pq.empty()) {
        auto [dv, v] = pq.top();
        pq.pop();
        if (dv > d[v]) continue;
        for (auto e = g.offset[v]; e < g.offset[v + 1]; ++e) {
            double nd = dv + g.weight[e];
            auto u = g.target[e];
            if (nd < d[u]) {
                d[u] = nd;
                pq.push({nd, u});
            }
        }
    }
    for (double x : d)
        if (x == inf) throw GraphError("shortest_paths: graph is disconnected");
    return d;
}

std::vector<std::vector<double>> shortest_paths(const Graph& g, const std::vector<std::size_t>& sources) {
    std::vector<std::vector<double>> rows(sources.size());
    parallel_for(sources.size(), [&](std::size_t i) { rows[i] = dijkstra(g, sources[i]); });
    return rows;
}

// ------------------------------------------------------------------ finite metric spaces

double FiniteMetricSpace::diameter() const {
    double m = 0;
    for (double x : D) m = std::max(m, x);
    return m;
}

MetricOracle as_oracle(const FiniteMetricSpace& X) {
    return {X.n, [&X](std::size_t i, std::size_t j) { return X(i, j); }};
}

FiniteMetricSpace make_space(std::size_t n) {
    FiniteMetricSpace X;
    X.n = n;
    X.D.assign(n * n, 0.0);
    X.labels.resize(n);
    std::iota(X.labels.begin(), X.labels.end(), std::size_t{0});
    return X;
}

FiniteMetricSpace space_from_matrix(const std::vector<std::vector<double>>& M) {
    auto X = make_space(M.size());
    for (std::size_t i = 0; i < X.n; ++i) {
        if (M[i].size() != X.n) throw DomainError("space_from_matrix: matrix is not square");
        for (std::size_t j = 0; j < X.n; ++j) X.at(i, j) = M[i][j];
    }
    return X;
}

FiniteMetricSpace graph_subspace(const Graph& g, const std::vector<std::size_t>& subset) {
    auto rows = shortest_paths(g, subset);
    auto X = make_space(subset.size());
    X.labels = subset;
    for (std::size_t i = 0; i < X.n; ++i)
        for (std::size_t j = 0; j < X.n; ++j) X.at(i, j) = rows[i][subset[j]];
    // symmetrize round-off
    for (std::size_t i = 0; i < X.n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            double v = 0.5 * (X.at(i, j) + X.at(j, i));
            X.at(i, j) = X.at(j, i) = v;
        }
    return X;
}

double metric_violation(const FiniteMetricSpace& X) {
    double v = 0;
    for (std::size_t i = 0; i < X.n; ++i) {
        v = std::max(v, std::abs(X(i, i)));
        for (std::size_t j = 0; j < X.n; ++j) {
            v = std::max(v, std::abs(X(i, j) - X(j, i)));
            if (i != j && X(i, j) <= 0) v = std::max(v, 1.0);
            for (std::size_t k = 0; k < X.n; ++k) v = std::max(v, X(i, j) - X(i, k) - X(k, j));
        }
    }
    return v;
}

void write_space(std::ostream& os, const FiniteMetricSpace& X) {
    if (!X.provenance.empty()) {
        std::istringstream ps(X.provenance);
        for (std::string line; std::getline(ps, line);) os << "# " << line << '\n';
    }
    os << X.n << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < X.n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) os << (j ? " " : "") << X(i, j);
        os << '\n';
    }
}

FiniteMetricSpace read_space(std::istream& is) {
    std::string prov, body, line;
    while (std::getline(is, line)) {
        auto p = line.find_first_not_of(" \t");
        if (p != std::string::npos && line[p] == '#') {
            auto t = line.substr(p + 1);
            if (!t.empty() && t[0] == ' ') t.erase(0, 1);
            prov += (prov.empty() ? "" : "\n") + t;
        } else {
            body += line + '\n';
        }
    }
    std::istringstream bs(body);
    std::size_t n;
    if (!(bs >> n)) throw DomainError("read_space: missing point count");
    std::vector<double> v;
    for (double x; bs >> x;) v.push_back(x);
    if (!bs.eof()) throw DomainError("read_space: malformed number");
    bool with_diag = v.size() == n * (n + 1) / 2;
    if (!with_diag && v.size() != n * (n - 1) / 2)
        throw DomainError("read_space: expected lower-triangular rows");
    auto X = make_space(n);
    X.provenance = prov;
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i + (with_diag ? 1 : 0); ++j) {
            double x = v[c++];
            if (j == i) continue;
            X.at(i, j) = X.at(j, i) = x;
        }
    return X;
}

FiniteMetricSpace subspace(const FiniteMetricSpace& X, const std::vector<std::size_t>& idx) {
    auto Y = make_space(idx.size());
    Y.provenance = X.provenance;
    for (std::size_t i = 0; i < Y.n; ++i) {
        Y.labels[i] = X.labels.empty() ? idx[i] : X.labels[idx[i]];
        for (std::size_t j = 0; j < Y.n; ++j) Y.at(i, j) = X(idx[i], idx[j]);
    }
    return Y;
}

std::vector<std::size_t> ball_indices(const FiniteMetricSpace& X, std::size_t c, double radius) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < X.n; ++j)
        if (X(c, j) <= radius) idx.push_back(j);
    return idx;
}

FiniteMetricSpace ball(const FiniteMetricSpace& X, std::size_t c, double radius, bool rescale) {
    if (!(radius > 0)) throw DomainError("ball: radius must be positive");
    if (c >= X.n) throw DomainError("ball: center out of range");
    auto idx = ball_indices(X, c, radius);
    if (idx.empty()) throw DomainError("ball: empty ball");
    // put the center first so downstream consumers can use index 0 as base point
    std::stable_partition(idx.begin(), idx.end(), [&](std::size_t j) { return j == c; });
    auto Y = subspace(X, idx);
    if (rescale)
        for (double& x : Y.D) x /= radius;
    return Y;
}

Net farthest_point_net(const FiniteMetricSpace& X, std::size_t m, std::size_t start) {
    Net net;
    if (X.n == 0 || m == 0) return net;
    std::vector<double> d(X.n, std::numeric_limits<double>::infinity());
    std::size_t cur = start;
    while (net.index.size() < std::min(m, X.n)) {
        net.index.push_back(cur);
        for (std::size_t j = 0; j < X.n; ++j) d[j] = std::min(d[j], X(cur, j));
        cur = static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
    }
    net.radius = *std::max_element(d.begin(), d.end());
    return net;
}

// ------------------------------------------------------------------ excess, paths, flows

ExcessField excess_from_rows(const std::vector<double>& dp, const std::vector<double>& dq, double dpq) {
    ExcessField E;
    E.e.resize(dp.size());
    for (std::size_t x = 0; x < dp.size(); ++x) E.e[x] = dp[x] + dq[x] - dpq;
    return E;
}

ExcessField excess_field(const FiniteMetricSpace& X, std::size_t p, std::size_t q) {
    ExcessField E;
    E.p = p;
    E.q = q;
    E.e.resize(X.n);
    for (std::size_t x = 0; x < X.n; ++x) E.e[x] = X(p, x) + X(x, q) - X(p, q);
    return E;
}

DiscretePath shortest_path_to(const Graph& g, const std::vector<double>& dist, std::size_t x) {
    DiscretePath P;
    P.vertices.push_back(x);
    std::size_t v = x;
    while (dist[v] > 0) {
        double tol = 1e-12 * std::max(1.0, dist[v]);
        std::size_t next = g.n, best = g.n;
        double best_val = std::numeric_limits<double>::infinity(), w_next = 0, w_best = 0;
        for (auto e = g.offset[v]; e < g.offset[v + 1]; ++e) {
            auto u = g.target[e];
            double val = dist[u] + g.weight[e];
            if (dist[u] < dist[v] && std::abs(val - dist[v]) <= tol && u < next) {
                next = u;
                w_next = g.weight[e];
            }
            if (dist[u] < dist[v] && val < best_val) {
                best_val = val;
                best = u;
                w_best = g.weight[e];
            }
        }
        if (next == g.n) {
            if (best == g.n) throw GraphError("shortest_path_to: no descending neighbour");
            next = best;
            w_next = w_best;
        }
        P.vertices.push_back(next);
        P.length += w_next;
        v = next;
    }
    return P;
}

std::vector<DiscretePath> eps_geodesics(const Graph& g, std::size_t p, std::size_t q, double eps) {
    if (!(eps > 0 && eps < 1)) throw DomainError("eps_geodesics: eps must lie in (0,1)");
    auto dp = dijkstra(g, p), dq = dijkstra(g, q);
    double dpq = dp[q];
    std::set<std::vector<std::size_t>> seen;
    std::vector<DiscretePath> out;
    for (std::size_t x = 0; x < g.n; ++x) {
        if (dp[x] + dq[x] - dpq > eps * eps * dpq) continue;
        auto a = shortest_path_to(g, dp, x);  // x .. p
        auto b = shortest_path_to(g, dq, x);  // x .. q
        DiscretePath P;
        P.vertices.assign(a.vertices.rbegin(), a.vertices.rend());
        P.vertices.insert(P.vertices.end(), b.vertices.begin() + 1, b.vertices.end());
        P.length = a.length + b.length;
        if (seen.insert(P.vertices).second) out.push_back(std::move(P));
    }
    return out;
}

std::size_t gradient_flow_map(const Graph& g, const std::vector<double>& dist_p, std::size_t x, double step) {
    if (step < 0) throw DomainError("gradient_flow_map: negative step");
    if (step == 0) return x;
    if (step >= dist_p[x]) throw DomainError("gradient_flow_map: step overshoots the base point");
    auto P = shortest_path_to(g, dist_p, x);
    double arc = 0, best_err = step;
    std::size_t best = x;
    for (std::size_t i = 1; i < P.vertices.size(); ++i) {
        arc = dist_p[x] - dist_p[P.vertices[i]];
        double err = std::abs(arc - step);
        if (err < best_err) {
            best_err = err;
            best = P.vertices[i];
        }
        if (arc > step) break;
    }
    return best;
}

double volume_ratio(const FiniteMetricSpace& X, std::size_t a, std::size_t b, double r) {
    double na = static_cast<double>(ball_indices(X, a, r).size());
    double nb = static_cast<double>(ball_indices(X, b, r).size());
    if (na == 0 || nb == 0) throw DomainError("volume_ratio: empty ball");
    return na / nb;
}

}  // namespace lab

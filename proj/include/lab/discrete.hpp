#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "lab/warped.hpp"

namespace lab {

// ------------------------------------------------------------------ samples

struct CloudPoint {
    double r = 1.0;
    double s = kPi / 2;
    Quat xi{};
    /// Points with s in {0, pi} sit on a singular ray and carry no fiber coordinate.
    bool on_ray() const { return s <= 0.0 || s >= kPi; }
};

struct SampleCloud {
    std::vector<CloudPoint> points;
    std::uint64_t seed = 0;
    std::size_t anchors = 0;  ///< the first `anchors` points are the requested anchors
    std::size_t size() const { return points.size(); }
};

struct Region {
    double r_lo = 0.5, r_hi = 1.5;
    double s_lo = 0.0, s_hi = kPi;
};

/// Riemannian volume density of the chart (r, s, Haar fiber): a^4 b^3 e^{sum m}.
double volume_density(const WarpedMetric& W, double r, double s);

/// n points in total: the anchors verbatim, then volume-distributed points: proposals stratified over an
/// (r, s) cell grid, accepted by rejection against the volume density.
SampleCloud sample_cloud(const WarpedMetric& W, const Region& region, std::size_t n,
                         std::uint64_t seed, const std::vector<CloudPoint>& anchors = {});

/// n points on the surface {xi = xi0} distributed by its area element a(r) dr ds. On the
/// flat cone this surface is a totally geodesic half-plane.
SampleCloud sample_slice(const WarpedMetric& W, const Region& region, std::size_t n, std::uint64_t seed,
                         const Quat& xi0 = Quat{});

/// Point on the singular ray s = 0 at radius r.
CloudPoint ray_point(double r);

// ------------------------------------------------------------------ graph

/// Symmetric weighted graph in compressed adjacency form.
struct Graph {
    std::size_t n = 0;
    std::vector<std::size_t> offset;  ///< size n+1
    std::vector<std::size_t> target;
    std::vector<double> weight;
    std::size_t degree(std::size_t i) const { return offset[i + 1] - offset[i]; }
    std::size_t edges() const { return target.size() / 2; }
};

struct GraphError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// First-order tangent coordinates of q seen from p in the orthonormal frame
/// (d_r, a^-1 d_s, (a b e^{m_j})^-1 V_j) at p: (dr, a ds, a b e^{m_j} omega_j). At a ray point the
/// fiber block is empty and the s-direction takes the whole transverse displacement.
std::array<double, 5> tangent_offset(const WarpedMetric& W, const CloudPoint& p, const CloudPoint& q);

/// Length of the chart segment between two cloud points by Simpson's rule on three
/// nodes. The fiber path is exp(tau omega) xi1 with omega = log(xi2 xi1^{-1}); a ray
/// endpoint takes the other endpoint's fiber coordinate.
double segment_length(const WarpedMetric& W, const CloudPoint& p, const CloudPoint& q);

/// Symmetric k-nearest-neighbour graph. Candidates are ranked by a quadratic form
/// averaged over the endpoints; retained edges get segment_length weights.
Graph build_graph(const WarpedMetric& W, const SampleCloud& cloud, std::size_t k);

/// Same edge set with every weight recomputed by segment_length on `cloud`, which must
/// have as many points as g. Used to compare one sample under two metrics.
Graph reweight_graph(const Graph& g, const WarpedMetric& W, const SampleCloud& cloud);

/// Graph from an explicit edge list (i, j, w); duplicates keep the smallest weight.
Graph graph_from_edges(std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& e);

/// Connected component sizes.
std::vector<std::size_t> component_sizes(const Graph& g);

/// Dijkstra from each source; rows[i][v] = distance(sources[i], v).
std::vector<std::vector<double>> shortest_paths(const Graph& g, const std::vector<std::size_t>& sources);

/// Single-source distances.
std::vector<double> dijkstra(const Graph& g, std::size_t source);

// ------------------------------------------------------------------ finite metric spaces

struct FiniteMetricSpace {
    std::size_t n = 0;
    std::vector<double> D;            ///< row-major n x n
    std::vector<std::size_t> labels;  ///< indices into the originating cloud
    std::string provenance;

    double operator()(std::size_t i, std::size_t j) const { return D[i * n + j]; }
    double& at(std::size_t i, std::size_t j) { return D[i * n + j]; }
    double diameter() const;
};

/// Distance callback over n points, for spaces too large to store as a matrix.
struct MetricOracle {
    std::size_t n = 0;
    std::function<double(std::size_t, std::size_t)> d;
    double operator()(std::size_t i, std::size_t j) const { return d(i, j); }
};

/// Oracle view of X; X must outlive the oracle.
MetricOracle as_oracle(const FiniteMetricSpace& X);

FiniteMetricSpace make_space(std::size_t n);
FiniteMetricSpace space_from_matrix(const std::vector<std::vector<double>>& M);

/// Metric space on `subset` of graph vertices with graph distances.
FiniteMetricSpace graph_subspace(const Graph& g, const std::vector<std::size_t>& subset);

/// Max violation of symmetry / zero diagonal / positivity / triangle inequality.
double metric_violation(const FiniteMetricSpace& X);

void write_space(std::ostream& os, const FiniteMetricSpace& X);
FiniteMetricSpace read_space(std::istream& is);

/// Closed ball around `center` (an index of X); optionally divided by the radius.
FiniteMetricSpace ball(const FiniteMetricSpace& X, std::size_t center, double radius, bool rescale);

/// Indices of X within `radius` of center.
std::vector<std::size_t> ball_indices(const FiniteMetricSpace& X, std::size_t center, double radius);

/// Farthest-point subsample of at most m points starting at `start`; returns indices and
/// the covering radius of the net.
struct Net {
    std::vector<std::size_t> index;
    double radius = 0;
};
Net farthest_point_net(const FiniteMetricSpace& X, std::size_t m, std::size_t start = 0);

FiniteMetricSpace subspace(const FiniteMetricSpace& X, const std::vector<std::size_t>& idx);

// ------------------------------------------------------------------ excess, paths, flows

struct ExcessField {
    std::size_t p = 0, q = 0;
    std::vector<double> e;
};

ExcessField excess_field(const FiniteMetricSpace& X, std::size_t p, std::size_t q);

/// Same from two distance rows and d(p,q).
ExcessField excess_from_rows(const std::vector<double>& dp, const std::vector<double>& dq,
                             double dpq);

struct DiscretePath {
    std::vector<std::size_t> vertices;
    double length = 0;
};

/// Lexicographically smallest shortest path from x to the source of `dist`.
DiscretePath shortest_path_to(const Graph& g, const std::vector<double>& dist, std::size_t x);

/// Shortest paths p -> x -> q through every vertex x with excess <= eps^2 d(p,q).
std::vector<DiscretePath> eps_geodesics(const Graph& g, std::size_t p, std::size_t q, double eps);

/// Vertex at arc distance ~step from x along the shortest path from x towards p.
std::size_t gradient_flow_map(const Graph& g, const std::vector<double>& dist_p, std::size_t x,
                              double step);

/// |B_r(a)| / |B_r(b)| by counting points of X.
double volume_ratio(const FiniteMetricSpace& X, std::size_t a, std::size_t b, double r);

}  // namespace lab

#include "lab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <set>

#include <Eigen/Dense>

#include "lab/cutlocus.hpp"
#include "lab/examples.hpp"
#include "lab/gh.hpp"
#include "lab/heat.hpp"
#include "lab/smooth.hpp"
#include "lab/sweeps.hpp"

namespace lab {

std::string library_version() { return "0.4.0"; }

namespace {

using Keys = std::vector<std::string>;

Keys with_common(Keys k) {
    k.push_back("kind");
    k.push_back("seed");
    return k;
}

std::size_t size_key(const ConfigSection& s, const std::string& key, std::size_t fallback) {
    long v = s.integer(key, static_cast<long>(fallback));
    if (v < 0) throw ConfigError(s.line_of.at(key), "key '" + key + "' must be non-negative");
    return static_cast<std::size_t>(v);
}

double positive_key(const ConfigSection& s, const std::string& key, double fallback) {
    double v = s.number(key, fallback);
    if (!(v > 0)) throw ConfigError(s.line_of.at(key), "key '" + key + "' must be positive");
    return v;
}

Json fit_json(const HolderFit& f) {
    return Json{{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual},
                {"ci_lo", f.ci_lo}, {"ci_hi", f.ci_hi}, {"points", f.x.size()}};
}

Series fit_series(const HolderFit& f, const std::vector<double>& xs) {
    Series s{"fit slope " + format_number(std::round(f.slope * 1000) / 1000)};
    for (double x : xs)
        if (x > 0) {
            s.x.push_back(x);
            s.y.push_back(std::exp(f.intercept + f.slope * std::log(x)));
        }
    return s;
}

std::array<double, 5> flat_point(const CloudPoint& p) {
    double q = p.r * std::sin(p.s);
    return {p.r * std::cos(p.s), q * p.xi.w, q * p.xi.x, q * p.xi.y, q * p.xi.z};
}

double flat_dist(const CloudPoint& a, const CloudPoint& b) {
    auto x = flat_point(a), y = flat_point(b);
    double s = 0;
    for (int k = 0; k < 5; ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
    return std::sqrt(s);
}

// ------------------------------------------------------------------ curvature

ExperimentOutput run_curvature(const ConfigSection& s, std::uint64_t seed) {
    s.require_keys(with_common({"configs", "points", "flat_points"}));
    std::size_t configs = size_key(s, "configs", 200), points = size_key(s, "points", 100);
    std::size_t flat_points = size_key(s, "flat_points", 100);
    ExperimentOutput out;
    Table t{{"closed-form Ricci against the finite-difference oracle on random configurations",
             "relative error = max |oracle - closed form| / max(1, max |oracle|)"},
            {"config", "worst_relative_error"}};
    Rng rng(seed);
    double worst = 0;
    for (std::size_t c = 0; c < configs; ++c) {
        auto W = random_warped_metric(rng);
        std::vector<std::array<double, 2>> pts(points);
        for (auto& p : pts) p = {rng.uniform(0.5, 1.5), rng.uniform(0.2, kPi - 0.2)};
        std::vector<double> err(points);
        parallel_for(points, [&](std::size_t i) {
            Mat5 O = ricci_oracle(W, {pts[i][0], pts[i][1], {}});
            auto C = ricci_closed_form(W, pts[i][0], pts[i][1]);
            Mat5 M = Mat5::Zero();
            M(0, 0) = C.rr;
            M(1, 1) = C.ss;
            for (int j = 0; j < 3; ++j) M(2 + j, 2 + j) = C.jj[j];
            err[i] = (O - M).cwiseAbs().maxCoeff() / std::max(1.0, O.cwiseAbs().maxCoeff());
        });
        double w = *std::max_element(err.begin(), err.end());
        worst = std::max(worst, w);
        t.rows.push_back({double(c), w});
    }
    auto F = flat_cone();
    double flat = 0;
    for (std::size_t i = 0; i < flat_points; ++i) {
        double r = 0.3 + 1.2 * (i + 0.5) / flat_points, sv = 0.1 + (kPi - 0.2) * ((i * 37) % flat_points + 0.5) / flat_points;
        flat = std::max(flat, ricci_oracle(F, {r, sv, {}}).cwiseAbs().maxCoeff());
    }
    out.tables.push_back({"curvature.csv", t});
    out.summary = Json{{"configs", configs}, {"points", points}, {"max_relative_error", worst},
                       {"flat_points", flat_points}, {"flat_max_abs", flat}};
    return out;
}

// ------------------------------------------------------------------ positivity

Json positivity_json(const PositivityReport& R) {
    Json c = Json::array();
    for (auto& k : R.conditions)
        c.push_back({{"name", k.name}, {"max_violation", k.max_violation}, {"r", k.r}, {"s", k.s}, {"pass", k.pass()}});
    return Json{{"min_ricci", R.min_ricci.value}, {"at_r", R.min_ricci.r}, {"at_s", R.min_ricci.s},
                {"component", R.min_ricci.component}, {"conditions_pass", R.all_pass()}, {"conditions", c}};
}

ExperimentOutput run_positivity(const ConfigSection& s, std::uint64_t) {
    s.require_keys(with_common({"grid", "control_factor"}));
    int n = static_cast<int>(size_key(s, "grid", 50));
    double factor = positive_key(s, "control_factor", 100);
    ExperimentOutput out;
    auto kA = canonical_A();
    auto kB = canonical_B();
    auto RA = verify_positivity_conditions(build_example_A(kA), kA, certification_grid_A(kA, n));
    auto RB = verify_positivity_conditions(build_example_B(kB), kB, certification_grid_B(kB, n));
    auto kC = kA;
    kC.a1 *= factor;
    auto MC = min_ricci_eigenvalue(build_example_A(kC), certification_grid_A(kC, n));
    Table t{{"minimum Ricci eigenvalue on the certification grids", "control: first example with a1 scaled"},
            {"case", "min_eigenvalue", "r", "s"}};
    t.rows.push_back({0, RA.min_ricci.value, RA.min_ricci.r, RA.min_ricci.s});
    t.rows.push_back({1, RB.min_ricci.value, RB.min_ricci.r, RB.min_ricci.s});
    t.rows.push_back({2, MC.value, MC.r, MC.s});
    t.comments.push_back("case 0 = example A, 1 = example B, 2 = control");
    out.tables.push_back({"positivity.csv", t});
    out.summary = Json{{"grid", n},
                       {"example_A", positivity_json(RA)},
                       {"example_B", positivity_json(RB)},
                       {"control", {{"a1", kC.a1}, {"min_ricci", MC.value}, {"at_r", MC.r}, {"at_s", MC.s}}}};
    return out;
}

// ------------------------------------------------------------------ gh fuzz

FiniteMetricSpace random_small_space(Rng& r, std::size_t max_points) {
    std::size_t n = 1 + r.index(max_points);
    auto X = make_space(n);
    bool euclid = r.index(2) == 0;
    std::vector<std::array<double, 3>> p(n);
    for (auto& q : p)
        for (auto& c : q) c = r.uniform();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            double d = 0;
            if (euclid) {
                for (int k = 0; k < 3; ++k) d += (p[i][k] - p[j][k]) * (p[i][k] - p[j][k]);
                d = std::sqrt(d);
            } else {
                d = 0.1 + r.uniform();
            }
            X.at(i, j) = X.at(j, i) = d;
        }
    if (!euclid)  // metric closure
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) X.at(i, j) = std::min(X(i, j), X(i, k) + X(k, j));
    return X;
}

ExperimentOutput run_gh_fuzz(const ConfigSection& s, std::uint64_t seed) {
    s.require_keys(with_common({"trials", "max_points", "restarts", "iters"}));
    std::size_t trials = size_key(s, "trials", 1000), maxp = size_key(s, "max_points", 5);
    if (maxp < 1) throw ConfigError(s.line_of.at("max_points"), "max_points must be at least 1");
    GhOptions o;
    o.restarts = static_cast<int>(s.integer("restarts", o.restarts));
    o.iters = static_cast<int>(s.integer("iters", o.iters));
    Rng rng(seed);
    std::size_t violations = 0, equal = 0;
    double max_gap = 0;
    Table t{{"gh_lower <= gh_exact <= gh_upper on random small spaces"},
            {"trial", "nx", "ny", "lower", "exact", "upper"}};
    for (std::size_t k = 0; k < trials; ++k) {
        auto X = random_small_space(rng, maxp);
        auto Y = random_small_space(rng, maxp);
        double ex = gh_exact(X, Y);
        o.seed = seed * 1000003ull + k;
        auto b = gh_upper(X, Y, o);
        if (b.lower > ex + 1e-12 || b.upper < ex - 1e-12) ++violations;
        if (b.upper <= ex + 1e-12) ++equal;
        else max_gap = std::max(max_gap, b.upper - ex);
        t.rows.push_back({double(k), double(X.n), double(Y.n), b.lower, ex, b.upper});
    }
    ExperimentOutput out;
    out.tables.push_back({"gh_fuzz.csv", t});
    out.summary = Json{{"trials", trials},
                       {"violations", violations},
                       {"upper_exact_fraction", trials ? double(equal) / trials : 1.0},
                       {"max_upper_gap", max_gap}};
    return out;
}

// ------------------------------------------------------------------ Hölder sweeps

void read_gh(const ConfigSection& s, GhOptions& o) {
    o.restarts = static_cast<int>(s.integer("gh_restarts", o.restarts));
    o.iters = static_cast<int>(s.integer("gh_iters", o.iters));
}

ExperimentOutput run_holder_cones(const ConfigSection& s, std::uint64_t seed) {
    s.require_keys(with_common({"delta", "offsets", "fiber_samples", "knn", "net", "r_ref", "control", "gh_restarts",
                                "gh_iters"}));
    ConeSweepConfig c;
    c.constants.delta = s.number("delta", c.constants.delta);
    c.offsets = s.numbers("offsets", c.offsets);
    c.fiber_samples = size_key(s, "fiber_samples", c.fiber_samples);
    c.knn = size_key(s, "knn", c.knn);
    c.net = size_key(s, "net", c.net);
    c.r_ref = s.number("r_ref", c.r_ref);
    c.seed = seed;
    c.gh.seed = seed;
    read_gh(s, c.gh);
    bool control = s.flag("control", true);
    auto R = holder_cone_sweep(c);
    ExperimentOutput out;
    Table t{{"cone balls over (S^3, g(r)) against r_ref", "columns: offset |r - r_ref|, GH bounds"},
            {"offset", "coupled", "upper", "lower"}};
    Series up{"upper"}, lo{"lower"};
    for (auto& r : R.rows) {
        t.rows.push_back({r.r2 - r.r1, r.coupled, r.upper, r.lower});
        up.x.push_back(r.r2 - r.r1);
        up.y.push_back(r.upper);
        lo.x.push_back(r.r2 - r.r1);
        lo.y.push_back(r.lower);
    }
    std::vector<Series> plot{up, lo};
    bool lower_positive = std::all_of(R.rows.begin(), R.rows.end(), [](auto& r) { return r.lower > 0; });
    out.summary = Json{{"delta", c.constants.delta}, {"target", R.target}, {"forbidden", R.forbidden},
                       {"ball_size", R.ball_size}, {"clamped", R.clamped}, {"noise_floor", R.noise_floor},
                       {"lower_positive", lower_positive}};
    if (!R.fit.x.empty()) {
        out.summary["fit"] = fit_json(R.fit);
        plot.push_back(fit_series(R.fit, up.x));
    }
    if (control) {
        auto cc = c;
        cc.constant_fiber = true;
        auto C = holder_cone_sweep(cc);
        double mx = 0;
        for (auto& r : C.rows) {
            mx = std::max(mx, r.upper);
            t.rows.push_back({r.r2 - r.r1, r.coupled, r.upper, r.lower});
        }
        t.comments.push_back("rows after the first " + std::to_string(R.rows.size()) + " are the constant-fiber control");
        out.summary["control"] = Json{{"max_signal", mx}, {"noise_floor", C.noise_floor},
                                      {"below_floor", mx < R.noise_floor}};
    }
    out.tables.push_back({"holder_cones.csv", t});
    PlotSpec ps{"cone GH distance vs |r - r'|", "|r - r'|", "d_GH", true, true};
    out.plots.push_back({"holder_cones.svg", svg_plot(ps, plot)});
    return out;
}

ExperimentOutput run_holder_balls(const ConfigSection& s, std::uint64_t seed) {
    s.require_keys(with_common({"base", "offsets", "radius", "ell_lo", "ell_hi", "delta", "samples", "knn", "net",
                                "control", "gh_restarts", "gh_iters"}));
    BallSweepConfig c;
    c.base = s.number("base", c.base);
    c.offsets = s.numbers("offsets", c.offsets);
    c.radius = positive_key(s, "radius", c.radius);
    c.ell_lo = s.number("ell_lo", c.ell_lo);
    c.ell_hi = s.number("ell_hi", c.ell_hi);
    c.delta = s.number("delta", c.delta);
    c.samples = size_key(s, "samples", c.samples);
    c.knn = size_key(s, "knn", c.knn);
    c.net = size_key(s, "net", c.net);
    c.seed = seed;
    c.gh.seed = seed;
    read_gh(s, c.gh);
    bool control = s.flag("control", false);
    auto R = holder_ball_sweep(c);
    ExperimentOutput out;
    Table t{{"balls B_r(gamma(s)), B_r(gamma(t)) along the singular ray, distances divided by r"},
            {"s", "t", "size_s", "size_t", "coupled", "upper", "lower"}};
    Series up{"upper / r"}, lo{"lower / r"};
    std::vector<double> sep;
    for (auto& r : R.rows) {
        t.rows.push_back({r.s, r.t, double(r.size_s), double(r.size_t_), r.coupled, r.upper, r.lower});
        sep.push_back(r.t - r.s);
        up.x.push_back(r.t - r.s);
        up.y.push_back(r.upper);
        lo.x.push_back(r.t - r.s);
        lo.y.push_back(r.lower);
    }
    std::vector<Series> plot{up, lo};
    out.summary = Json{{"radius", c.radius}, {"monotone", R.monotone}, {"loose", R.loose},
                       {"noise_floor", R.noise_floor}};
    if (!R.fit.x.empty()) {
        // smallest C with upper <= C |s - t|^slope on every row
        double C = 0;
        for (std::size_t i = 0; i < sep.size(); ++i) C = std::max(C, up.y[i] / std::pow(sep[i], R.fit.slope));
        out.summary["fit"] = fit_json(R.fit);
        out.summary["constant"] = C;
        plot.push_back(fit_series(R.fit, sep));
    }
    if (control) {
        auto cc = c;
        cc.constant_fiber = true;
        auto C = holder_ball_sweep(cc);
        for (auto& r : C.rows)
            t.rows.push_back({r.s, r.t, double(r.size_s), double(r.size_t_), r.coupled, r.upper, r.lower});
        t.comments.push_back("rows after the first " + std::to_string(R.rows.size()) + " are the constant-fiber control");
        out.summary["control"] = Json{{"noise_floor", C.noise_floor}, {"monotone", C.monotone}};
        if (!C.fit.x.empty()) out.summary["control"]["fit"] = fit_json(C.fit);
    }
    out.tables.push_back({"holder_balls.csv", t});
    PlotSpec ps{"ball GH distance / r vs |s - t|", "|s - t|", "d_GH / r", true, true};
    out.plots.push_back({"holder_balls.svg", svg_plot(ps, plot)});
    return out;
}

ExperimentOutput run_reifenberg(const ConfigSection& s, std::uint64_t seed) {
    s.require_keys(with_common({"metric", "exact", "r_anchor", "s_anchor", "radii", "samples", "knn", "net",
                                "gh_restarts", "gh_iters"}));
    ReifenbergConfig c;
    c.metric = s.text("metric", c.metric);
    if (c.metric != "flat" && c.metric != "exampleA")
        throw ConfigError(s.line_of.at("metric"), "metric must be flat or exampleA");
    c.exact = s.flag("exact", c.exact);
    c.r_anchor = s.number("r_anchor", c.r_anchor);
    c.s_anchor = s.number("s_anchor", c.s_anchor);
    c.radii = s.numbers("radii", c.radii);
    c.samples = size_key(s, "samples", c.samples);
    c.knn = size_key(s, "knn", c.knn);
    c.net = size_key(s, "net", c.net);
    c.seed = seed;
    c.gh.seed = seed;
    read_gh(s, c.gh);
    auto R = reifenberg_check(c);
    ExperimentOutput out;
    Table t{{"B_r(anchor) / r against the Euclidean unit 5-ball", "metric " + c.metric + (c.exact ? " (exact)" : "")},
            {"r", "size", "upper", "lower"}};
    Series up{"upper"}, lo{"lower"};
    Json rows = Json::array();
    bool nonincreasing = true;
    for (std::size_t i = 0; i < R.rows.size(); ++i) {
        auto& r = R.rows[i];
        t.rows.push_back({r.r, double(r.size), r.upper, r.lower});
        up.x.push_back(r.r);
        up.y.push_back(r.upper);
        lo.x.push_back(r.r);
        lo.y.push_back(r.lower);
        rows.push_back({{"r", r.r}, {"upper", r.upper}, {"lower", r.lower}});
        // radii are listed large to small
        if (i > 0 && r.upper > R.rows[i - 1].upper + 1e-12) nonincreasing = false;
    }
    out.tables.push_back({"reifenberg.csv", t});
    out.plots.push_back({"reifenberg.svg", svg_plot({"Reifenberg check", "r", "d_GH / r", true, false}, {up, lo})});
    out.summary = Json{{"metric", c.metric}, {"exact", c.exact}, {"rows", rows}, {"nonincreasing", nonincreasing}};
    return out;
}

// ------------------------------------------------------------------ excess

ExperimentOutput run_excess(const ConfigSection& s, std::uint64_t seed) {
    s.require_keys(with_common({"p", "q", "center", "radii", "samples"}));
    ExcessSweepConfig c;
    c.p = s.number("p", c.p);
    c.q = s.number("q", c.q);
    c.center = s.number("center", c.center);
    c.radii = s.numbers("radii", c.radii);
    c.samples = size_key(s, "samples", c.samples);
    c.seed = seed;
    auto R = excess_sweep(c);
    ExperimentOutput out;
    Table t{{"mean excess e_{p,q} over B_R(center) along the singular ray of the first example"},
            {"radius", "mean_excess", "max_excess", "proposals"}};
    Series m{"mean excess"};
    for (auto& r : R.rows) {
        t.rows.push_back({r.radius, r.mean, r.max, double(r.proposals)});
        m.x.push_back(r.radius);
        m.y.push_back(r.mean);
    }
    out.tables.push_back({"excess.csv", t});
    out.plots.push_back(
        {"excess.svg", svg_plot({"mean ball excess", "R", "mean e", true, true}, {m, fit_series(R.fit, m.x)})});
    out.summary = Json{{"samples_per_ball", c.samples}, {"fit", fit_json(R.fit)}};
    return out;
}

// ------------------------------------------------------------------ heat

/// Tail of the chi-square distribution with five degrees of freedom.
double chi2_5_tail(double x) {
    return std::erfc(std::sqrt(x / 2)) + std::sqrt(2 * x / kPi) * std::exp(-x / 2) * (1 + x / 3);
}

ExperimentOutput run_heat(const ConfigSection& s, std::uint64_t seed) {
    s.require_keys(with_common({"slice_points", "slice_knn", "corrected", "eps", "delta", "substeps", "cone_points",
                                "cone_knn", "harnack_radius", "harnack_times", "harnack_substeps"}));
    const std::size_t n = size_key(s, "slice_points", 20000), k = size_key(s, "slice_knn", 48);
    const bool corrected = s.flag("corrected", true);
    const auto eps_list = s.numbers("eps", {0.02, 0.05, 0.1});
    const double delta = positive_key(s, "delta", 0.2);
    const int substeps = static_cast<int>(size_key(s, "substeps", 16));
    ExperimentOutput out;

    // two-dimensional totally geodesic slice of the flat cone
    auto W = flat_cone();
    Region reg{0.1, 2.2, kPi / 2 - 1.2, kPi / 2 + 1.2};
    auto cloud = sample_slice(W, reg, n, seed);
    cloud.points.insert(cloud.points.begin(), {CloudPoint{0.6, kPi / 2, {}}, CloudPoint{1.4, kPi / 2, {}}});
    cloud.points.resize(n);
    cloud.anchors = 2;
    auto g = build_graph(W, cloud, k);
    std::size_t fallbacks = 0;
    auto L = corrected ? drift_corrected_laplacian(
                             g, [&](std::size_t i, std::size_t j) { return tangent_offset(W, cloud.points[i], cloud.points[j]); },
                             2, &fallbacks)
                       : graph_laplacian(g, 2);
    std::vector<double> dp(n), dq(n);
    for (std::size_t i = 0; i < n; ++i) {
        dp[i] = flat_dist(cloud.points[i], cloud.points[0]);
        dq[i] = flat_dist(cloud.points[i], cloud.points[1]);
    }
    const double dpq = dq[0];
    auto boundary = [&](const CloudPoint& p) {
        double a = std::min(p.s - reg.s_lo, reg.s_hi - p.s);
        return std::min({p.r - reg.r_lo, reg.r_hi - p.r, a >= kPi / 2 ? p.r : p.r * std::sin(a)});
    };

    Table par{{"parabolic approximation on the flat two-dimensional slice",
               "checked vertices keep 4 eps d_pq clear of the sample boundary"},
              {"eps", "t", "interior_points", "max_dev", "c_dev", "lipschitz", "c_lip", "lsq_gradient_max", "grad_mean",
               "lap_excess", "min_e"}};
    double c_dev = 0, c_lip = 0, min_e = std::numeric_limits<double>::infinity(), lip_max = 0, lsq_max = 0;
    for (double eps : eps_list) {
        std::vector<char> mask(n);
        for (std::size_t i = 0; i < n; ++i) mask[i] = boundary(cloud.points[i]) >= 4 * eps * dpq;
        auto R = parabolic_approx(L, dp, dq, 0, 1, eps, delta, substeps, mask);
        // least-squares gradient of h^- from the one-ring, away from both ends
        double gmax = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!mask[i] || dp[i] < 0.3 * dpq || dq[i] < 0.3 * dpq || R.psi[i] < 1) continue;
            Eigen::MatrixXd Y(g.degree(i), 2);
            Eigen::VectorXd b(g.degree(i));
            std::size_t row = 0;
            for (auto e = g.offset[i]; e < g.offset[i + 1]; ++e, ++row) {
                auto y = tangent_offset(W, cloud.points[i], cloud.points[g.target[e]]);
                Y(row, 0) = y[0];
                Y(row, 1) = y[1];
                b[row] = R.h_minus[g.target[e]] - R.h_minus[i];
            }
            gmax = std::max(gmax, Eigen::Vector2d(Y.colPivHouseholderQr().solve(b)).norm());
        }
        par.rows.push_back({eps, R.t, double(R.interior_points), R.max_dev, R.c_dev, R.lipschitz, R.c_lip, gmax,
                            R.grad_mean, R.lap_excess, R.min_e_t});
        c_dev = std::max(c_dev, R.c_dev);
        c_lip = std::max(c_lip, R.c_lip);
        lip_max = std::max(lip_max, R.lipschitz);
        lsq_max = std::max(lsq_max, gmax);
        min_e = std::min(min_e, R.min_e_t);
    }
    out.tables.push_back({"heat_parabolic.csv", par});

    // stochasticity, maximum principle and semigroup on the same operator
    const double t_ref = std::pow(0.05 * dpq, 2);
    HeatSolver S(L, t_ref / substeps);
    double row_err = 0, row_min = 0;
    std::vector<std::size_t> rows{0, 1, n / 3, 2 * n / 3};
    for (auto x : rows) {
        auto h = S.kernel_row(x, substeps);
        double sum = std::accumulate(h.begin(), h.end(), 0.0);
        row_err = std::max(row_err, std::abs(sum - 1));
        row_min = std::min(row_min, *std::min_element(h.begin(), h.end()));
    }
    std::vector<double> u0(n);
    for (std::size_t i = 0; i < n; ++i) u0[i] = dp[i] <= 0.2 ? 1.0 : 0.0;
    auto whole = heat_flow(L, u0, 5 * t_ref, 5 * substeps);
    auto split = heat_flow(L, heat_flow(L, u0, 2 * t_ref, 2 * substeps), 3 * t_ref, 3 * substeps);
    double semigroup = 0;
    for (std::size_t i = 0; i < n; ++i) semigroup = std::max(semigroup, std::abs(whole[i] - split[i]));
    double umax = *std::max_element(whole.begin(), whole.end()), umin = *std::min_element(whole.begin(), whole.end());

    // kernel estimates on the five-dimensional flat cone
    const std::size_t nc = size_key(s, "cone_points", 8000), kc = size_key(s, "cone_knn", 12);
    const double hr = positive_key(s, "harnack_radius", 0.4);
    const int nt = static_cast<int>(size_key(s, "harnack_times", 5));
    const int hs = static_cast<int>(size_key(s, "harnack_substeps", 8));
    auto cc = sample_cloud(W, {0.0, 2.0, 0, kPi}, nc, seed + 2, {CloudPoint{1.0, kPi / 2, {}}});
    auto gc = build_graph(W, cc, kc);
    auto Lc = graph_laplacian(gc, 5);
    std::vector<double> dx(nc);
    for (std::size_t i = 0; i < nc; ++i) dx[i] = flat_dist(cc.points[i], cc.points[0]);
    auto H = harnack_check(Lc, dx, 0, hr, 0.0, nt, hs);
    std::vector<double> ref, lt, lr;
    for (double t : H.times) {
        ref.push_back(chi2_5_tail(hr * hr / (2 * t)));
        lt.push_back(std::log(t));
        lr.push_back(std::log(ref.back()));
    }
    double ref_slope = fit_line(lt, lr).slope;
    Table kt{{"off-ball heat kernel mass on the flat five-dimensional cone",
              "reference: continuum tail P(chi2_5 > r^2 / 2t)"},
             {"t", "t_over_r2", "offball_mass", "reference_mass", "c_offball", "diag_ratio"}};
    Series ms{"graph"}, rs{"continuum"};
    for (std::size_t i = 0; i < H.times.size(); ++i) {
        kt.rows.push_back({H.times[i], H.times[i] / (hr * hr), H.offball_mass[i], ref[i], H.c_offball[i], H.diag_ratio[i]});
        ms.x.push_back(H.times[i]);
        ms.y.push_back(H.offball_mass[i]);
        rs.x.push_back(H.times[i]);
        rs.y.push_back(ref[i]);
    }
    out.tables.push_back({"heat_kernel.csv", kt});
    out.plots.push_back({"heat_kernel.svg", svg_plot({"off-ball kernel mass", "t", "mass", true, true}, {ms, rs})});

    out.summary = Json{
        {"slice", {{"points", n}, {"knn", k}, {"corrected", corrected}, {"fallback_rows", fallbacks}, {"d_pq", dpq}}},
        {"stochasticity_error", row_err},
        {"kernel_min_entry", row_min},
        {"semigroup_error", semigroup},
        {"max_principle", {{"max", umax}, {"min", umin}, {"holds", umax <= 1 + 1e-12 && umin >= -1e-12}}},
        {"parabolic",
         {{"c_dev", c_dev}, {"c_lip", c_lip}, {"lipschitz_max", lip_max}, {"lsq_gradient_max", lsq_max}, {"min_e", min_e}}},
        {"harnack",
         {{"points", nc}, {"radius", hr}, {"c_mean_value", H.c_mean_value}, {"mean_u0", H.mean_u0}, {"u_r2", H.u_r2},
          {"mass_slope", H.slope}, {"reference_slope", ref_slope}}}};
    return out;
}

// ------------------------------------------------------------------ Jacobi and Hessian

double metric_speed(const std::function<Mat5(const Chart5&)>& g, const Chart5& x, const Chart5& v) {
    auto G = g(x);
    Eigen::Matrix<double, 5, 1> w;
    for (int i = 0; i < 5; ++i) w[i] = v[i];
    return std::sqrt(w.dot(G * w));
}

ExperimentOutput run_jacobi(const ConfigSection& s, std::uint64_t seed) {
    s.require_keys(with_common({"delta", "geodesics", "length", "hessian_deltas", "samples"}));
    const double delta = positive_key(s, "delta", 0.1);
    const std::size_t count = size_key(s, "geodesics", 6);
    const double length = positive_key(s, "length", 0.3);
    const auto hd = s.numbers("hessian_deltas", {0.05, 0.1, 0.2});
    const int samples = static_cast<int>(size_key(s, "samples", 101));
    ExperimentOutput out;
    Rng rng(seed);
    auto gf = chart_metric_fn(flat_cone());

    // flat: J(0) = 0 gives |J|(t) / |J|(s) = t / s along every geodesic
    Table jt{{"Jacobi ratios: flat error against t/s, envelope constants"},
             {"case", "r0", "s0", "ratio_error", "c_ratio", "c_log"}};
    double flat_err = 0, flat_c = 0;
    for (std::size_t k = 0; k < count; ++k) {
        Chart5 x0{rng.uniform(0.6, 1.2), rng.uniform(0.5, kPi - 0.5), 0, 0, 0}, v0, w;
        for (auto& c : v0) c = rng.normal();
        for (auto& c : w) c = rng.normal();
        double sp = metric_speed(gf, x0, v0);
        for (auto& c : v0) c *= length / sp;
        auto J = jacobi_ratio(gf, x0, v0, w, delta, samples);
        double err = 0;
        for (std::size_t i = 0; i < J.t.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (J.t[j] >= delta - 1e-12 && J.t[i] <= 1 - delta + 1e-12)
                    err = std::max(err, std::abs(J.norm[i] / J.norm[j] / (J.t[i] / J.t[j]) - 1));
        flat_err = std::max(flat_err, err);
        flat_c = std::max(flat_c, J.c_ratio);
        jt.rows.push_back({0, x0[0], x0[1], err, J.c_ratio, J.c_log});
    }
    // first example, geodesics kept away from the singular rays
    auto kA = canonical_A();
    auto ga = chart_metric_fn(build_example_A(kA));
    double c_env = 0, min_s = kPi;
    for (std::size_t k = 0; k < count; ++k) {
        Chart5 x0{rng.uniform(0.6, 1.0), rng.uniform(0.5, kPi - 0.5), 0, 0, 0}, v0, w;
        for (auto& c : v0) c = rng.normal();
        for (auto& c : w) c = rng.normal();
        double sp = metric_speed(ga, x0, v0);
        for (auto& c : v0) c *= length / sp;
        auto geo = chart_geodesic(ga, x0, v0, samples);
        for (auto& x : geo.x) min_s = std::min({min_s, x[1], kPi - x[1]});
        auto J = jacobi_ratio(ga, x0, v0, w, delta, samples);
        c_env = std::max({c_env, J.c_ratio, J.c_log});
        jt.rows.push_back({1, x0[0], x0[1], 0, J.c_ratio, J.c_log});
    }
    jt.comments.push_back("case 0 = flat cone, 1 = first example");
    out.tables.push_back({"jacobi.csv", jt});

    // integral of |Hess d_p|^2 along a unit flat geodesic: exactly 4 (1/delta - 1/(1-delta))
    Chart5 x0{1.0, 1.2, 0.1, 0.0, 0.2}, v0{0.6, 0.5, 0.2, -0.1, 0.3};
    double sp = metric_speed(gf, x0, v0);
    for (auto& c : v0) c /= sp;
    auto geo = chart_geodesic(gf, x0, v0, 201);
    auto P = flat_embed(x0);
    ChartScalar f = [&](const Chart5& x) {
        auto e = flat_embed(x);
        double q = 0;
        for (int i = 0; i < 5; ++i) q += (e[i] - P[i]) * (e[i] - P[i]);
        return std::sqrt(q);
    };
    Table ht{{"integral of |Hess d_p|^2 over [delta, 1 - delta] along a unit flat geodesic"},
             {"delta", "integral", "closed_form", "integral_times_delta"}};
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (double d : hd) {
        double I = hessian_along_geodesic(gf, geo, f, d);
        ht.rows.push_back({d, I, 4 * (1 / d - 1 / (1 - d)), I * d});
        lo = std::min(lo, I * d);
        hi = std::max(hi, I * d);
    }
    out.tables.push_back({"hessian.csv", ht});
    out.summary = Json{{"delta", delta},
                       {"flat_ratio_error", flat_err},
                       {"flat_c_ratio", flat_c},
                       {"exampleA_envelope_c", c_env},
                       {"exampleA_min_ray_distance_s", min_s},
                       {"hessian_scaling_spread", hi / lo}};
    return out;
}

// ------------------------------------------------------------------ cutlocus

ExperimentOutput run_cutlocus(const ConfigSection& s, std::uint64_t seed) {
    s.require_keys(with_common({"points", "eps", "delta", "radii", "max_pairs", "extent", "monotone_pairs",
                                "midpoint_pairs", "midpoint_min_distance"}));
    const std::size_t n = size_key(s, "points", 20000);
    const double eps = s.number("eps", 0.05), delta = positive_key(s, "delta", 0.2);
    const auto radii = s.numbers("radii", parse_number_list("0.02:0.2:8"));
    const std::size_t max_pairs = size_key(s, "max_pairs", 3000);
    const double R0 = positive_key(s, "extent", 1.0);
    const std::size_t mono_pairs = size_key(s, "monotone_pairs", 300), mid_pairs = size_key(s, "midpoint_pairs", 200);
    const double mid_min = s.number("midpoint_min_distance", 0.3);

    auto W = flat_cone();
    auto c = sample_slice(W, {0.0, R0, 0, kPi}, n, seed);
    std::vector<double> X(n), Y(n);
    std::vector<char> S(n);
    for (std::size_t i = 0; i < n; ++i) {
        X[i] = c.points[i].r * std::cos(c.points[i].s);
        Y[i] = c.points[i].r * std::sin(c.points[i].s);
        S[i] = std::hypot(X[i], Y[i] - R0 / 2) <= R0 / 2;
    }
    MetricOracle O{n, [&](std::size_t i, std::size_t j) { return std::hypot(X[i] - X[j], Y[i] - Y[j]); }};
    auto D = measure_decay(O, S, delta, radii, eps, max_pairs, seed + 1);
    ExperimentOutput out;
    Table t{{"fraction of annulus pairs in Cl(M, r, eps) on the flat half-plane slice"}, {"r", "fraction"}};
    Series fs{"fraction"};
    for (std::size_t k = 0; k < D.radii.size(); ++k) {
        t.rows.push_back({D.radii[k], D.fraction[k]});
        fs.x.push_back(D.radii[k]);
        fs.y.push_back(D.fraction[k]);
    }
    out.tables.push_back({"cutlocus.csv", t});
    Series fit{"fit slope " + format_number(std::round(D.slope * 1000) / 1000)};
    for (double r : D.radii) {
        fit.x.push_back(r);
        fit.y.push_back(std::exp(D.intercept + D.slope * std::log(r)));
    }
    out.plots.push_back({"cutlocus.svg", svg_plot({"cutlocus measure decay", "r", "fraction", true, true}, {fs, fit})});

    // set inclusions across r and eps on a pair sample
    auto pairs = sample_pairs(n, mono_pairs, seed + 2);
    const std::vector<double> rs{0.02, 0.05, 0.1}, es{0.1, 0.05, 0.02, 0.0};
    std::vector<std::vector<CutlocusSet>> sets(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i)
        for (double e : es) sets[i].push_back(effective_cutlocus(O, pairs, rs[i], e));
    std::size_t viol = 0;
    for (std::size_t i = 0; i < rs.size(); ++i)
        for (std::size_t j = 0; j < es.size(); ++j)
            for (std::size_t p = 0; p < pairs.size(); ++p) {
                if (i + 1 < rs.size() && sets[i][j].member[p] && !sets[i + 1][j].member[p]) ++viol;
                if (j + 1 < es.size() && sets[i][j].member[p] && !sets[i][j + 1].member[p]) ++viol;
            }

    // midpoints of random pairs
    Rng rng(seed + 3);
    double imb = 0, join = 0, imb_sum = 0;
    std::size_t used = 0;
    while (used < mid_pairs) {
        std::size_t x = rng.index(n), y = rng.index(n);
        double d = O(x, y);
        if (x == y || d < mid_min) continue;
        auto M = midpoint_check(O, {x, y});
        imb = std::max(imb, M.imbalance / d);
        imb_sum += M.imbalance / d;
        join = std::max(join, M.join_excess / d);
        ++used;
    }
    out.summary = Json{{"points", n},
                       {"eps", eps},
                       {"delta", delta},
                       {"population", D.population},
                       {"slope", D.slope},
                       {"intercept", D.intercept},
                       {"monotone_in_r", D.monotone},
                       {"inclusion_violations", viol},
                       {"inclusion_pairs", pairs.size()},
                       {"midpoint",
                        {{"pairs", used}, {"max_imbalance", imb}, {"mean_imbalance", used ? imb_sum / used : 0.0},
                         {"max_join_excess", join}}}};
    return out;
}

using Runner = ExperimentOutput (*)(const ConfigSection&, std::uint64_t);

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> m{
        {"curvature", run_curvature}, {"positivity", run_positivity},       {"gh_fuzz", run_gh_fuzz},
        {"holder_cones", run_holder_cones}, {"holder_balls", run_holder_balls}, {"reifenberg", run_reifenberg},
        {"excess", run_excess},       {"heat", run_heat},                   {"jacobi", run_jacobi},
        {"cutlocus", run_cutlocus}};
    return m;
}

std::string kind_of(const ConfigSection& s) {
    auto k = s.text("kind", s.name);
    if (!runners().count(k)) {
        int line = s.has("kind") ? s.line_of.at("kind") : s.line;
        std::string known;
        for (auto& kv : runners()) known += (known.empty() ? "" : ", ") + kv.first;
        throw ConfigError(line, "unknown experiment kind '" + k + "' (known: " + known + ")");
    }
    return k;
}

}  // namespace

std::vector<std::string> experiment_kinds() {
    std::vector<std::string> k;
    for (auto& kv : runners()) k.push_back(kv.first);
    return k;
}

ExperimentOutput run_experiment(const ConfigSection& section, std::uint64_t global_seed) {
    auto kind = kind_of(section);
    long seed = section.integer("seed", static_cast<long>(global_seed));
    auto out = runners().at(kind)(section, static_cast<std::uint64_t>(seed));
    out.name = section.name;
    out.kind = kind;
    out.summary["seed"] = seed;
    return out;
}

BundleResult run_config(const Config& cfg, const std::string& out_dir,
                        const std::function<void(const std::string&)>& progress) {
    cfg.global.require_keys({"seed", "jobs", "title"});
    const long seed = cfg.global.integer("seed", 1);
    if (cfg.global.has("jobs")) set_jobs(static_cast<int>(cfg.global.integer("jobs", 0)));
    // schema errors surface before any work starts
    for (auto& e : cfg.experiments) {
        kind_of(e);
        e.integer("seed", 0);
    }
    std::filesystem::create_directories(out_dir);
    BundleResult B;
    Json exps = Json::array();
    for (auto& e : cfg.experiments) {
        if (progress) progress(e.name);
        auto o = run_experiment(e, static_cast<std::uint64_t>(seed));
        Json files = Json::array();
        auto emit = [&](const std::string& file, const std::string& text) {
            // runner files are named after the kind; the experiment name takes its place
            auto name = file.rfind(o.kind, 0) == 0 ? e.name + file.substr(o.kind.size()) : e.name + "_" + file;
            auto path = (std::filesystem::path(out_dir) / name).string();
            write_text(path, text);
            B.files.push_back(path);
            files.push_back({{"file", name}, {"fnv1a", fnv1a_hex(text)}});
        };
        for (auto& [f, t] : o.tables) {
            t.comments.insert(t.comments.begin(), "experiment " + e.name + " (" + o.kind + "), config " + cfg.hash +
                                                      ", seed " + std::to_string(o.summary["seed"].get<long>()));
            emit(f, to_csv(t));
        }
        for (auto& [f, svg] : o.plots) emit(f, svg);
        exps.push_back({{"name", o.name}, {"kind", o.kind}, {"files", files}, {"summary", o.summary}});
        B.experiments.push_back(std::move(o));
    }
    B.manifest = Json{{"title", cfg.global.text("title", "")},
                      {"config_hash", cfg.hash},
                      {"seed", seed},
                      {"version", library_version()},
                      {"compiler", __VERSION__},
                      {"experiments", exps}};
    auto mpath = (std::filesystem::path(out_dir) / "manifest.json").string();
    write_text(mpath, B.manifest.dump(2) + "\n");
    B.files.push_back(mpath);
    return B;
}

std::string canonical_config() {
    return R"(# canonical experiment set; every acceptance check reads one of these sections
title = canonical
seed = 1

[experiment.curvature]
configs = 200
points = 100

[experiment.positivity]
grid = 50
control_factor = 100

[experiment.gh_fuzz]
trials = 1000
max_points = 5

[experiment.holder_cones]
delta = 0.2
fiber_samples = 2000
net = 64
control = true

[experiment.holder_balls]
radius = 0.05
offsets = 0.025,0.0354,0.05,0.0707,0.1,0.141,0.2
control = false

[experiment.excess]
radii = 0.02:0.2:8
samples = 400

[experiment.heat]
slice_points = 20000
slice_knn = 48
eps = 0.02,0.05,0.1
cone_points = 8000

[experiment.jacobi]
delta = 0.1
hessian_deltas = 0.05,0.1,0.2

[experiment.cutlocus]
points = 20000
eps = 0.05
delta = 0.2
radii = 0.02:0.2:8
)";
}

}  // namespace lab

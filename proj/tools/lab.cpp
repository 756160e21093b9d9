// Command-line driver for the metric geometry lab.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "lab/discrete.hpp"
#include "lab/examples.hpp"
#include "lab/experiments.hpp"
#include "lab/gh.hpp"

using namespace lab;

namespace {

struct Globals {
    long seed = 1;
    std::string out_dir = "out";
    int jobs = 0;
};

struct MetricChoice {
    WarpedMetric W;
    std::string name;
    Json constants = Json::object();
};

/// "flat", "A", "B", or a key = value file with `example = A|B` and constant overrides.
MetricChoice load_metric(const std::string& spec) {
    MetricChoice m;
    auto to_json = [](const KeyValues& kv) {
        Json j = Json::object();
        for (auto& [k, v] : kv) j[k] = v;
        return j;
    };
    if (spec == "flat") {
        m.W = flat_cone();
        m.name = "flat";
        return m;
    }
    KeyValues kv;
    std::string which = spec;
    if (spec != "A" && spec != "B") {
        auto cfg = load_config(spec);
        if (!cfg.experiments.empty()) throw ConfigError(cfg.experiments[0].line, "metric files take no sections");
        which = cfg.global.text("example", "");
        for (auto& [k, v] : cfg.global.entries)
            if (k != "example") kv[k] = v;
        if (which != "A" && which != "B")
            throw ConfigError(cfg.global.has("example") ? cfg.global.line_of.at("example") : 1,
                              "metric file needs example = A or example = B");
    }
    if (which == "A") {
        auto base = to_keyvalues(canonical_A());
        for (auto& [k, v] : kv) {
            if (!base.count(k)) throw ConfigError(0, "unknown constant '" + k + "' for example A");
            base[k] = v;
        }
        auto k = constants_A_from(base);
        m.W = build_example_A(k);
        m.constants = to_json(to_keyvalues(k));
    } else {
        auto base = to_keyvalues(canonical_B());
        for (auto& [k, v] : kv) {
            if (!base.count(k)) throw ConfigError(0, "unknown constant '" + k + "' for example B");
            base[k] = v;
        }
        auto k = constants_B_from(base);
        m.W = build_example_B(k);
        m.constants = to_json(to_keyvalues(k));
    }
    m.name = which;
    return m;
}

std::vector<double> numbers(const std::string& s) { return parse_number_list(s); }

void emit(const Globals& g, const ExperimentOutput& o) {
    std::filesystem::create_directories(g.out_dir);
    for (auto& [f, t] : o.tables) write_text((std::filesystem::path(g.out_dir) / f).string(), to_csv(t));
    for (auto& [f, svg] : o.plots) write_text((std::filesystem::path(g.out_dir) / f).string(), svg);
    std::cout << Json{{"experiment", o.kind}, {"summary", o.summary}}.dump(2) << "\n";
}

/// Runs one experiment kind with key = value overrides taken from the command line.
void run_kind(const Globals& g, const std::string& kind, const std::map<std::string, std::string>& kv) {
    std::string text = "[experiment." + kind + "]\n";
    for (auto& [k, v] : kv)
        if (!v.empty()) text += k + " = " + v + "\n";
    auto cfg = parse_config(text);
    emit(g, run_experiment(cfg.experiments.at(0), static_cast<std::uint64_t>(g.seed)));
}

FiniteMetricSpace read_space_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    return read_space(f);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"metric geometry lab: warped examples, sampled spaces, GH bounds, heat flow, sweeps"};
    Globals g;
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "directory for CSV, SVG and manifests")->capture_default_str();
    app.add_option("--jobs", g.jobs, "worker threads (0 = all cores)")->capture_default_str();
    app.require_subcommand(1);

    // example
    auto* ex = app.add_subcommand("example", "print constants and positivity certificates of an example");
    std::string ex_metric = "A";
    int ex_grid = 50;
    ex->add_option("metric", ex_metric, "A, B or a metric file")->capture_default_str();
    ex->add_option("--grid", ex_grid, "certification grid size")->capture_default_str();

    // curvature
    auto* cu = app.add_subcommand("curvature", "Ricci eigenvalues at a point, closed form and oracle");
    std::string cu_metric = "A";
    double cu_r = 1.0, cu_s = 1.0;
    cu->add_option("--metric", cu_metric, "flat, A, B or a metric file")->capture_default_str();
    cu->add_option("--r", cu_r)->capture_default_str();
    cu->add_option("--s", cu_s)->capture_default_str();

    // sample
    auto* sa = app.add_subcommand("sample", "volume-distributed sample written as CSV (r, s, xi)");
    std::string sa_metric = "flat", sa_region = "0.5,1.5,0,3.141592653589793", sa_out = "cloud.csv";
    std::size_t sa_n = 2000;
    sa->add_option("--metric", sa_metric)->capture_default_str();
    sa->add_option("-n,--points", sa_n)->capture_default_str();
    sa->add_option("--region", sa_region, "r_lo,r_hi,s_lo,s_hi")->capture_default_str();
    sa->add_option("--out", sa_out, "file name inside --out-dir")->capture_default_str();

    // ball
    auto* ba = app.add_subcommand("ball", "graph-distance ball around a sampled point, written as a metric space");
    std::string ba_metric = "flat", ba_region = "0.5,1.5,0.5,2.64", ba_center = "1,1.5707963267948966",
                ba_out = "ball.space";
    std::size_t ba_n = 4000, ba_k = 12;
    double ba_radius = 0.2;
    bool ba_rescale = false;
    ba->add_option("--metric", ba_metric)->capture_default_str();
    ba->add_option("-n,--points", ba_n)->capture_default_str();
    ba->add_option("--knn", ba_k)->capture_default_str();
    ba->add_option("--region", ba_region, "r_lo,r_hi,s_lo,s_hi")->capture_default_str();
    ba->add_option("--center", ba_center, "r,s of the anchor")->capture_default_str();
    ba->add_option("--radius", ba_radius)->capture_default_str();
    ba->add_flag("--rescale", ba_rescale, "divide distances by the radius");
    ba->add_option("--out", ba_out)->capture_default_str();

    // gh
    auto* gh = app.add_subcommand("gh", "GH bounds between two metric-space files");
    std::string gh_x, gh_y;
    std::size_t gh_net = 0;
    bool gh_exact_flag = false;
    GhOptions gh_opt;
    gh->add_option("x", gh_x)->required();
    gh->add_option("y", gh_y)->required();
    gh->add_option("--net", gh_net, "farthest-point net size (0 = no netting)")->capture_default_str();
    gh->add_option("--restarts", gh_opt.restarts)->capture_default_str();
    gh->add_option("--iters", gh_opt.iters)->capture_default_str();
    gh->add_flag("--exact", gh_exact_flag, "also run the exhaustive solver (small spaces only)");

    // experiment verbs
    std::map<std::string, std::string> heat_kv, cut_kv, hb_kv, hc_kv, re_kv;
    auto* he = app.add_subcommand("heat", "heat-flow check suite on flat-cone samples");
    he->add_option("--eps", heat_kv["eps"], "list of eps values");
    he->add_option("--delta", heat_kv["delta"]);
    he->add_option("--points", heat_kv["slice_points"]);
    he->add_option("--knn", heat_kv["slice_knn"]);
    he->add_option("--corrected", heat_kv["corrected"], "true or false");
    he->add_option("--cone-points", heat_kv["cone_points"]);
    auto* cl = app.add_subcommand("cutlocus", "effective cutlocus decay on the flat slice");
    cl->add_option("--r-sweep", cut_kv["radii"], "lo:hi:count or a list");
    cl->add_option("--eps", cut_kv["eps"]);
    cl->add_option("--delta", cut_kv["delta"]);
    cl->add_option("--points", cut_kv["points"]);
    auto* hb = app.add_subcommand("holder-balls", "GH distance between balls along the singular ray");
    hb->add_option("--radius", hb_kv["radius"]);
    hb->add_option("--offsets", hb_kv["offsets"]);
    hb->add_option("--base", hb_kv["base"]);
    hb->add_option("--samples", hb_kv["samples"]);
    hb->add_option("--net", hb_kv["net"]);
    hb->add_option("--control", hb_kv["control"], "true: also run the constant-fiber control");
    auto* hc = app.add_subcommand("holder-cones", "GH distance between tangent cones of the second example");
    hc->add_option("--delta", hc_kv["delta"]);
    hc->add_option("--offsets", hc_kv["offsets"]);
    hc->add_option("--fiber-samples", hc_kv["fiber_samples"]);
    hc->add_option("--net", hc_kv["net"]);
    hc->add_option("--control", hc_kv["control"]);
    auto* re = app.add_subcommand("reifenberg", "small balls against Euclidean balls");
    re->add_option("--metric", re_kv["metric"], "flat or exampleA");
    re->add_option("--exact", re_kv["exact"], "true: flat embedding distances");
    re->add_option("--radii", re_kv["radii"]);
    re->add_option("--r-anchor", re_kv["r_anchor"]);
    re->add_option("--s-anchor", re_kv["s_anchor"]);

    // run and search
    auto* ru = app.add_subcommand("run", "run a configuration file and write the artifact bundle");
    std::string ru_config;
    bool ru_canonical = false;
    ru->add_option("config", ru_config, "configuration file");
    ru->add_flag("--canonical", ru_canonical, "use the built-in canonical configuration");
    auto* sr = app.add_subcommand("search-a", "constant grid search for the first example");
    std::string sr_a1 = "0.002,0.003,0.005", sr_b1 = "0.15,0.2,0.3,0.4", sr_s0 = "0.05,0.08,0.1,0.12";
    sr->add_option("--a1", sr_a1)->capture_default_str();
    sr->add_option("--b1", sr_b1)->capture_default_str();
    sr->add_option("--s0", sr_s0)->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    set_jobs(g.jobs);

    try {
        if (*ex) {
            auto m = load_metric(ex_metric);
            Json out{{"metric", m.name}, {"constants", m.constants}};
            if (m.name == "A") {
                auto k = constants_A_from([&] {
                    KeyValues kv;
                    for (auto& [key, v] : m.constants.items()) kv[key] = v.get<std::string>();
                    return kv;
                }());
                auto R = verify_positivity_conditions(m.W, k, certification_grid_A(k, ex_grid));
                out["min_ricci"] = R.min_ricci.value;
                out["conditions_pass"] = R.all_pass();
            } else if (m.name == "B") {
                auto k = constants_B_from([&] {
                    KeyValues kv;
                    for (auto& [key, v] : m.constants.items()) kv[key] = v.get<std::string>();
                    return kv;
                }());
                auto R = verify_positivity_conditions(m.W, k, certification_grid_B(k, ex_grid));
                out["min_ricci"] = R.min_ricci.value;
                out["conditions_pass"] = R.all_pass();
            }
            std::cout << out.dump(2) << "\n";
        } else if (*cu) {
            auto m = load_metric(cu_metric);
            auto ev = ricci_eigenvalues(m.W, cu_r, cu_s);
            auto C = ricci_closed_form(m.W, cu_r, cu_s);
            Mat5 O = ricci_oracle(m.W, {cu_r, cu_s, {}});
            Json o{{"metric", m.name}, {"r", cu_r}, {"s", cu_s}, {"eigenvalues", ev},
                   {"closed_form", {C.rr, C.ss, C.jj[0], C.jj[1], C.jj[2]}},
                   {"oracle_diagonal", {O(0, 0), O(1, 1), O(2, 2), O(3, 3), O(4, 4)}},
                   {"oracle_offdiagonal_max", (O - Mat5(O.diagonal().asDiagonal())).cwiseAbs().maxCoeff()}};
            std::cout << o.dump(2) << "\n";
        } else if (*sa) {
            auto m = load_metric(sa_metric);
            auto r = numbers(sa_region);
            if (r.size() != 4) throw std::runtime_error("--region needs four numbers");
            auto c = sample_cloud(m.W, {r[0], r[1], r[2], r[3]}, sa_n, static_cast<std::uint64_t>(g.seed));
            Table t{{"sample of metric " + m.name + ", seed " + std::to_string(g.seed)},
                    {"r", "s", "xi_w", "xi_x", "xi_y", "xi_z"}};
            for (auto& p : c.points) t.rows.push_back({p.r, p.s, p.xi.w, p.xi.x, p.xi.y, p.xi.z});
            std::filesystem::create_directories(g.out_dir);
            auto path = (std::filesystem::path(g.out_dir) / sa_out).string();
            write_text(path, to_csv(t));
            std::cout << path << "\n";
        } else if (*ba) {
            auto m = load_metric(ba_metric);
            auto r = numbers(ba_region);
            auto cen = numbers(ba_center);
            if (r.size() != 4 || cen.size() != 2) throw std::runtime_error("--region needs 4 numbers, --center 2");
            auto c = sample_cloud(m.W, {r[0], r[1], r[2], r[3]}, ba_n, static_cast<std::uint64_t>(g.seed),
                                  {CloudPoint{cen[0], cen[1], {}}});
            auto graph = build_graph(m.W, c, ba_k);
            auto d = dijkstra(graph, 0);
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < d.size(); ++i)
                if (d[i] <= ba_radius) idx.push_back(i);
            auto X = graph_subspace(graph, idx);
            if (ba_rescale)
                for (auto& v : X.D) v /= ba_radius;
            X.provenance = "ball of metric " + m.name + " radius " + format_number(ba_radius) + " seed " +
                           std::to_string(g.seed) + (ba_rescale ? " rescaled" : "");
            std::filesystem::create_directories(g.out_dir);
            auto path = (std::filesystem::path(g.out_dir) / ba_out).string();
            std::ofstream f(path);
            write_space(f, X);
            std::cout << path << " (" << X.n << " points)\n";
        } else if (*gh) {
            auto X = read_space_file(gh_x), Y = read_space_file(gh_y);
            gh_opt.seed = static_cast<std::uint64_t>(g.seed);
            auto b = gh_net ? gh_netted(X, Y, gh_net, gh_opt) : gh_upper(X, Y, gh_opt);
            Json o{{"nx", X.n}, {"ny", Y.n}, {"lower", b.lower}, {"upper", b.upper}};
            if (gh_exact_flag) o["exact"] = gh_exact(X, Y);
            std::cout << o.dump(2) << "\n";
        } else if (*he) {
            run_kind(g, "heat", heat_kv);
        } else if (*cl) {
            run_kind(g, "cutlocus", cut_kv);
        } else if (*hb) {
            run_kind(g, "holder_balls", hb_kv);
        } else if (*hc) {
            run_kind(g, "holder_cones", hc_kv);
        } else if (*re) {
            run_kind(g, "reifenberg", re_kv);
        } else if (*ru) {
            if (ru_config.empty() == !ru_canonical) throw std::runtime_error("give a config file or --canonical");
            auto cfg = ru_canonical ? parse_config(canonical_config()) : load_config(ru_config);
            if (!cfg.global.has("seed") && app.get_option("--seed")->count()) {
                cfg.global.entries.emplace_back("seed", std::to_string(g.seed));
                cfg.global.line_of["seed"] = 0;
            }
            auto B = run_config(cfg, g.out_dir, [](const std::string& n) { std::cerr << "running " << n << "\n"; });
            std::cout << (std::filesystem::path(g.out_dir) / "manifest.json").string() << "\n";
        } else if (*sr) {
            auto rows = grid_search_A(canonical_A(), numbers(sr_a1), numbers(sr_b1), numbers(sr_s0));
            Table t{{"grid search over (a1, b1, s0) for the first example"},
                    {"a1", "b1", "s0", "a2", "b2", "conditions_pass", "min_ricci", "score", "score_angular",
                     "control_min"}};
            for (auto& r : rows)
                t.rows.push_back({r.k.a1, r.k.b1, r.k.s0, r.k.a2, r.k.b2, double(r.conditions_pass), r.min_ricci,
                                  r.score, r.score_angular, r.control_min});
            std::cout << to_csv(t);
            if (auto* b = best_row(rows))
                std::cout << "# best a1=" << b->k.a1 << " b1=" << b->k.b1 << " s0=" << b->k.s0 << "\n";
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

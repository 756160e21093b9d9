// Runs the canonical bundle twice and prints one PASS/FAIL line per acceptance criterion.
// Exit status is nonzero only when the suite itself cannot run; failing criteria are
// reported on stdout.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "lab/experiments.hpp"

using namespace lab;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Timed {
    BundleResult bundle;
    std::map<std::string, double> seconds;
};

Timed run_timed(const std::string& dir) {
    Timed T;
    std::string current;
    auto start = Clock::now();
    auto mark = [&](const std::string& next) {
        auto now = Clock::now();
        if (!current.empty()) T.seconds[current] = std::chrono::duration<double>(now - start).count();
        current = next;
        start = now;
    };
    fs::remove_all(dir);
    T.bundle = run_config(parse_config(canonical_config()), dir, [&](const std::string& name) {
        mark(name);
        std::fprintf(stderr, "  running %s\n", name.c_str());
    });
    mark("");
    return T;
}

const Json& summary(const BundleResult& B, const std::string& name) {
    for (auto& e : B.experiments)
        if (e.name == name) return e.summary;
    throw std::runtime_error("bundle lacks experiment " + name);
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int passed = 0, total = 0;

void report(int id, const std::string& title, bool ok, double seconds, double budget, const std::string& detail) {
    bool in_time = budget <= 0 || seconds <= budget;
    ok = ok && in_time;
    ++total;
    passed += ok;
    std::printf("[%s] %2d %-26s %7.1fs", ok ? "PASS" : "FAIL", id, title.c_str(), seconds);
    if (budget > 0) std::printf(" (budget %.0fs)", budget);
    std::printf("  %s\n", detail.c_str());
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

}  // namespace

int main() {
    try {
        auto base = fs::temp_directory_path() / "lab_acceptance";
        std::fprintf(stderr, "first run\n");
        auto A = run_timed((base / "a").string());
        auto& B = A.bundle;
        auto t = [&](const std::string& n) { return A.seconds.at(n); };

        {
            auto& s = summary(B, "curvature");
            double rel = s["max_relative_error"], flat = s["flat_max_abs"];
            report(1, "curvature oracle", rel <= 1e-5 && flat <= 1e-8, t("curvature"), 120,
                   fmt("rel %.2e (<=1e-5), flat %.2e (<=1e-8)", rel, flat));
        }
        {
            auto& s = summary(B, "positivity");
            double a = s["example_A"]["min_ricci"], b = s["example_B"]["min_ricci"], c = s["control"]["min_ricci"];
            bool ok = a >= -1e-8 && b >= -1e-8 && c < 0 && s["example_A"]["conditions_pass"] == true &&
                      s["example_B"]["conditions_pass"] == true;
            report(2, "positivity certificates", ok, t("positivity"), 60,
                   fmt("min Ric A %.2e, B %.2e, control %.3g", a, b, c));
        }
        {
            auto& s = summary(B, "gh_fuzz");
            long v = s["violations"];
            double ex = s["upper_exact_fraction"];
            report(3, "GH sandwich", v == 0 && ex >= 0.9, t("gh_fuzz"), 60,
                   fmt("violations %.0f, upper exact %.3f (>=0.9)", double(v), ex));
        }
        {
            auto& s = summary(B, "holder_cones");
            double a = s["fit"]["slope"];
            bool ctl = s["control"]["below_floor"] == true;
            report(4, "cone Holder exponent", a >= 0.5 && a <= 0.7 && ctl, t("holder_cones"), 600,
                   fmt("slope %.3f [%.3f, %.3f], control max %.3g", a, s["fit"]["ci_lo"].get<double>(),
                       s["fit"]["ci_hi"].get<double>(), s["control"]["max_signal"].get<double>()) +
                       fmt(" vs floor %.3g", s["control"]["noise_floor"].get<double>()));
        }
        {
            auto& s = summary(B, "holder_balls");
            double a = s["fit"]["slope"], C = s["constant"];
            bool mono = s["monotone"] == true;
            report(5, "ball Holder continuity", a > 0.2 && mono && std::isfinite(C), t("holder_balls"), 600,
                   fmt("slope %.3f (>0.2), C %.3g, monotone %.0f", a, C, mono));
        }
        {
            auto& s = summary(B, "excess");
            double a = s["fit"]["slope"];
            report(6, "excess exponent", a >= 1.7, t("excess"), 180,
                   fmt("slope %.3f (>=1.7) [%.3f, %.3f]", a, s["fit"]["ci_lo"].get<double>(),
                       s["fit"]["ci_hi"].get<double>()));
        }
        {
            auto& s = summary(B, "heat");
            double st = s["stochasticity_error"], sg = s["semigroup_error"];
            auto& p = s["parabolic"];
            double me = p["min_e"], cd = p["c_dev"], cl = p["c_lip"];
            double slope = s["harnack"]["mass_slope"], ref = s["harnack"]["reference_slope"];
            bool parts = st <= 1e-9 && sg <= 1e-8 && me >= -1e-9 && std::isfinite(cd) && std::isfinite(cl) &&
                         s["max_principle"]["holds"] == true;
            bool ok = parts && std::abs(slope - 1) <= 0.2;
            report(7, "heat suite", ok, t("heat"), 300,
                   fmt("stoch %.1e, semigroup %.1e, C_dev %.3g, C_lip %.3g", st, sg, cd, cl) +
                       fmt(", mass slope %.3f (1+-0.2; continuum %.3f), C_mv %.3g", slope, ref,
                           s["harnack"]["c_mean_value"].get<double>()));
        }
        {
            auto& s = summary(B, "jacobi");
            double fe = s["flat_ratio_error"], c = s["exampleA_envelope_c"], sp = s["hessian_scaling_spread"];
            report(8, "Jacobi and Hessian", fe <= 0.01 && c <= 10 && sp <= 3, t("jacobi"), 180,
                   fmt("flat ratio err %.1e, envelope c %.3f (<=10), 1/delta spread %.3f (<=3)", fe, c, sp));
        }
        {
            auto& s = summary(B, "cutlocus");
            double a = s["slope"];
            long viol = s["inclusion_violations"];
            bool mono = s["monotone_in_r"] == true;
            double join = s["midpoint"]["max_join_excess"], mean_imb = s["midpoint"]["mean_imbalance"],
                   max_imb = s["midpoint"]["max_imbalance"];
            bool ok = a >= 0.8 && a <= 1.2 && viol == 0 && mono && join <= 0.02 && mean_imb <= 0.02;
            report(9, "cutlocus decay", ok, t("cutlocus"), 180,
                   fmt("slope %.3f, inclusion violations %.0f, midpoint join %.2e, imbalance mean %.3f", a, double(viol),
                       join, mean_imb) +
                       fmt(" max %.3f", max_imb));
        }
        {
            std::fprintf(stderr, "second run\n");
            auto start = Clock::now();
            auto R = run_timed((base / "b").string());
            double secs = std::chrono::duration<double>(Clock::now() - start).count();
            bool same = R.bundle.files.size() == B.files.size();
            std::size_t differing = 0;
            for (std::size_t i = 0; same && i < B.files.size(); ++i) {
                bool eq = fs::path(B.files[i]).filename() == fs::path(R.bundle.files[i]).filename() &&
                          slurp(B.files[i]) == slurp(R.bundle.files[i]);
                differing += !eq;
            }
            same = same && differing == 0;
            report(10, "determinism", same, secs, 0,
                   fmt("%.0f files, %.0f differ", double(B.files.size()), double(differing)));
        }
        std::printf("%d/%d criteria passed\n", passed, total);
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance: %s\n", e.what());
        return 1;
    }
}

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lab/experiments.hpp"

using namespace lab;

namespace {

int error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line;
    }
    return -1;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config sections, comments and typed values") {
    auto c = parse_config("seed = 7  # global\n\n[experiment.one]\nkind = gh_fuzz\nlist = 1, 2,3\nsweep = 0.01:1:3\n"
                          "flag = true\nname = \"quoted\"\n[experiment.two]\n");
    CHECK(c.global.integer("seed", 0) == 7);
    REQUIRE(c.experiments.size() == 2);
    auto& e = c.experiments[0];
    CHECK(e.name == "one");
    CHECK(e.text("kind", "") == "gh_fuzz");
    CHECK(e.numbers("list", {}) == std::vector<double>{1, 2, 3});
    auto sw = e.numbers("sweep", {});
    REQUIRE(sw.size() == 3);
    CHECK(sw[1] == doctest::Approx(0.1));
    CHECK(e.flag("flag", false));
    CHECK(e.text("name", "") == "quoted");
    CHECK(e.line_of.at("list") == 5);
    CHECK(c.experiments[1].entries.empty());
}

TEST_CASE("config errors carry line numbers") {
    CHECK(error_line("a = 1\nnot a pair\n") == 2);
    CHECK(error_line("[experiment.x]\na = 1\na = 2\n") == 3);
    CHECK(error_line("[section]\n") == 1);
    CHECK(error_line("[experiment.x]\n[experiment.x]\n") == 2);
    CHECK(error_line("[experiment.x\n") == 1);
    auto c = parse_config("\n[experiment.x]\nbogus = 1\n");
    try {
        c.experiments[0].require_keys({"kind"});
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(e.line == 3);
    }
    auto d = parse_config("[experiment.y]\nn = abc\n");
    CHECK_THROWS_AS(d.experiments[0].number("n", 0), ConfigError);
    auto k = parse_config("[experiment.z]\nkind = nonsense\n");
    try {
        run_experiment(k.experiments[0], 1);
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
    }
    auto u = parse_config("[experiment.gh_fuzz]\ntrials = 2\nunknown = 1\n");
    try {
        run_experiment(u.experiments[0], 1);
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("number lists") {
    CHECK(parse_number_list("0.5") == std::vector<double>{0.5});
    auto v = parse_number_list("0.02:0.2:8");
    REQUIRE(v.size() == 8);
    CHECK(v.front() == doctest::Approx(0.02));
    CHECK(v.back() == doctest::Approx(0.2));
    CHECK_THROWS(parse_number_list("1:0.5:3"));
    CHECK_THROWS(parse_number_list("1,x"));
}

TEST_CASE("FNV-1a reference values") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("CSV layout") {
    Table t{{"first", "second"}, {"x", "y"}, {{1.0, 0.1}, {2.5, -3.0}}};
    CHECK(to_csv(t) == "# first\n# second\nx,y\n1,0.10000000000000001\n2.5,-3\n");
    CHECK(format_number(1.0 / 3) == "0.33333333333333331");
}

TEST_CASE("SVG plot is well formed") {
    PlotSpec p{"title <x>", "x", "y", true, true};
    Series s{"data", {0.1, 1, 10}, {1, 10, 100}, {0.5, 5, 50}, {2, 20, 200}};
    auto svg = svg_plot(p, {s});
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("title &lt;x&gt;") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK_NOTHROW(svg_plot(p, {}));
}

TEST_CASE("empty experiment list writes only the manifest") {
    auto dir = (std::filesystem::temp_directory_path() / "lab_empty_bundle").string();
    std::filesystem::remove_all(dir);
    auto B = run_config(parse_config("seed = 3\n"), dir);
    CHECK(B.files.size() == 1);
    CHECK(B.manifest["experiments"].empty());
    CHECK(B.manifest["seed"] == 3);
    CHECK(std::filesystem::exists(dir + "/manifest.json"));
}

TEST_CASE("bundles are byte-identical across runs") {
    const std::string cfg = "seed = 4\n[experiment.small]\nkind = gh_fuzz\ntrials = 30\nmax_points = 4\n"
                            "[experiment.cut]\nkind = cutlocus\npoints = 800\nmax_pairs = 200\nmonotone_pairs = 20\n"
                            "midpoint_pairs = 10\n";
    auto base = std::filesystem::temp_directory_path();
    auto a = (base / "lab_det_a").string(), b = (base / "lab_det_b").string();
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
    auto A = run_config(parse_config(cfg), a);
    auto Bn = run_config(parse_config(cfg), b);
    REQUIRE(A.files.size() == Bn.files.size());
    for (std::size_t i = 0; i < A.files.size(); ++i) {
        CHECK(std::filesystem::path(A.files[i]).filename() == std::filesystem::path(Bn.files[i]).filename());
        CHECK(slurp(A.files[i]) == slurp(Bn.files[i]));
    }
    CHECK(A.manifest["experiments"][0]["summary"]["violations"] == 0);
    CHECK(std::filesystem::exists(a + "/small.csv"));
    CHECK(std::filesystem::exists(a + "/cut.csv"));
}

TEST_CASE("canonical configuration parses and names known kinds") {
    auto c = parse_config(canonical_config());
    CHECK(c.experiments.size() >= 9);
    auto kinds = experiment_kinds();
    for (auto& e : c.experiments) CHECK(std::find(kinds.begin(), kinds.end(), e.text("kind", e.name)) != kinds.end());
}

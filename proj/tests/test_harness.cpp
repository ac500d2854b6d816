#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "osgood/harness.hpp"

using namespace osgood;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("osgood-harness-" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config: typed overrides and unknown keys") {
    auto cfg = find_preset("lemma-lp").defaults;
    cfg.set_from_string("pmax", "64");
    CHECK(cfg.getd("pmax") == 64.0);
    cfg.set_from_string("nmax", "2");
    CHECK(cfg.geti("nmax") == 2);
    CHECK_THROWS_AS(cfg.set_from_string("pmxa", "64"), ConfigError);
    CHECK_THROWS_AS(cfg.set_from_string("nmax", "2.5"), ConfigError);
    CHECK_THROWS_AS(cfg.set_from_string("nmax", "many"), ConfigError);
    CHECK_THROWS_AS(cfg.geti("pmax"), ConfigError);
    CHECK_THROWS_AS(cfg.gets("pmax"), ConfigError);
}

TEST_CASE("config: file form") {
    auto dir = fresh_dir("cfgfile");
    {
        std::ofstream out(dir / "run.cfg");
        out << "# comment\n"
            << "pmax = 32   # inline comment\n"
            << "nmax=2\n\n";
    }
    auto cfg = find_preset("lemma-lp").defaults;
    cfg.apply_file(dir / "run.cfg");
    CHECK(cfg.getd("pmax") == 32.0);
    CHECK(cfg.geti("nmax") == 2);
    {
        std::ofstream out(dir / "bad.cfg");
        out << "pmax 32\n";
    }
    CHECK_THROWS_AS(cfg.apply_file(dir / "bad.cfg"), ConfigError);
}

TEST_CASE("preset registry") {
    CHECK(presets().size() == 12);
    for (const auto& p : presets()) {
        CHECK(!p.claim.empty());
        CHECK(&find_preset(p.name) == &p);
    }
    CHECK_THROWS_AS(find_preset("no-such-preset"), ConfigError);
}

TEST_CASE("lemma-lp preset: runs, passes, emits outputs deterministically") {
    auto cfg = find_preset("lemma-lp").defaults;
    cfg.set_from_string("pmax", "64");
    auto dir_a = fresh_dir("lemma-a");
    auto dir_b = fresh_dir("lemma-b");
    auto man_a = run_preset(cfg, dir_a);
    auto man_b = run_preset(cfg, dir_b);
    CHECK(man_a.all_pass());
    CHECK(fs::exists(dir_a / "lemma.csv"));
    CHECK(fs::exists(dir_a / "manifest.json"));
    CHECK(fs::exists(dir_a / "config.txt"));
    CHECK(slurp(dir_a / "lemma.csv") == slurp(dir_b / "lemma.csv"));
    CHECK(man_a.hash == man_b.hash);

    auto reread = RunManifest::from_json(
        nlohmann::json::parse(std::ifstream(dir_a / "manifest.json")));
    CHECK(reread.preset == "lemma-lp");
    CHECK(reread.all_pass());
    CHECK(reread.metrics.at("ratio_min") == man_a.metrics.at("ratio_min"));
}

TEST_CASE("osgood-certificate preset passes at reduced size") {
    auto cfg = find_preset("osgood-certificate").defaults;
    cfg.set_from_string("pairs", "20");
    auto man = run_preset(cfg, fresh_dir("cert"));
    CHECK(man.all_pass());
    CHECK(man.metrics.at("stable_ratio_error") < 1e-6);
    CHECK(man.metrics.at("min_bracket_slack") >= 0.0);
}

TEST_CASE("interp preset passes at reduced size") {
    auto cfg = find_preset("interp").defaults;
    cfg.set_from_string("trials", "100");
    auto man = run_preset(cfg, fresh_dir("interp"));
    CHECK(man.all_pass());
    CHECK(man.metrics.at("violations") == 0.0);
}

TEST_CASE("euler-steady preset runs at reduced size") {
    auto cfg = find_preset("euler-steady").defaults;
    cfg.set_from_string("n", "128");
    cfg.set_from_string("n_control", "64");
    cfg.set_from_string("T", "0.3");
    cfg.set_from_string("drift_tol", "0.05");
    auto dir = fresh_dir("steady");
    auto man = run_preset(cfg, dir);
    CHECK(man.all_pass());
    CHECK(fs::exists(dir / "norms.csv"));
    CHECK(fs::exists(dir / "vorticity_final.bin"));
    auto field = read_field(dir / "vorticity_final");
    CHECK(field.grid().n == 128);
    CHECK(field.max_abs() > 0.1);
}

TEST_CASE("compare_runs") {
    auto cfg = find_preset("osgood-certificate").defaults;
    cfg.set_from_string("pairs", "10");
    auto man_a = run_preset(cfg, fresh_dir("cmp-a"));
    auto man_b = run_preset(cfg, fresh_dir("cmp-b"));
    for (const auto& d : compare_runs(man_a, man_b)) CHECK(d.rel == 0.0);

    cfg.set_from_string("seed", "999");
    auto man_c = run_preset(cfg, fresh_dir("cmp-c"));
    CHECK(man_c.all_pass());
    CHECK(!compare_runs(man_a, man_c).empty());

    auto interp_cfg = find_preset("interp").defaults;
    interp_cfg.set_from_string("trials", "10");
    auto other = run_preset(interp_cfg, fresh_dir("cmp-d"));
    CHECK_THROWS_AS(compare_runs(man_a, other), ConfigError);
}

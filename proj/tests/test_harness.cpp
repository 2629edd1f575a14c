#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "asind/harness.hpp"
#include "asind/io.hpp"

using namespace asind;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("asind_harness_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

ExperimentConfig small_config(const fs::path& out) {
    ExperimentConfig cfg;
    cfg.dynamics.model = Model::sis;
    cfg.network.kind = NetworkKind::erdos_renyi;
    cfg.network.n = 6;
    cfg.train_steps = 200;
    cfg.horizon = 50;
    cfg.seeds = {0};
    cfg.method = "asind";
    cfg.asind.outer_max_iters = 60;
    cfg.output_dir = out.string();
    return cfg;
}

} // namespace

TEST_CASE("config parser applies values and rejects unknown keys") {
    ExperimentConfig cfg = parse_experiment_config(R"({
        "dynamics": {"model": "lotka-volterra", "gamma": 0.15},
        "network": {"kind": "watts-strogatz", "n": 10, "ws_k": 4},
        "method": "sindy",
        "sindy": {"threshold": 0.2},
        "train_steps": 123,
        "dt": 0.02,
        "seeds": [5, 6]
    })");
    CHECK(cfg.dynamics.model == Model::lotka_volterra);
    CHECK(cfg.dynamics.gamma == 0.15);
    CHECK(cfg.network.kind == NetworkKind::watts_strogatz);
    CHECK(cfg.sindy.threshold == 0.2);
    CHECK(cfg.train_steps == 123);
    CHECK(cfg.seeds.size() == 2);

    CHECK_THROWS_AS(parse_experiment_config(R"({"trainsteps": 10})"), ParseError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"dynamics": {"modle": "sis"}})"), ParseError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"dt": "fast"})"), ParseError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"dt": 0.01,)"), ParseError);
}

TEST_CASE("config file diagnostics carry the parse context") {
    TempDir dir;
    fs::path file = dir.path / "bad.json";
    std::ofstream(file) << "{\n  \"dt\": 0.01,\n  \"oops\n}";
    try {
        load_experiment_config(file);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("parse failure") != std::string::npos);
    }
}

TEST_CASE("spec builder applies overrides on top of the stock values") {
    DynamicsOverrides overrides;
    overrides.model = Model::sis;
    overrides.delta = 0.7;
    DynamicsSpec spec = build_spec(overrides, 5, 3);
    CHECK(spec.delta[4] == 0.7);
    CHECK(spec.gamma[0] > 0.0);  // stock value kept

    overrides.model = Model::kuramoto;
    overrides.omega_min = 0.5;
    overrides.omega_max = 0.6;
    DynamicsSpec kur = build_spec(overrides, 8, 3);
    CHECK(kur.omega.minCoeff() >= 0.5);
    CHECK(kur.omega.maxCoeff() <= 0.6);
}

TEST_CASE("run_experiment emits rows and deterministic artifacts") {
    TempDir dir;
    ExperimentConfig cfg = small_config(dir.path / "run");
    std::vector<RunResult> rows = run_experiment(cfg);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].method == "asind");
    CHECK(!rows[0].failed);
    CHECK(rows[0].metrics.rmse < 0.05);

    fs::path out = dir.path / "run";
    CHECK(fs::exists(out / "results.csv"));
    CHECK(fs::exists(out / "table.txt"));
    CHECK(fs::exists(out / "sis_erdos-renyi_seed0.traj.csv"));
    CHECK(fs::exists(out / "sis_erdos-renyi_seed0_asind.model.json"));
    CHECK(fs::exists(out / "sis_erdos-renyi_seed0_asind.eqs.txt"));
    CHECK(fs::exists(out / "sis_erdos-renyi_seed0_asind.steperr.csv"));

    // byte-identical on a second run (wall time stays out of results.csv rows
    // only in reproduce-tables; compare the distilled columns instead)
    std::string first = slurp(out / "sis_erdos-renyi_seed0_asind.metrics.json");
    fs::remove_all(out);
    run_experiment(cfg);
    CHECK(slurp(out / "sis_erdos-renyi_seed0_asind.metrics.json") == first);
}

TEST_CASE("missing output parent fails before any computation") {
    TempDir dir;
    ExperimentConfig cfg = small_config(dir.path / "no" / "such" / "parent");
    CHECK_THROWS(run_experiment(cfg));
}

TEST_CASE("single-cell grid matches run_experiment") {
    TempDir dir;
    ExperimentConfig cfg = small_config(dir.path / "grid");
    std::vector<RunResult> direct = run_experiment([&] {
        ExperimentConfig c = cfg;
        c.output_dir = (dir.path / "direct").string();
        return c;
    }());
    std::vector<RunResult> grid = run_grid(cfg, {"sis"}, {"erdos-renyi"}, {"asind"}, 1);
    REQUIRE(grid.size() == direct.size());
    CHECK(grid[0].metrics.rmse == direct[0].metrics.rmse);
    CHECK(grid[0].metrics.jaccard == direct[0].metrics.jaccard);
}

TEST_CASE("grid rejects unknown names with the valid list") {
    TempDir dir;
    ExperimentConfig cfg = small_config(dir.path / "g2");
    try {
        run_grid(cfg, {"sir"}, {"erdos-renyi"}, {"asind"}, 1);
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("kuramoto") != std::string::npos);
    }
    CHECK_THROWS_AS(run_grid(cfg, {}, {"erdos-renyi"}, {"asind"}, 1), std::invalid_argument);
    CHECK_THROWS_AS(run_grid(cfg, {"sis"}, {"erdos-renyi"}, {"ols"}, 1), std::invalid_argument);
}

TEST_CASE("results csv honours the wall-time switch") {
    TempDir dir;
    std::vector<RunResult> rows(1);
    rows[0].model = "sis";
    rows[0].network = "erdos-renyi";
    rows[0].method = "asind";
    rows[0].metrics.rmse = 0.5;
    rows[0].metrics.mape = 1.0;
    rows[0].metrics.jaccard = 10.0;
    rows[0].wall_time_s = 1.2345;

    write_results_csv(rows, dir.path / "with.csv", true);
    write_results_csv(rows, dir.path / "without.csv", false);
    CHECK(slurp(dir.path / "with.csv").find("wall_time") != std::string::npos);
    CHECK(slurp(dir.path / "without.csv").find("wall_time") == std::string::npos);

    rows[0].metrics.rmse = std::numeric_limits<double>::infinity();
    rows[0].metrics.jaccard = std::numeric_limits<double>::quiet_NaN();
    rows[0].metrics.diverged = true;
    write_results_csv(rows, dir.path / "inf.csv", false);
    std::string text = slurp(dir.path / "inf.csv");
    CHECK(text.find("inf") != std::string::npos);
    CHECK(text.find("nan") != std::string::npos);
}

TEST_CASE("table renderers aggregate per cell") {
    TempDir dir;
    std::vector<RunResult> rows;
    for (std::uint64_t seed = 0; seed < 2; ++seed) {
        RunResult r;
        r.model = "sis";
        r.network = "erdos-renyi";
        r.method = "asind";
        r.seed = seed;
        r.metrics.rmse = 0.1 * (seed + 1);
        r.metrics.mape = 1.0;
        r.metrics.jaccard = 20.0;
        rows.push_back(r);
    }
    write_prediction_table(rows, dir.path / "pred.txt");
    write_jaccard_table(rows, dir.path / "jac.txt");
    std::string pred = slurp(dir.path / "pred.txt");
    CHECK(pred.find("erdos-renyi") != std::string::npos);
    CHECK(pred.find("0.1500") != std::string::npos);  // mean of 0.1 and 0.2
    std::string jac = slurp(dir.path / "jac.txt");
    CHECK(jac.find("20.00%") != std::string::npos);
}

TEST_CASE("output root env var relocates relative directories") {
    TempDir dir;
    setenv("ASIND_OUTPUT_ROOT", dir.path.c_str(), 1);
    fs::path resolved = resolve_output_dir("rel");
    unsetenv("ASIND_OUTPUT_ROOT");
    CHECK(resolved == dir.path / "rel");
    CHECK(resolve_output_dir("/abs/path") == fs::path("/abs/path"));
}

TEST_CASE("loaded external trajectories pass through derivative estimation") {
    TempDir dir;
    // simulate, save, reload: the loaded copy carries no derivatives and the
    // caller estimates them before fitting
    ExperimentConfig cfg = small_config(dir.path / "io");
    DynamicsSpec spec = build_spec(cfg.dynamics, cfg.network.n, 1);
    NetworkConfig net = cfg.network;
    net.seed = 2;
    AdjacencyMatrix a = generate_network(net);
    Trajectory traj = integrate_rk4(spec, a, build_initial_state(cfg.dynamics, spec, 3), 0.01, 150);
    save_trajectory(traj, dir.path / "ext.csv");

    Trajectory loaded = load_trajectory(dir.path / "ext.csv");
    CHECK(loaded.origin == TrajectoryOrigin::estimated);
    CHECK(!loaded.derivatives.has_value());
    Trajectory ready = estimate_derivatives(loaded);
    REQUIRE(ready.derivatives.has_value());
    // estimated derivatives approximate the exact ones
    CHECK(((*ready.derivatives) - (*traj.derivatives)).cwiseAbs().maxCoeff() < 1e-3);
}

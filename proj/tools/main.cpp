#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "asind/harness.hpp"
#include "asind/io.hpp"
#include "asind/rng.hpp"

namespace fs = std::filesystem;
using namespace asind;

namespace {

ExperimentConfig load_or_default(const std::string& config_path) {
    if (config_path.empty()) return ExperimentConfig{};
    return load_experiment_config(config_path);
}

void apply_overrides(ExperimentConfig& cfg, const std::string& method, const std::string& out,
                     int horizon, std::int64_t seed) {
    if (!method.empty()) cfg.method = method;
    if (!out.empty()) cfg.output_dir = out;
    if (horizon > 0) cfg.horizon = horizon;
    if (seed >= 0) cfg.seeds = {static_cast<std::uint64_t>(seed)};
}

int print_metrics_line(const RunResult& row) {
    std::cout << row.model << "/" << row.network << "/" << row.method << " seed " << row.seed
              << ": rmse=" << format_double(row.metrics.rmse)
              << " mape=" << format_double(row.metrics.mape)
              << " jaccard=" << format_double(row.metrics.jaccard)
              << (row.metrics.diverged ? " [diverged]" : "") << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"identify network dynamics from trajectories, with simulation and baselines"};
    app.require_subcommand(1);

    std::string config_path, out_override, method_override, model_path, traj_path, pred_path,
        truth_path, network_path;
    int horizon_override = 0;
    std::int64_t seed_override = -1;
    int steps = 100;
    int threads = 1;
    double dt_override = 0.0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config file (JSON)");
        cmd->add_option("--out", out_override, "output directory override");
        cmd->add_option("--seed", seed_override, "single seed override");
        cmd->add_option("--horizon", horizon_override, "prediction horizon override");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "generate a network and integrate a trajectory");
    add_common(simulate);

    CLI::App* fit_cmd = app.add_subcommand("fit", "fit a model to a trajectory");
    add_common(fit_cmd);
    fit_cmd->add_option("--method", method_override, "asind | sindy | both");
    fit_cmd->add_option("--traj", traj_path, "trajectory CSV to fit instead of simulating");

    CLI::App* predict_cmd = app.add_subcommand("predict", "roll out a fitted model");
    predict_cmd->add_option("--model", model_path, "model JSON file")->required();
    predict_cmd->add_option("--start", traj_path, "trajectory CSV; rollout starts at its last row")
        ->required();
    predict_cmd->add_option("--steps", steps, "rollout steps");
    predict_cmd->add_option("--dt", dt_override, "time step (defaults to the trajectory's)");
    predict_cmd->add_option("--out", out_override, "output CSV path");

    CLI::App* eval_cmd = app.add_subcommand("eval", "compare a prediction against a truth trajectory");
    eval_cmd->add_option("--pred", pred_path, "prediction CSV")->required();
    eval_cmd->add_option("--truth", truth_path, "ground-truth CSV")->required();
    eval_cmd->add_option("--model", model_path, "fitted model JSON (for network recovery)");
    eval_cmd->add_option("--network", network_path, "ground-truth network CSV (for network recovery)");

    CLI::App* grid = app.add_subcommand("grid", "run a cross product of models x networks x methods");
    add_common(grid);
    grid->add_option("--method", method_override, "asind | sindy | both");
    grid->add_option("--threads", threads, "worker pool size");

    CLI::App* tables = app.add_subcommand("reproduce-tables", "run the full model/network grid");
    add_common(tables);
    tables->add_option("--threads", threads, "worker pool size");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            ExperimentConfig cfg = load_or_default(config_path);
            apply_overrides(cfg, "", out_override, horizon_override, seed_override);
            fs::path out = resolve_output_dir(cfg.output_dir);
            fs::create_directories(out);
            for (std::uint64_t seed : cfg.seeds) {
                NetworkConfig net_cfg = cfg.network;
                net_cfg.seed = mix_seed(seed, 101);
                AdjacencyMatrix a = generate_network(net_cfg);
                DynamicsSpec spec = build_spec(cfg.dynamics, cfg.network.n, mix_seed(seed, 202));
                Eigen::VectorXd x0 = build_initial_state(cfg.dynamics, spec, mix_seed(seed, 303));
                Trajectory traj =
                    integrate_rk4(spec, a, x0, cfg.dt, cfg.train_steps - 1 + cfg.horizon);
                std::string prefix =
                    to_string(spec.model) + "_" + to_string(cfg.network.kind) + "_seed" + std::to_string(seed);
                TrajectoryMeta meta{to_string(spec.model), dynamics_parameters_json(spec), seed,
                                    cfg.dt};
                save_trajectory(traj, out / (prefix + ".traj.csv"), meta);
                save_adjacency_csv(a, out / (prefix + ".network.csv"));
                save_edge_list(a, out / (prefix + ".edges.txt"));
                std::cout << "wrote " << (out / (prefix + ".traj.csv")).string() << "\n";
            }
            return 0;
        }

        if (fit_cmd->parsed()) {
            ExperimentConfig cfg = load_or_default(config_path);
            apply_overrides(cfg, method_override, out_override, horizon_override, seed_override);
            if (!traj_path.empty()) {
                Trajectory traj = load_trajectory(traj_path);
                traj = estimate_derivatives(traj);
                fs::path out = resolve_output_dir(cfg.output_dir);
                fs::create_directories(out);
                BasisLibrary lib = build_library(cfg);
                if (cfg.method == "asind" || cfg.method == "both") {
                    auto [model, state] = fit(traj, lib, cfg.asind);
                    save_model(model, cfg.asind, state, out / "model_asind.json");
                    save_equations(model, out / "model_asind.eqs.txt");
                    std::cout << "wrote " << (out / "model_asind.json").string() << "\n";
                }
                if (cfg.method == "sindy" || cfg.method == "both") {
                    SindyModel model = fit_sindy(traj, cfg.sindy);
                    save_sindy_model(model, out / "model_sindy.json");
                    std::cout << "wrote " << (out / "model_sindy.json").string() << "\n";
                }
                return 0;
            }
            std::vector<RunResult> rows = run_experiment(cfg);
            for (const auto& row : rows) print_metrics_line(row);
            return 0;
        }

        if (predict_cmd->parsed()) {
            Trajectory start = load_trajectory(traj_path);
            double dt = dt_override > 0.0 ? dt_override : start.dt;
            Eigen::VectorXd x0 = start.states.row(start.samples() - 1);
            Trajectory pred;
            std::string method = peek_model_method(model_path);
            if (method == "asind") {
                IdentifiedModel model = load_model(model_path);
                pred = predict(model, x0, dt, steps);
            } else if (method == "sindy") {
                SindyModel model = load_sindy_model(model_path);
                pred = predict_sindy(model, x0, dt, steps);
            } else {
                throw std::runtime_error("model file has unknown method '" + method + "'");
            }
            fs::path out = out_override.empty() ? fs::path("prediction.csv") : fs::path(out_override);
            save_trajectory(pred, out);
            std::cout << "wrote " << out.string() << "\n";
            return 0;
        }

        if (eval_cmd->parsed()) {
            Trajectory pred = load_trajectory(pred_path);
            Trajectory truth = load_trajectory(truth_path);
            std::cout << "rmse=" << format_double(rmse(pred, truth))
                      << " mape=" << format_double(mape(pred, truth));
            if (!model_path.empty() && !network_path.empty()) {
                IdentifiedModel model = load_model(model_path);
                AdjacencyMatrix truth_a = load_adjacency_csv(network_path);
                std::cout << " jaccard=" << format_double(jaccard(truth_a, model.a_hat, 1e-3));
            }
            std::cout << "\n";
            return 0;
        }

        if (grid->parsed()) {
            ExperimentConfig cfg = load_or_default(config_path);
            apply_overrides(cfg, method_override, out_override, horizon_override, seed_override);
            std::vector<std::string> models = cfg.grid_models;
            std::vector<std::string> networks = cfg.grid_networks;
            std::vector<std::string> methods = cfg.grid_methods;
            if (models.empty()) models = {to_string(cfg.dynamics.model)};
            if (networks.empty()) networks = {to_string(cfg.network.kind)};
            if (methods.empty()) methods = {cfg.method};
            std::vector<RunResult> rows = run_grid(cfg, models, networks, methods, threads);
            fs::path out = resolve_output_dir(cfg.output_dir);
            write_results_csv(rows, out / "combined.csv", true);
            write_prediction_table(rows, out / "prediction_table.txt");
            write_jaccard_table(rows, out / "jaccard_table.txt");
            for (const auto& row : rows) print_metrics_line(row);
            return 0;
        }

        if (tables->parsed()) {
            ExperimentConfig cfg = load_or_default(config_path);
            apply_overrides(cfg, "", "", horizon_override, seed_override);
            fs::path out = resolve_output_dir(out_override.empty() ? cfg.output_dir : out_override);
            std::vector<RunResult> rows = reproduce_tables(cfg, out, threads);
            for (const auto& row : rows) print_metrics_line(row);
            std::cout << "tables written under " << out.string() << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

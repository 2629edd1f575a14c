#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "asind/dynamics.hpp"
#include "asind/metrics.hpp"
#include "asind/netgen.hpp"
#include "asind/sindy.hpp"
#include "asind/solver.hpp"

namespace asind {

// Scalar parameter overrides applied on top of the stock per-model values.
struct DynamicsOverrides {
    Model model = Model::sis;
    std::optional<double> c, h, delta, gamma, alpha, theta;
    std::optional<double> omega_min, omega_max;
    std::optional<double> x0_min, x0_max;
};

struct ExperimentConfig {
    DynamicsOverrides dynamics;
    NetworkConfig network;
    std::string method = "both";  // asind | sindy | both
    AsindConfig asind;
    SindyConfig sindy;
    std::vector<std::string> basis_self;  // empty -> default library
    std::vector<std::string> basis_pair;
    int train_steps = 500;  // training samples
    int horizon = 100;      // held-out prediction steps
    double dt = 0.01;
    std::vector<std::uint64_t> seeds = {0, 1, 2};
    bool force_estimated_derivatives = false;
    std::string output_dir = "out";

    // grid subcommand cross-product lists; empty lists fall back to the
    // single configured model / network / method
    std::vector<std::string> grid_models;
    std::vector<std::string> grid_networks;
    std::vector<std::string> grid_methods;

    void validate() const;
};

// Strict parse: unknown keys are hard errors, malformed values name the key.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(const std::string& json_text);

DynamicsSpec build_spec(const DynamicsOverrides& overrides, int n, std::uint64_t param_seed);
Eigen::VectorXd build_initial_state(const DynamicsOverrides& overrides, const DynamicsSpec& spec,
                                    std::uint64_t seed);
BasisLibrary build_library(const ExperimentConfig& cfg);

// JSON object text with the model's parameter values, for sidecar metadata.
std::string dynamics_parameters_json(const DynamicsSpec& spec);

struct RunResult {
    std::string model;
    std::string network;
    std::string method;
    std::uint64_t seed = 0;
    MetricsReport metrics;
    double wall_time_s = 0.0;
    bool failed = false;  // infrastructure failure (distinct from rollout divergence)
    std::string error;
};

// Deterministic per-seed inputs of one run: the ground-truth network, the
// dynamics parameters, and the initial state.
struct RunInputs {
    AdjacencyMatrix network;
    DynamicsSpec spec;
    Eigen::VectorXd x0;
};
RunInputs prepare_run(const ExperimentConfig& cfg, std::uint64_t seed);

// One cell of the experiment grid: per seed, generate the network, simulate,
// fit the selected method(s), evaluate the held-out prediction, and write
// trajectory/model/metrics artifacts under output_dir.
std::vector<RunResult> run_experiment(const ExperimentConfig& cfg);

// Cross product over models x networks x methods; failures are isolated per
// cell. Rows come back in deterministic declaration order.
std::vector<RunResult> run_grid(const ExperimentConfig& base, const std::vector<std::string>& models,
                                const std::vector<std::string>& networks,
                                const std::vector<std::string>& methods, int threads = 1);

void write_results_csv(const std::vector<RunResult>& rows, const std::filesystem::path& path,
                       bool include_wall_time);
void write_prediction_table(const std::vector<RunResult>& rows, const std::filesystem::path& path);
void write_jaccard_table(const std::vector<RunResult>& rows, const std::filesystem::path& path);

// Full grid (4 models x 3 networks x both methods) with deterministic
// outputs: results.csv, prediction_table.txt, jaccard_table.txt.
std::vector<RunResult> reproduce_tables(ExperimentConfig base, const std::filesystem::path& out_dir,
                                        int threads = 1);

// Resolves a relative output directory under $ASIND_OUTPUT_ROOT when set.
std::filesystem::path resolve_output_dir(const std::string& dir);

} // namespace asind

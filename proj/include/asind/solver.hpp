#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "asind/basis.hpp"
#include "asind/types.hpp"

namespace asind {

struct AsindConfig {
    double penalty = 1000.0;          // augmented-Lagrangian penalty rho
    double multiplier_step = 1000.0;  // multiplier ascent step alpha (= rho)
    int outer_max_iters = 200;
    double outer_tol = 1e-6;        // max-norm change in (w, A) between outer iterations
    int init_sweeps = 10;           // coefficient/multiplier sweeps at the dense
                                    // graph before structure selection starts
    double qp_tol = 1e-8;
    int qp_max_iters = 50000;
    double threshold_w = 1e-3;
    double threshold_a = 1e-3;
    bool refit_on_support = true;
    std::string qp_trace_dir;  // when set, per-iteration QP objectives land here as CSV

    void validate() const;
};

// Sparse coefficients plus the estimated interaction network; directly
// evaluable as an ODE right-hand side.
struct IdentifiedModel {
    Eigen::MatrixXd w;  // N x (M1+M2)
    AdjacencyMatrix a_hat;
    BasisLibrary library;

    int n() const { return static_cast<int>(w.rows()); }
    Eigen::VectorXd rhs(const Eigen::VectorXd& x) const;
};

// Augmented-Lagrangian values around one outer iteration, multiplier fixed.
struct LagrangianRecord {
    double before_a = 0.0;
    double after_a = 0.0;
    double after_w = 0.0;
};

struct SolverState {
    Eigen::MatrixXd lambda;  // N x T, one multiplier per node per sample
    int iteration = 0;
    std::vector<LagrangianRecord> lagrangian_history;
    std::vector<double> residual_history;  // max_i ||r_i||_2 after each iteration
    std::vector<std::string> warnings;
};

// Full augmented Lagrangian: L1 terms plus multiplier and penalty terms over
// the per-node residuals.
double augmented_lagrangian(const BasisTables& tables, const Eigen::MatrixXd& w,
                            const AdjacencyMatrix& a, const Eigen::MatrixXd& lambda, double rho);

// One nonnegative-QP sweep over adjacency rows, coefficients fixed.
AdjacencyMatrix a_step(const Trajectory& traj, const BasisLibrary& lib, const Eigen::MatrixXd& w,
                       SolverState& state, const AsindConfig& cfg,
                       const AdjacencyMatrix* warm = nullptr);
AdjacencyMatrix a_step(const BasisTables& tables, const Eigen::MatrixXd& w, SolverState& state,
                       const AsindConfig& cfg, const AdjacencyMatrix* warm = nullptr);

// One coefficient sweep via the split into nonnegative halves, network fixed.
Eigen::MatrixXd w_step(const Trajectory& traj, const BasisLibrary& lib, const AdjacencyMatrix& a_hat,
                       SolverState& state, const AsindConfig& cfg,
                       const Eigen::MatrixXd* warm = nullptr);
Eigen::MatrixXd w_step(const BasisTables& tables, const AdjacencyMatrix& a_hat, SolverState& state,
                       const AsindConfig& cfg, const Eigen::MatrixXd* warm = nullptr);

// Multiplier ascent along the fit residuals; appends to residual_history.
SolverState& lambda_step(const Trajectory& traj, const BasisLibrary& lib, const IdentifiedModel& model,
                         SolverState& state, const AsindConfig& cfg);
SolverState& lambda_step(const BasisTables& tables, const IdentifiedModel& model, SolverState& state,
                         const AsindConfig& cfg);

// Alternating loop: adjacency step, coefficient step, multiplier ascent,
// until the primal block stops moving; then threshold and refit. The run is
// fully deterministic; the seed is carried into metadata only.
std::pair<IdentifiedModel, SolverState> fit(const Trajectory& traj, const BasisLibrary& lib,
                                            const AsindConfig& cfg, std::uint64_t seed = 0);

// Hard-threshold small entries, rescale each adjacency row to unit maximum
// (the scale split between pair coefficients and weights is arbitrary), and
// re-solve least squares on the surviving support.
IdentifiedModel threshold_and_refit(const IdentifiedModel& model, const Trajectory& traj,
                                    const BasisLibrary& lib, const AsindConfig& cfg);

// RK4 rollout of the identified right-hand side.
Trajectory predict(const IdentifiedModel& model, const Eigen::VectorXd& x0, double dt, int steps);

} // namespace asind

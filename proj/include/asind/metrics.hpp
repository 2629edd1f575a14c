#pragma once

#include <optional>
#include <vector>

#include "asind/dynamics.hpp"
#include "asind/sindy.hpp"
#include "asind/solver.hpp"
#include "asind/types.hpp"

namespace asind {

struct MetricsReport {
    double rmse = 0.0;     // infinite when the rollout diverged
    double mape = 0.0;     // percentage
    double jaccard = 0.0;  // percentage; NaN when no network estimate exists
    int horizon = 0;
    bool diverged = false;
    std::vector<double> per_step_errors;  // per-step rmse over nodes
};

// Flat root-mean-square error over all samples and nodes.
double rmse(const Trajectory& pred, const Trajectory& truth);
double rmse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth);

// Mean absolute percentage error; denominators are floored at eps.
double mape(const Trajectory& pred, const Trajectory& truth, double eps = 1e-8);
double mape(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth, double eps = 1e-8);

// Intersection over union of the binarized off-diagonal supports, as a
// percentage. Two empty networks count as identical.
double jaccard(const AdjacencyMatrix& a, const AdjacencyMatrix& a_hat, double tol);

// Roll out both the identified model and the ground truth from the split
// state; compare the horizon new samples.
MetricsReport evaluate_run(const IdentifiedModel& model, const DynamicsSpec& truth_spec,
                           const AdjacencyMatrix& truth_a, const Eigen::VectorXd& x_split, double dt,
                           int horizon, double jaccard_tol, double mape_eps = 1e-8);

MetricsReport evaluate_sindy_run(const SindyModel& model, const DynamicsSpec& truth_spec,
                                 const AdjacencyMatrix& truth_a, const Eigen::VectorXd& x_split,
                                 double dt, int horizon, double mape_eps = 1e-8);

} // namespace asind

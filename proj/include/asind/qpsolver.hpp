#pragma once

#include <vector>

#include "asind/basis.hpp"
#include "asind/types.hpp"

namespace asind {

// minimize  c'z + lambda'(y - Bz) + (rho/2) ||y - Bz||^2   over z >= 0
struct QpProblem {
    DesignMatrix design;          // B = entries, y = target
    Eigen::VectorXd multiplier;   // lambda, length T
    double penalty = 1.0;         // rho > 0
    Eigen::VectorXd linear_cost;  // c >= 0, length cols

    void validate() const;
};

struct QpSolution {
    Eigen::VectorXd z;
    double kkt_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct QpOptions {
    double tol = 1e-8;
    int max_iters = 50000;
    const Eigen::VectorXd* warm_start = nullptr;
    std::vector<double>* objective_trace = nullptr;  // per-iteration objective when set
};

// Projected gradient with fixed step 1/L (L from power iteration on the
// Hessian), accelerated with momentum that restarts whenever it would
// overshoot, so the iterate objective never increases.
QpSolution solve_nn_qp(const QpProblem& p, double tol = 1e-8, int max_iters = 50000);
QpSolution solve_nn_qp(const QpProblem& p, const QpOptions& opts);

// Componentwise optimality gap ||min(z, grad(z))||_inf; zero exactly at the
// global optimum of the convex problem.
double kkt_residual(const QpProblem& p, const Eigen::VectorXd& z);

double qp_objective(const QpProblem& p, const Eigen::VectorXd& z);

} // namespace asind

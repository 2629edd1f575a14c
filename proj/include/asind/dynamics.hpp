#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "asind/rng.hpp"
#include "asind/types.hpp"

namespace asind {

enum class Model { kuramoto, sis, lotka_volterra, michaelis_menten };

Model model_from_string(const std::string& s);
std::string to_string(Model m);

// Per-node and global parameters for the four built-in models. Unused fields
// are simply ignored by the model that does not read them.
struct DynamicsSpec {
    Model model = Model::sis;
    int n = 0;
    Eigen::VectorXd omega;  // kuramoto natural frequencies
    Eigen::VectorXd delta;  // sis recovery rates
    Eigen::VectorXd gamma;  // sis infection / lv competition coefficients
    Eigen::VectorXd alpha;  // lv growth
    Eigen::VectorXd theta;  // lv self-limitation
    double c = 1.0;         // kuramoto coupling
    double h = 2.0;         // hill coefficient

    void validate() const;
};

// Spec with the stock parameter values; kuramoto draws omega_i ~ U(0.5, 1.5).
DynamicsSpec make_default_spec(Model model, int n, std::uint64_t param_seed);

// Stock initial-state ranges: kuramoto U[0, 2pi), sis U(0.1, 0.9),
// lv/mm U(0.5, 1.5).
Eigen::VectorXd draw_initial_state(const DynamicsSpec& spec, std::uint64_t seed);

double eval_self(const DynamicsSpec& spec, int i, double x_i);
double eval_pair(const DynamicsSpec& spec, int i, int j, double x_i, double x_j);

// Coupled right-hand side: self term plus adjacency-weighted pair terms.
Eigen::VectorXd rhs(const DynamicsSpec& spec, const AdjacencyMatrix& a, const Eigen::VectorXd& x);

// Classic fixed-step RK4. Returns steps+1 samples, exact derivatives at each.
Trajectory integrate_rk4(const DynamicsSpec& spec, const AdjacencyMatrix& a,
                         const Eigen::VectorXd& x0, double dt, int steps);

// Same integrator over an arbitrary right-hand side; identified-model
// rollouts go through this so ground truth and model share the arithmetic.
Trajectory integrate_rk4_fn(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x0, double dt, int steps);

// Central differences inside, second-order one-sided at the ends.
Trajectory estimate_derivatives(const Trajectory& traj);

} // namespace asind

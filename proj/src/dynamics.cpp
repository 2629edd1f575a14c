#include "asind/dynamics.hpp"

#include <cmath>

namespace asind {

Model model_from_string(const std::string& s) {
    if (s == "kuramoto") return Model::kuramoto;
    if (s == "sis") return Model::sis;
    if (s == "lotka-volterra" || s == "lv") return Model::lotka_volterra;
    if (s == "michaelis-menten" || s == "mm") return Model::michaelis_menten;
    throw std::invalid_argument("unknown dynamics model '" + s +
                                "' (valid: kuramoto, sis, lotka-volterra, michaelis-menten)");
}

std::string to_string(Model m) {
    switch (m) {
        case Model::kuramoto: return "kuramoto";
        case Model::sis: return "sis";
        case Model::lotka_volterra: return "lotka-volterra";
        case Model::michaelis_menten: return "michaelis-menten";
    }
    return "?";
}

void DynamicsSpec::validate() const {
    if (n < 1) throw std::invalid_argument("node count must be >= 1");
    auto need = [&](const Eigen::VectorXd& v, const char* name) {
        if (v.size() != n) throw std::invalid_argument(std::string(name) + " must have one entry per node");
    };
    switch (model) {
        case Model::kuramoto:
            need(omega, "omega");
            if (c <= 0.0) throw std::invalid_argument("coupling coefficient must be positive");
            break;
        case Model::sis:
            need(delta, "delta");
            need(gamma, "gamma");
            if ((delta.array() <= 0.0).any()) throw std::invalid_argument("recovery rates must be positive");
            if ((gamma.array() < 0.0).any()) throw std::invalid_argument("infection rates must be nonnegative");
            break;
        case Model::lotka_volterra:
            need(alpha, "alpha");
            need(theta, "theta");
            need(gamma, "gamma");
            if ((alpha.array() <= 0.0).any() || (theta.array() <= 0.0).any())
                throw std::invalid_argument("growth parameters must be positive");
            break;
        case Model::michaelis_menten:
            if (h < 1.0) throw std::invalid_argument("hill coefficient must be >= 1");
            break;
    }
}

DynamicsSpec make_default_spec(Model model, int n, std::uint64_t param_seed) {
    DynamicsSpec spec;
    spec.model = model;
    spec.n = n;
    switch (model) {
        case Model::kuramoto: {
            // positive frequencies keep phases away from zero crossings,
            // which percentage errors cannot tolerate
            Rng rng(mix_seed(param_seed, 0x0A));
            spec.omega = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < n; ++i) spec.omega[i] = rng.uniform(0.5, 1.5);
            spec.c = 1.0;
            break;
        }
        case Model::sis:
            spec.delta = Eigen::VectorXd::Constant(n, 0.5);
            spec.gamma = Eigen::VectorXd::Constant(n, 0.2);
            break;
        case Model::lotka_volterra:
            spec.alpha = Eigen::VectorXd::Constant(n, 1.0);
            spec.theta = Eigen::VectorXd::Constant(n, 1.0);
            spec.gamma = Eigen::VectorXd::Constant(n, 0.1);
            break;
        case Model::michaelis_menten:
            spec.h = 2.0;
            break;
    }
    spec.validate();
    return spec;
}

Eigen::VectorXd draw_initial_state(const DynamicsSpec& spec, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x10));
    Eigen::VectorXd x0(spec.n);
    double lo = 0.5, hi = 1.5;
    if (spec.model == Model::kuramoto) {
        lo = 0.0;
        hi = 6.283185307179586;
    } else if (spec.model == Model::sis) {
        lo = 0.1;
        hi = 0.9;
    }
    for (int i = 0; i < spec.n; ++i) x0[i] = rng.uniform(lo, hi);
    return x0;
}

double eval_self(const DynamicsSpec& spec, int i, double x_i) {
    switch (spec.model) {
        case Model::kuramoto: return spec.omega[i];
        case Model::sis: return -spec.delta[i] * x_i;
        case Model::lotka_volterra: return x_i * (spec.alpha[i] - spec.theta[i] * x_i);
        case Model::michaelis_menten: return -x_i;
    }
    return 0.0;
}

double eval_pair(const DynamicsSpec& spec, int i, int /*j*/, double x_i, double x_j) {
    switch (spec.model) {
        case Model::kuramoto: return spec.c / spec.n * std::sin(x_j - x_i);
        case Model::sis: return spec.gamma[i] * (1.0 - x_i) * x_j;
        case Model::lotka_volterra: return -spec.gamma[i] * x_i * x_j;
        case Model::michaelis_menten: {
            double p = std::pow(x_j, spec.h);
            return p / (1.0 + p);
        }
    }
    return 0.0;
}

Eigen::VectorXd rhs(const DynamicsSpec& spec, const AdjacencyMatrix& a, const Eigen::VectorXd& x) {
    if (x.size() != a.n())
        throw ShapeError("state dimension does not match network size");
    Eigen::VectorXd dx(x.size());
    for (int i = 0; i < x.size(); ++i) {
        double acc = eval_self(spec, i, x[i]);
        for (int j = 0; j < x.size(); ++j) {
            double w = a.weights(i, j);
            if (w != 0.0) acc += w * eval_pair(spec, i, j, x[i], x[j]);
        }
        dx[i] = acc;
    }
    return dx;
}

Trajectory integrate_rk4_fn(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x0, double dt, int steps) {
    if (dt <= 0.0) throw std::invalid_argument("time step must be positive");
    if (steps < 1) throw std::invalid_argument("step count must be >= 1");
    if (!x0.allFinite()) throw std::invalid_argument("initial state must be finite");

    int n = static_cast<int>(x0.size());
    Trajectory traj;
    traj.dt = dt;
    traj.origin = TrajectoryOrigin::simulated_exact;
    traj.states.resize(steps + 1, n);
    Eigen::MatrixXd derivs(steps + 1, n);

    Eigen::VectorXd x = x0;
    traj.states.row(0) = x.transpose();
    for (int s = 0; s < steps; ++s) {
        Eigen::VectorXd k1 = f(x);
        derivs.row(s) = k1.transpose();
        Eigen::VectorXd k2 = f(x + 0.5 * dt * k1);
        Eigen::VectorXd k3 = f(x + 0.5 * dt * k2);
        Eigen::VectorXd k4 = f(x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e150)
            throw DivergenceError("integration diverged at step " + std::to_string(s + 1), s + 1);
        traj.states.row(s + 1) = x.transpose();
    }
    derivs.row(steps) = f(x).transpose();
    traj.derivatives = std::move(derivs);
    return traj;
}

Trajectory integrate_rk4(const DynamicsSpec& spec, const AdjacencyMatrix& a,
                         const Eigen::VectorXd& x0, double dt, int steps) {
    if (x0.size() != a.n()) throw ShapeError("initial state dimension does not match network size");
    return integrate_rk4_fn([&](const Eigen::VectorXd& x) { return rhs(spec, a, x); }, x0, dt, steps);
}

Trajectory estimate_derivatives(const Trajectory& traj) {
    int t_count = traj.samples();
    if (t_count < 3)
        throw InsufficientDataError("derivative estimation needs at least 3 samples");
    int n = traj.nodes();
    double dt = traj.dt;

    Trajectory out = traj;
    Eigen::MatrixXd d(t_count, n);
    const Eigen::MatrixXd& x = traj.states;
    d.row(0) = (-3.0 * x.row(0) + 4.0 * x.row(1) - x.row(2)) / (2.0 * dt);
    for (int t = 1; t < t_count - 1; ++t)
        d.row(t) = (x.row(t + 1) - x.row(t - 1)) / (2.0 * dt);
    d.row(t_count - 1) = (3.0 * x.row(t_count - 1) - 4.0 * x.row(t_count - 2) + x.row(t_count - 3)) / (2.0 * dt);
    out.derivatives = std::move(d);
    out.origin = TrajectoryOrigin::estimated;
    return out;
}

} // namespace asind

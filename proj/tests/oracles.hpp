#pragma once

// Brute-force references shared by the unit and acceptance suites. These stay
// independent of the solver paths they check.

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <vector>

#include "asind/qpsolver.hpp"
#include "asind/rng.hpp"

namespace asind::oracle {

// Global optimum of the nonnegative QP by enumerating all 2^n active sets:
// solve the unconstrained system restricted to each support, keep the best
// feasible candidate.
inline std::optional<Eigen::VectorXd> active_set_enumeration(const QpProblem& p) {
    int n = p.design.cols();
    const Eigen::MatrixXd& b = p.design.entries;
    const Eigen::VectorXd& y = p.design.target;
    Eigen::MatrixXd hessian = p.penalty * (b.transpose() * b);
    Eigen::VectorXd lin = p.linear_cost - b.transpose() * p.multiplier - p.penalty * (b.transpose() * y);

    double best = std::numeric_limits<double>::infinity();
    std::optional<Eigen::VectorXd> best_z;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> support;
        for (int k = 0; k < n; ++k)
            if (mask & (1u << k)) support.push_back(k);
        Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
        if (!support.empty()) {
            Eigen::MatrixXd h_ss(support.size(), support.size());
            Eigen::VectorXd q_s(support.size());
            for (size_t a = 0; a < support.size(); ++a) {
                q_s[a] = lin[support[a]];
                for (size_t c = 0; c < support.size(); ++c)
                    h_ss(a, c) = hessian(support[a], support[c]);
            }
            Eigen::VectorXd s = h_ss.ldlt().solve(-q_s);
            if (!s.allFinite()) continue;
            if ((h_ss * s + q_s).cwiseAbs().maxCoeff() >
                1e-9 * std::max(1.0, q_s.cwiseAbs().maxCoeff()))
                continue;  // singular block
            bool feasible = true;
            for (int k = 0; k < s.size(); ++k)
                if (s[k] < 0.0) feasible = false;
            if (!feasible) continue;
            for (size_t a = 0; a < support.size(); ++a) z[support[a]] = s[a];
        }
        double value = qp_objective(p, z);
        if (value < best) {
            best = value;
            best_z = z;
        }
    }
    return best_z;
}

// Deterministic random instances with occasional zero columns.
inline QpProblem random_qp(Rng& rng, int max_vars = 5) {
    int n = 1 + static_cast<int>(rng.uniform_int(max_vars));
    int t = n + 1 + static_cast<int>(rng.uniform_int(8));
    QpProblem p;
    p.design.entries.resize(t, n);
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < n; ++j) p.design.entries(i, j) = rng.normal();
    if (rng.uniform() < 0.1) p.design.entries.col(rng.uniform_int(n)).setZero();
    p.design.target.resize(t);
    for (int i = 0; i < t; ++i) p.design.target[i] = rng.normal();
    p.multiplier.resize(t);
    for (int i = 0; i < t; ++i) p.multiplier[i] = rng.normal();
    const double penalties[3] = {0.5, 1.0, 10.0};
    p.penalty = penalties[rng.uniform_int(3)];
    p.linear_cost.resize(n);
    for (int j = 0; j < n; ++j) p.linear_cost[j] = rng.uniform(0.0, 2.0);
    return p;
}

} // namespace asind::oracle

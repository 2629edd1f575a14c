#pragma once

#include <string>
#include <vector>

#include "asind/basis.hpp"
#include "asind/types.hpp"

namespace asind {

// Monomials over the stacked node states: constant, linears, then pairwise
// products x_j*x_k with j <= k (squares only when cross terms are off).
struct PolyLibrary {
    int order = 2;
    int n = 0;
    bool interactions = true;  // cross products x_j*x_k, j < k
    bool with_trig = false;    // optional sin/cos single-variable features
    std::vector<std::string> feature_names;

    static PolyLibrary make(int n, int order, bool interactions = true, bool with_trig = false);
    int feature_count() const { return static_cast<int>(feature_names.size()); }
};

struct SindyConfig {
    int order = 2;
    double threshold = 0.05;
    double ridge = 1e-6;
    int max_rounds = 20;
    bool interactions = true;
    bool with_trig = false;
};

struct SindyModel {
    PolyLibrary library;
    Eigen::MatrixXd coeffs;  // feature_count x N

    Eigen::VectorXd rhs(const Eigen::VectorXd& x) const;
};

// Feature matrix over the samples; target is left empty (per-node targets
// are supplied to the regression separately).
DesignMatrix build_poly_features(const Eigen::MatrixXd& states, int order, bool interactions = true,
                                 bool with_trig = false);

Eigen::VectorXd eval_poly_features(const PolyLibrary& lib, const Eigen::VectorXd& x);

// Sequential thresholded least squares: ridge solve, hard-threshold, re-solve
// on the surviving support until it stops changing.
Eigen::MatrixXd stlsq(const DesignMatrix& features, const Eigen::MatrixXd& targets, double threshold,
                      double ridge, int max_rounds);

SindyModel fit_sindy(const Trajectory& traj, const SindyConfig& cfg);
SindyModel fit_sindy(const Trajectory& traj, int order, double threshold, double ridge);

// RK4 rollout of the fitted polynomial system; divergence propagates as
// DivergenceError and is reported as a failed prediction upstream.
Trajectory predict_sindy(const SindyModel& model, const Eigen::VectorXd& x0, double dt, int steps);

} // namespace asind

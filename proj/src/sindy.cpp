#include "asind/sindy.hpp"

#include <cmath>

#include "asind/dynamics.hpp"

namespace asind {

PolyLibrary PolyLibrary::make(int n, int order, bool interactions, bool with_trig) {
    if (order != 1 && order != 2) throw std::invalid_argument("polynomial order must be 1 or 2");
    if (n < 1) throw std::invalid_argument("node count must be >= 1");
    PolyLibrary lib;
    lib.order = order;
    lib.n = n;
    lib.interactions = interactions;
    lib.with_trig = with_trig;
    lib.feature_names.push_back("1");
    for (int j = 0; j < n; ++j) lib.feature_names.push_back("x_" + std::to_string(j));
    if (order >= 2) {
        if (interactions) {
            for (int j = 0; j < n; ++j)
                for (int k = j; k < n; ++k)
                    lib.feature_names.push_back("x_" + std::to_string(j) + "*x_" + std::to_string(k));
        } else {
            for (int j = 0; j < n; ++j)
                lib.feature_names.push_back("x_" + std::to_string(j) + "*x_" + std::to_string(j));
        }
    }
    if (with_trig)
        for (int j = 0; j < n; ++j) {
            lib.feature_names.push_back("sin(x_" + std::to_string(j) + ")");
            lib.feature_names.push_back("cos(x_" + std::to_string(j) + ")");
        }
    return lib;
}

Eigen::VectorXd eval_poly_features(const PolyLibrary& lib, const Eigen::VectorXd& x) {
    if (x.size() != lib.n) throw ShapeError("state dimension does not match feature library");
    Eigen::VectorXd row(lib.feature_count());
    int c = 0;
    row[c++] = 1.0;
    for (int j = 0; j < lib.n; ++j) row[c++] = x[j];
    if (lib.order >= 2) {
        if (lib.interactions) {
            for (int j = 0; j < lib.n; ++j)
                for (int k = j; k < lib.n; ++k) row[c++] = x[j] * x[k];
        } else {
            for (int j = 0; j < lib.n; ++j) row[c++] = x[j] * x[j];
        }
    }
    if (lib.with_trig)
        for (int j = 0; j < lib.n; ++j) {
            row[c++] = std::sin(x[j]);
            row[c++] = std::cos(x[j]);
        }
    return row;
}

DesignMatrix build_poly_features(const Eigen::MatrixXd& states, int order, bool interactions,
                                 bool with_trig) {
    PolyLibrary lib = PolyLibrary::make(static_cast<int>(states.cols()), order, interactions, with_trig);
    DesignMatrix d;
    d.entries.resize(states.rows(), lib.feature_count());
    for (int t = 0; t < states.rows(); ++t)
        d.entries.row(t) = eval_poly_features(lib, states.row(t)).transpose();
    return d;
}

namespace {

Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double ridge) {
    if (ridge > 0.0) {
        Eigen::MatrixXd gram = x.transpose() * x;
        gram.diagonal().array() += ridge;
        return gram.ldlt().solve(x.transpose() * y);
    }
    // least-norm solution for the unregularized, possibly singular system
    return x.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
}

} // namespace

Eigen::MatrixXd stlsq(const DesignMatrix& features, const Eigen::MatrixXd& targets, double threshold,
                      double ridge, int max_rounds) {
    if (threshold < 0.0 || ridge < 0.0) throw std::invalid_argument("threshold and ridge must be >= 0");
    if (targets.rows() != features.rows()) throw ShapeError("targets and features disagree on samples");
    int p = features.cols();
    Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(p, targets.cols());

    for (int col = 0; col < targets.cols(); ++col) {
        std::vector<int> support(p);
        for (int m = 0; m < p; ++m) support[m] = m;
        Eigen::VectorXd beta = ridge_solve(features.entries, targets.col(col), ridge);

        for (int round = 0; round < max_rounds; ++round) {
            std::vector<int> survivors;
            for (int m : support)
                if (std::abs(beta[m]) >= threshold) survivors.push_back(m);
            bool unchanged = survivors.size() == support.size();
            // zero the dropped entries
            Eigen::VectorXd pruned = Eigen::VectorXd::Zero(p);
            for (int m : survivors) pruned[m] = beta[m];
            beta = pruned;
            support = survivors;
            if (unchanged || support.empty()) break;

            Eigen::MatrixXd sub(features.rows(), support.size());
            for (size_t k = 0; k < support.size(); ++k) sub.col(k) = features.entries.col(support[k]);
            Eigen::VectorXd sub_beta = ridge_solve(sub, targets.col(col), ridge);
            beta.setZero();
            for (size_t k = 0; k < support.size(); ++k) beta[support[k]] = sub_beta[k];
        }
        coeffs.col(col) = beta;
    }
    return coeffs;
}

SindyModel fit_sindy(const Trajectory& traj, const SindyConfig& cfg) {
    if (!traj.derivatives)
        throw std::invalid_argument("trajectory has no derivatives; estimate them first");
    SindyModel model;
    model.library = PolyLibrary::make(traj.nodes(), cfg.order, cfg.interactions, cfg.with_trig);
    DesignMatrix features = build_poly_features(traj.states, cfg.order, cfg.interactions, cfg.with_trig);
    model.coeffs = stlsq(features, *traj.derivatives, cfg.threshold, cfg.ridge, cfg.max_rounds);
    return model;
}

SindyModel fit_sindy(const Trajectory& traj, int order, double threshold, double ridge) {
    SindyConfig cfg;
    cfg.order = order;
    cfg.threshold = threshold;
    cfg.ridge = ridge;
    return fit_sindy(traj, cfg);
}

Eigen::VectorXd SindyModel::rhs(const Eigen::VectorXd& x) const {
    return coeffs.transpose() * eval_poly_features(library, x);
}

Trajectory predict_sindy(const SindyModel& model, const Eigen::VectorXd& x0, double dt, int steps) {
    return integrate_rk4_fn([&](const Eigen::VectorXd& x) { return model.rhs(x); }, x0, dt, steps);
}

} // namespace asind

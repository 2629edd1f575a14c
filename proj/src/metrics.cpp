#include "asind/metrics.hpp"

#include <cmath>
#include <limits>

namespace asind {

namespace {

void check_shapes(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth) {
    if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
        throw ShapeError("prediction and truth shapes differ");
}

} // namespace

double rmse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth) {
    check_shapes(pred, truth);
    double mse = (pred - truth).squaredNorm() / static_cast<double>(pred.size());
    return std::sqrt(mse);
}

double rmse(const Trajectory& pred, const Trajectory& truth) { return rmse(pred.states, truth.states); }

double mape(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth, double eps) {
    check_shapes(pred, truth);
    if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
    double acc = 0.0;
    for (int t = 0; t < pred.rows(); ++t)
        for (int j = 0; j < pred.cols(); ++j)
            acc += std::abs(pred(t, j) - truth(t, j)) / std::max(std::abs(truth(t, j)), eps);
    return acc / static_cast<double>(pred.size()) * 100.0;
}

double mape(const Trajectory& pred, const Trajectory& truth, double eps) {
    return mape(pred.states, truth.states, eps);
}

double jaccard(const AdjacencyMatrix& a, const AdjacencyMatrix& a_hat, double tol) {
    if (a.n() != a_hat.n()) throw ShapeError("networks have different sizes");
    int inter = 0, uni = 0;
    for (int i = 0; i < a.n(); ++i)
        for (int j = 0; j < a.n(); ++j) {
            if (i == j) continue;
            bool in_a = a.weights(i, j) > tol;
            bool in_b = a_hat.weights(i, j) > tol;
            if (in_a && in_b) ++inter;
            if (in_a || in_b) ++uni;
        }
    if (uni == 0) return 100.0;
    return 100.0 * static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

MetricsReport compare_rollouts(const std::function<Trajectory()>& predict_fn,
                               const DynamicsSpec& truth_spec, const AdjacencyMatrix& truth_a,
                               const Eigen::VectorXd& x_split, double dt, int horizon, double mape_eps) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    MetricsReport report;
    report.horizon = horizon;

    Trajectory truth = integrate_rk4(truth_spec, truth_a, x_split, dt, horizon);
    Eigen::MatrixXd truth_new = truth.states.bottomRows(horizon);

    Trajectory pred;
    try {
        pred = predict_fn();
    } catch (const DivergenceError&) {
        report.diverged = true;
        report.rmse = std::numeric_limits<double>::infinity();
        report.mape = std::numeric_limits<double>::infinity();
        return report;
    }
    Eigen::MatrixXd pred_new = pred.states.bottomRows(horizon);

    report.rmse = rmse(pred_new, truth_new);
    report.mape = mape(pred_new, truth_new, mape_eps);
    report.per_step_errors.resize(horizon);
    for (int t = 0; t < horizon; ++t) {
        double step_mse = (pred_new.row(t) - truth_new.row(t)).squaredNorm() /
                          static_cast<double>(pred_new.cols());
        report.per_step_errors[t] = std::sqrt(step_mse);
    }
    if (!std::isfinite(report.rmse) || !std::isfinite(report.mape)) {
        report.diverged = true;
        report.rmse = std::numeric_limits<double>::infinity();
        report.mape = std::numeric_limits<double>::infinity();
        report.per_step_errors.clear();
    }
    return report;
}

} // namespace

MetricsReport evaluate_run(const IdentifiedModel& model, const DynamicsSpec& truth_spec,
                           const AdjacencyMatrix& truth_a, const Eigen::VectorXd& x_split, double dt,
                           int horizon, double jaccard_tol, double mape_eps) {
    MetricsReport report = compare_rollouts([&] { return predict(model, x_split, dt, horizon); },
                                            truth_spec, truth_a, x_split, dt, horizon, mape_eps);
    report.jaccard = jaccard(truth_a, model.a_hat, jaccard_tol);
    return report;
}

MetricsReport evaluate_sindy_run(const SindyModel& model, const DynamicsSpec& truth_spec,
                                 const AdjacencyMatrix& truth_a, const Eigen::VectorXd& x_split,
                                 double dt, int horizon, double mape_eps) {
    MetricsReport report = compare_rollouts([&] { return predict_sindy(model, x_split, dt, horizon); },
                                            truth_spec, truth_a, x_split, dt, horizon, mape_eps);
    report.jaccard = std::numeric_limits<double>::quiet_NaN();
    return report;
}

} // namespace asind

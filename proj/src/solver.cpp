#include "asind/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "asind/dynamics.hpp"
#include "asind/qpsolver.hpp"

namespace asind {

void AsindConfig::validate() const {
    if (penalty <= 0.0) throw std::invalid_argument("penalty must be positive");
    if (multiplier_step <= 0.0) throw std::invalid_argument("multiplier step must be positive");
    if (outer_max_iters < 1) throw std::invalid_argument("outer_max_iters must be >= 1");
    if (init_sweeps < 1) throw std::invalid_argument("init_sweeps must be >= 1");
    if (outer_tol < 0.0 || qp_tol <= 0.0) throw std::invalid_argument("tolerances must be positive");
    if (qp_max_iters < 1) throw std::invalid_argument("qp_max_iters must be >= 1");
    if (threshold_w < 0.0 || threshold_a < 0.0) throw std::invalid_argument("thresholds must be >= 0");
}

Eigen::VectorXd IdentifiedModel::rhs(const Eigen::VectorXd& x) const {
    int nodes = n();
    int m1 = library.m1();
    int m2 = library.m2();
    if (x.size() != nodes) throw ShapeError("state dimension does not match model size");
    Eigen::VectorXd dx(nodes);
    for (int i = 0; i < nodes; ++i) {
        double acc = 0.0;
        for (int m = 0; m < m1; ++m) {
            double coef = w(i, m);
            if (coef != 0.0) acc += coef * library.self_bases[m].fn(x[i]);
        }
        for (int m = 0; m < m2; ++m) {
            double coef = w(i, m1 + m);
            if (coef == 0.0) continue;
            double agg = 0.0;
            for (int j = 0; j < nodes; ++j) {
                double weight = a_hat.weights(i, j);
                if (weight != 0.0) agg += weight * library.pair_bases[m].fn(x[i], x[j]);
            }
            acc += coef * agg;
        }
        dx[i] = acc;
    }
    return dx;
}

double augmented_lagrangian(const BasisTables& tables, const Eigen::MatrixXd& w,
                            const AdjacencyMatrix& a, const Eigen::MatrixXd& lambda, double rho) {
    // sparsity terms carry the data-driven scale weights the subproblems use
    double total = 0.0;
    int m1 = tables.m1();
    for (int i = 0; i < tables.nodes(); ++i) {
        Eigen::VectorXd r = tables.node_residual(i, w.row(i), a.weights.row(i));
        for (int m = 0; m < m1; ++m) total += tables.self_scale[i][m] * std::abs(w(i, m));
        for (int m = 0; m < tables.m2(); ++m)
            total += tables.pair_scale[i][m] * std::abs(w(i, m1 + m));
        total += tables.neighbor_scale[i].dot(a.weights.row(i));
        total += lambda.row(i).dot(r);
        total += 0.5 * rho * r.squaredNorm();
    }
    return total;
}

namespace {

QpOptions make_qp_options(const AsindConfig& cfg, const Eigen::VectorXd* warm) {
    QpOptions opts;
    opts.tol = cfg.qp_tol;
    opts.max_iters = cfg.qp_max_iters;
    opts.warm_start = warm;
    return opts;
}

void dump_qp_trace(const AsindConfig& cfg, const char* step, int node,
                   const std::vector<double>& trace) {
    if (cfg.qp_trace_dir.empty()) return;
    static std::atomic<long> counter{0};
    long id = counter.fetch_add(1);
    std::filesystem::create_directories(cfg.qp_trace_dir);
    std::ofstream out(std::filesystem::path(cfg.qp_trace_dir) /
                      (std::string(step) + "_node" + std::to_string(node) + "_" +
                       std::to_string(id) + ".csv"));
    out << "iteration,objective\n";
    for (size_t it = 0; it < trace.size(); ++it) out << it << "," << trace[it] << "\n";
}

void note_nonconvergence(SolverState& state, const char* step, int node, const QpSolution& sol) {
    state.warnings.push_back(std::string(step) + " subproblem for node " + std::to_string(node) +
                             " stopped at kkt residual " + std::to_string(sol.kkt_residual) +
                             " after " + std::to_string(sol.iterations) + " iterations");
}

} // namespace

AdjacencyMatrix a_step(const BasisTables& tables, const Eigen::MatrixXd& w, SolverState& state,
                       const AsindConfig& cfg, const AdjacencyMatrix* warm) {
    int n = tables.nodes();
    AdjacencyMatrix a_new = AdjacencyMatrix::zeros(n);
    if (n == 1) return a_new;  // no off-diagonal variables
    for (int i = 0; i < n; ++i) {
        QpProblem qp;
        qp.design = assemble_a_design(tables, i, w.row(i));
        qp.multiplier = state.lambda.row(i);
        qp.penalty = cfg.penalty;
        qp.linear_cost = tables.neighbor_scale[i];
        Eigen::VectorXd warm_row;
        const Eigen::VectorXd* warm_ptr = nullptr;
        if (warm) {
            warm_row = warm->weights.row(i);
            warm_ptr = &warm_row;
        }
        QpOptions opts = make_qp_options(cfg, warm_ptr);
        std::vector<double> trace;
        if (!cfg.qp_trace_dir.empty()) opts.objective_trace = &trace;
        QpSolution sol = solve_nn_qp(qp, opts);
        dump_qp_trace(cfg, "a_step", i, trace);
        if (!sol.converged) note_nonconvergence(state, "a-step", i, sol);
        a_new.weights.row(i) = sol.z.transpose();
        a_new.weights(i, i) = 0.0;
    }
    return a_new;
}

AdjacencyMatrix a_step(const Trajectory& traj, const BasisLibrary& lib, const Eigen::MatrixXd& w,
                       SolverState& state, const AsindConfig& cfg, const AdjacencyMatrix* warm) {
    return a_step(BasisTables::build(lib, traj), w, state, cfg, warm);
}

Eigen::MatrixXd w_step(const BasisTables& tables, const AdjacencyMatrix& a_hat, SolverState& state,
                       const AsindConfig& cfg, const Eigen::MatrixXd* warm) {
    if ((a_hat.weights.array() < 0.0).any())
        throw std::invalid_argument("adjacency estimate must be nonnegative");
    int n = tables.nodes();
    int k = tables.m1() + tables.m2();
    Eigen::MatrixXd w_new(n, k);
    for (int i = 0; i < n; ++i) {
        DesignMatrix base = assemble_w_design(tables, i, a_hat.weights.row(i));
        QpProblem qp;
        qp.design.entries.resize(base.rows(), 2 * k);
        qp.design.entries.leftCols(k) = base.entries;
        qp.design.entries.rightCols(k) = -base.entries;
        qp.design.target = base.target;
        qp.multiplier = state.lambda.row(i);
        qp.penalty = cfg.penalty;
        Eigen::VectorXd cost(k);
        cost.head(tables.m1()) = tables.self_scale[i];
        cost.tail(tables.m2()) = tables.pair_scale[i];
        qp.linear_cost.resize(2 * k);
        qp.linear_cost.head(k) = cost;
        qp.linear_cost.tail(k) = cost;

        Eigen::VectorXd warm_split;
        const Eigen::VectorXd* warm_ptr = nullptr;
        if (warm) {
            warm_split.resize(2 * k);
            warm_split.head(k) = warm->row(i).cwiseMax(0.0);
            warm_split.tail(k) = (-warm->row(i)).cwiseMax(0.0);
            warm_ptr = &warm_split;
        }
        QpOptions opts = make_qp_options(cfg, warm_ptr);
        std::vector<double> trace;
        if (!cfg.qp_trace_dir.empty()) opts.objective_trace = &trace;
        QpSolution sol = solve_nn_qp(qp, opts);
        dump_qp_trace(cfg, "w_step", i, trace);
        if (!sol.converged) note_nonconvergence(state, "w-step", i, sol);

        // shrinking the shared part of the split never changes w and only lowers cost
        Eigen::VectorXd u = sol.z.head(k);
        Eigen::VectorXd v = sol.z.tail(k);
        for (int m = 0; m < k; ++m) {
            double shared = std::min(u[m], v[m]);
            u[m] -= shared;
            v[m] -= shared;
        }
        w_new.row(i) = (u - v).transpose();
    }
    return w_new;
}

Eigen::MatrixXd w_step(const Trajectory& traj, const BasisLibrary& lib, const AdjacencyMatrix& a_hat,
                       SolverState& state, const AsindConfig& cfg, const Eigen::MatrixXd* warm) {
    return w_step(BasisTables::build(lib, traj), a_hat, state, cfg, warm);
}

SolverState& lambda_step(const BasisTables& tables, const IdentifiedModel& model, SolverState& state,
                         const AsindConfig& cfg) {
    double worst = 0.0;
    for (int i = 0; i < tables.nodes(); ++i) {
        Eigen::VectorXd r = tables.node_residual(i, model.w.row(i), model.a_hat.weights.row(i));
        state.lambda.row(i) += cfg.multiplier_step * r.transpose();
        worst = std::max(worst, r.norm());
    }
    state.residual_history.push_back(worst);
    return state;
}

SolverState& lambda_step(const Trajectory& traj, const BasisLibrary& lib, const IdentifiedModel& model,
                         SolverState& state, const AsindConfig& cfg) {
    return lambda_step(BasisTables::build(lib, traj), model, state, cfg);
}

namespace {

Eigen::VectorXd least_squares_on_support(const Eigen::MatrixXd& b, const Eigen::VectorXd& y,
                                         const std::vector<int>& support) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(b.cols());
    std::vector<int> usable;
    for (int c : support)
        if (b.col(c).cwiseAbs().maxCoeff() > 0.0) usable.push_back(c);
    if (usable.empty()) return full;
    Eigen::MatrixXd sub(b.rows(), usable.size());
    for (size_t k = 0; k < usable.size(); ++k) sub.col(k) = b.col(usable[k]);
    Eigen::VectorXd coef = sub.colPivHouseholderQr().solve(y);
    for (size_t k = 0; k < usable.size(); ++k) full[usable[k]] = coef[k];
    return full;
}

Eigen::VectorXd nonneg_least_squares_on_support(const Eigen::MatrixXd& b, const Eigen::VectorXd& y,
                                                const std::vector<int>& support, double tol) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(b.cols());
    if (support.empty()) return full;
    Eigen::MatrixXd sub(b.rows(), support.size());
    for (size_t k = 0; k < support.size(); ++k) sub.col(k) = b.col(support[k]);
    QpProblem qp;
    qp.design.entries = sub;
    qp.design.target = y;
    qp.multiplier = Eigen::VectorXd::Zero(b.rows());
    qp.penalty = 1.0;
    qp.linear_cost = Eigen::VectorXd::Zero(support.size());
    QpSolution sol = solve_nn_qp(qp, tol, 50000);
    for (size_t k = 0; k < support.size(); ++k) full[support[k]] = sol.z[k];
    return full;
}

// One adjacency-row rescale so the largest weight is 1; the complementary
// scale moves into the pair coefficients.
void normalize_rows(Eigen::MatrixXd& w, AdjacencyMatrix& a, int m1) {
    for (int i = 0; i < a.n(); ++i) {
        double peak = a.weights.row(i).maxCoeff();
        if (peak > 0.0 && peak != 1.0) {
            a.weights.row(i) /= peak;
            w.row(i).tail(w.cols() - m1) *= peak;
        }
    }
}

} // namespace

namespace {

// hard-threshold both blocks, rescale rows to unit peak, prune again in the
// canonical scale, and drop parameters whose partner block died
void apply_thresholds(IdentifiedModel& out, const AsindConfig& cfg) {
    int n = out.n();
    int m1 = out.library.m1();
    int k = out.library.size();
    for (int i = 0; i < n; ++i) {
        for (int m = 0; m < k; ++m)
            if (std::abs(out.w(i, m)) < cfg.threshold_w) out.w(i, m) = 0.0;
        for (int j = 0; j < n; ++j)
            if (out.a_hat.weights(i, j) < cfg.threshold_a) out.a_hat.weights(i, j) = 0.0;
    }
    normalize_rows(out.w, out.a_hat, m1);
    for (int i = 0; i < n; ++i) {
        for (int m = m1; m < k; ++m)
            if (std::abs(out.w(i, m)) < cfg.threshold_w) out.w(i, m) = 0.0;
        bool any_pair = out.w.row(i).tail(k - m1).cwiseAbs().maxCoeff() > 0.0;
        bool any_edge = out.a_hat.weights.row(i).maxCoeff() > 0.0;
        if (!any_pair) out.a_hat.weights.row(i).setZero();
        if (!any_edge) out.w.row(i).tail(k - m1).setZero();
    }
}

namespace {

struct NodeRefit {
    Eigen::VectorXd w;      // length M1+M2
    Eigen::VectorXd a_row;  // length N
};

// alternating least squares for one node on fixed supports
NodeRefit refit_node(const BasisTables& tables, const BasisLibrary& lib, int i,
                     Eigen::VectorXd w, Eigen::VectorXd a_row, const std::vector<int>& w_support,
                     const std::vector<int>& a_support, const AsindConfig& cfg, int rounds) {
    int m1 = lib.m1();
    int k = lib.size();
    for (int round = 0; round < rounds; ++round) {
        DesignMatrix wd = assemble_w_design(tables, i, a_row);
        w = least_squares_on_support(wd.entries, wd.target, w_support);
        if (!a_support.empty()) {
            DesignMatrix ad = assemble_a_design(tables, i, w);
            a_row = nonneg_least_squares_on_support(ad.entries, ad.target, a_support, cfg.qp_tol);
            double peak = a_row.maxCoeff();
            if (peak > 0.0 && peak != 1.0) {
                a_row /= peak;
                w.tail(k - m1) *= peak;
            }
        }
    }
    DesignMatrix wd = assemble_w_design(tables, i, a_row);
    w = least_squares_on_support(wd.entries, wd.target, w_support);
    return {std::move(w), std::move(a_row)};
}

} // namespace

// unregularized alternating least squares on the current supports, followed
// by a backward pass that discards small coefficients whose removal leaves
// the fit residual unchanged (the L1 surrogate tends to leave such crumbs
// parked just above the hard threshold)
void refit_supports(const BasisTables& tables, IdentifiedModel& out, const AsindConfig& cfg) {
    int n = out.n();
    int m1 = out.library.m1();
    int k = out.library.size();
    for (int i = 0; i < n; ++i) {
        std::vector<int> w_support;
        for (int m = 0; m < k; ++m)
            if (out.w(i, m) != 0.0) w_support.push_back(m);
        std::vector<int> a_support;
        for (int j = 0; j < n; ++j)
            if (out.a_hat.weights(i, j) != 0.0) a_support.push_back(j);

        NodeRefit fitted =
            refit_node(tables, out.library, i, out.w.row(i), out.a_hat.weights.row(i), w_support,
                       a_support, cfg, 8);

        auto scale_of = [&](int m) {
            return m < m1 ? tables.self_scale[i][m] : tables.pair_scale[i][m - m1];
        };
        double residual = tables.node_residual(i, fitted.w, fitted.a_row).norm();
        bool removed = true;
        while (removed && w_support.size() > 1) {
            removed = false;
            // smallest contribution first
            std::vector<int> order = w_support;
            std::sort(order.begin(), order.end(), [&](int lhs, int rhs) {
                return std::abs(fitted.w[lhs]) * scale_of(lhs) <
                       std::abs(fitted.w[rhs]) * scale_of(rhs);
            });
            for (int m : order) {
                if (std::abs(fitted.w[m]) * scale_of(m) > 0.05) break;
                std::vector<int> trial_support;
                for (int keep : w_support)
                    if (keep != m) trial_support.push_back(keep);
                NodeRefit trial = refit_node(tables, out.library, i, fitted.w, fitted.a_row,
                                             trial_support, a_support, cfg, 3);
                double trial_residual = tables.node_residual(i, trial.w, trial.a_row).norm();
                if (trial_residual <= residual * (1.0 + 1e-6) + 1e-12) {
                    w_support = std::move(trial_support);
                    fitted = std::move(trial);
                    residual = trial_residual;
                    removed = true;
                    break;
                }
            }
        }
        out.w.row(i) = fitted.w.transpose();
        out.a_hat.weights.row(i) = fitted.a_row.transpose();
    }
}

std::vector<bool> support_mask(const IdentifiedModel& model) {
    std::vector<bool> mask;
    for (int i = 0; i < model.n(); ++i) {
        for (int m = 0; m < model.library.size(); ++m) mask.push_back(model.w(i, m) != 0.0);
        for (int j = 0; j < model.n(); ++j) mask.push_back(model.a_hat.weights(i, j) != 0.0);
    }
    return mask;
}

} // namespace

IdentifiedModel threshold_and_refit_impl(const BasisTables& tables, const IdentifiedModel& model,
                                         const AsindConfig& cfg) {
    IdentifiedModel out = model;
    apply_thresholds(out, cfg);
    if (!cfg.refit_on_support) return out;

    // iterate prune/refit until the support settles, as in sequential
    // thresholded least squares
    std::vector<bool> mask = support_mask(out);
    for (int pass = 0; pass < 12; ++pass) {
        refit_supports(tables, out, cfg);
        apply_thresholds(out, cfg);
        std::vector<bool> next = support_mask(out);
        if (next == mask) break;
        mask = std::move(next);
    }
    return out;
}

IdentifiedModel threshold_and_refit(const IdentifiedModel& model, const Trajectory& traj,
                                    const BasisLibrary& lib, const AsindConfig& cfg) {
    return threshold_and_refit_impl(BasisTables::build(lib, traj), model, cfg);
}

std::pair<IdentifiedModel, SolverState> fit(const Trajectory& traj, const BasisLibrary& lib,
                                            const AsindConfig& cfg, std::uint64_t /*seed*/) {
    cfg.validate();
    lib.validate();
    if (!traj.derivatives)
        throw std::invalid_argument("trajectory has no derivatives; estimate them first");
    BasisTables tables = BasisTables::build(lib, traj);
    int n = tables.nodes();
    int t_count = tables.samples();
    int k = lib.size();
    if (t_count < k)
        throw InsufficientDataError("need at least " + std::to_string(k) + " samples, got " +
                                    std::to_string(t_count));

    SolverState state;
    state.lambda = Eigen::MatrixXd::Zero(n, t_count);

    // A zero start is a stationary point of the alternation (zero pair
    // coefficients produce a zero adjacency design and vice versa), so the
    // loop opens from a complete graph. A few coefficient/multiplier sweeps
    // at the dense graph let w and the multipliers settle before the first
    // adjacency step prunes anything.
    AdjacencyMatrix a(Eigen::MatrixXd::Ones(n, n) - Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, k);

    IdentifiedModel model;
    model.library = lib;
    for (int sweep = 0; sweep < cfg.init_sweeps; ++sweep) {
        w = w_step(tables, a, state, cfg, &w);
        model.w = w;
        model.a_hat = a;
        lambda_step(tables, model, state, cfg);
    }

    // beyond the primal-change tolerance, the loop also exits once the fit
    // residual stops improving: the multipliers keep integrating whatever
    // residual a bilinear stall leaves behind, and that slow drift degrades an
    // already-settled model
    double best_residual = std::numeric_limits<double>::infinity();
    int iterations_since_best = 0;

    for (int iter = 1; iter <= cfg.outer_max_iters; ++iter) {
        LagrangianRecord record;
        record.before_a = augmented_lagrangian(tables, w, a, state.lambda, cfg.penalty);

        AdjacencyMatrix a_next = a_step(tables, w, state, cfg, &a);
        record.after_a = augmented_lagrangian(tables, w, a_next, state.lambda, cfg.penalty);

        Eigen::MatrixXd w_next = w_step(tables, a_next, state, cfg, &w);
        record.after_w = augmented_lagrangian(tables, w_next, a_next, state.lambda, cfg.penalty);
        state.lagrangian_history.push_back(record);

        if (!w_next.allFinite() || !a_next.weights.allFinite())
            throw DivergenceError("alternating loop diverged at iteration " + std::to_string(iter), iter);

        double delta = std::max((w_next - w).cwiseAbs().maxCoeff(),
                                (a_next.weights - a.weights).cwiseAbs().maxCoeff());
        w = w_next;
        a = a_next;
        state.iteration = iter;

        model.w = w;
        model.a_hat = a;
        lambda_step(tables, model, state, cfg);

        if (delta <= cfg.outer_tol) break;
        double residual = state.residual_history.back();
        if (residual < 0.99 * best_residual) {
            best_residual = residual;
            iterations_since_best = 0;
        } else if (++iterations_since_best >= 10) {
            break;
        }
    }

    const auto& resid = state.residual_history;
    if (resid.size() >= 20) {
        double late = 0.0, earlier = 0.0;
        for (size_t s = resid.size() - 10; s < resid.size(); ++s) late += resid[s];
        for (size_t s = resid.size() - 20; s < resid.size() - 10; ++s) earlier += resid[s];
        if (late > 1.1 * earlier + 1e-10)
            state.warnings.push_back("fit residual grew over the final iterations (" +
                                     std::to_string(earlier / 10.0) + " -> " +
                                     std::to_string(late / 10.0) + ")");
    }

    model.w = w;
    model.a_hat = a;
    model = threshold_and_refit_impl(tables, model, cfg);
    return {model, state};
}

Trajectory predict(const IdentifiedModel& model, const Eigen::VectorXd& x0, double dt, int steps) {
    if (!model.w.allFinite() || !model.a_hat.weights.allFinite())
        throw std::invalid_argument("model has non-finite entries");
    return integrate_rk4_fn([&](const Eigen::VectorXd& x) { return model.rhs(x); }, x0, dt, steps);
}

} // namespace asind

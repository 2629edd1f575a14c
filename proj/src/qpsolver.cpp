#include "asind/qpsolver.hpp"

#include <cassert>
#include <limits>
#include <cmath>

namespace asind {

void QpProblem::validate() const {
    if (penalty <= 0.0) throw std::invalid_argument("penalty must be positive");
    if (multiplier.size() != design.rows())
        throw ShapeError("multiplier length must equal the sample count");
    if (linear_cost.size() != design.cols())
        throw ShapeError("linear cost length must equal the variable count");
    if ((linear_cost.array() < 0.0).any())
        throw std::invalid_argument("linear cost must be nonnegative");
}

namespace {

struct QuadraticForm {
    Eigen::MatrixXd hessian;   // rho * B'B
    Eigen::VectorXd grad0;     // c - B'lambda - rho B'y
    double constant = 0.0;     // lambda'y + (rho/2) y'y
    Eigen::Array<bool, Eigen::Dynamic, 1> dead;  // all-zero columns, pinned to 0

    explicit QuadraticForm(const QpProblem& p) {
        const Eigen::MatrixXd& b = p.design.entries;
        const Eigen::VectorXd& y = p.design.target;
        hessian = p.penalty * (b.transpose() * b);
        grad0 = p.linear_cost - b.transpose() * p.multiplier - p.penalty * (b.transpose() * y);
        constant = p.multiplier.dot(y) + 0.5 * p.penalty * y.squaredNorm();
        dead = hessian.diagonal().array() == 0.0;
    }

    double value(const Eigen::VectorXd& z) const {
        return 0.5 * z.dot(hessian * z) + grad0.dot(z) + constant;
    }

    Eigen::VectorXd gradient(const Eigen::VectorXd& z) const { return hessian * z + grad0; }

    double kkt(const Eigen::VectorXd& z) const {
        Eigen::VectorXd g = gradient(z);
        double worst = 0.0;
        for (int k = 0; k < z.size(); ++k) worst = std::max(worst, std::abs(std::min(z[k], g[k])));
        return worst;
    }

    double lipschitz() const {
        // power iteration on the (tiny, PSD) Hessian; the start vector mixes
        // the diagonal with an index ramp because structured problems (the
        // mirrored split design) annihilate symmetric starts exactly
        int n = static_cast<int>(hessian.rows());
        double top_diag = hessian.diagonal().maxCoeff();
        if (top_diag <= 0.0) return 0.0;
        Eigen::VectorXd v(n);
        for (int k = 0; k < n; ++k)
            v[k] = std::sqrt(std::max(0.0, hessian(k, k))) +
                   std::sqrt(top_diag) * (k + 1) / static_cast<double>(3 * n);
        v /= v.norm();
        double lam = 0.0;
        for (int it = 0; it < 200; ++it) {
            Eigen::VectorXd w = hessian * v;
            double norm = w.norm();
            if (norm == 0.0) return it == 0 ? hessian.trace() : lam;  // safe upper bound
            v = w / norm;
            double lam_new = v.dot(hessian * v);
            if (std::abs(lam_new - lam) <= 1e-13 * std::max(1.0, lam_new)) return lam_new;
            lam = lam_new;
        }
        return lam;
    }

    void clamp(Eigen::VectorXd& z) const {
        for (int k = 0; k < z.size(); ++k) z[k] = dead[k] ? 0.0 : std::max(0.0, z[k]);
    }

    // Solve the equality system restricted to the given support; a faint
    // ridge resolves singular blocks (e.g. mirrored split columns).
    Eigen::VectorXd restricted_solve(const std::vector<int>& support) const {
        Eigen::MatrixXd h_ss(support.size(), support.size());
        Eigen::VectorXd q_s(support.size());
        for (size_t a = 0; a < support.size(); ++a) {
            q_s[a] = grad0[support[a]];
            for (size_t b = 0; b < support.size(); ++b) h_ss(a, b) = hessian(support[a], support[b]);
        }
        Eigen::VectorXd s = h_ss.ldlt().solve(-q_s);
        bool usable = s.allFinite() && (h_ss * s + q_s).cwiseAbs().maxCoeff() <=
                                           1e-9 * std::max(1.0, q_s.cwiseAbs().maxCoeff());
        if (!usable) {
            Eigen::MatrixXd damped = h_ss;
            damped.diagonal().array() += 1e-10 * std::max(1.0, h_ss.diagonal().maxCoeff());
            s = damped.ldlt().solve(-q_s);
        }
        return s;
    }

    // Active-set descent seeded by the current iterate, in the classic
    // restricted-solve / boundary-step / admit-worst-violator shape. Every
    // exit passes the global KKT check, so a failed attempt simply returns
    // control to the gradient iteration.
    bool try_polish(Eigen::VectorXd& z, double /*fz*/, double tol) const {
        int n = static_cast<int>(z.size());
        Eigen::VectorXd x = z;
        Eigen::VectorXd g = gradient(x);
        std::vector<bool> on(n, false);
        int active = 0;
        for (int k = 0; k < n; ++k)
            if (!dead[k] && (x[k] > 0.0 || g[k] < 0.0)) {
                on[k] = true;
                ++active;
            }
        if (active == 0) return false;

        for (int round = 0; round < 6 * n + 4; ++round) {
            std::vector<int> support;
            for (int k = 0; k < n; ++k)
                if (on[k]) support.push_back(k);

            Eigen::VectorXd target = Eigen::VectorXd::Zero(n);
            if (!support.empty()) {
                Eigen::VectorXd s = restricted_solve(support);
                if (!s.allFinite()) return false;
                for (size_t a = 0; a < support.size(); ++a) target[support[a]] = s[a];
            }

            bool feasible = true;
            for (int k = 0; k < n; ++k)
                if (target[k] < 0.0) feasible = false;

            if (!feasible) {
                // walk toward the restricted optimum until a coordinate hits
                // the boundary, then retire it from the support
                double alpha = 1.0;
                for (int k = 0; k < n; ++k)
                    if (on[k] && target[k] < x[k])
                        alpha = std::min(alpha, x[k] / (x[k] - target[k]));
                x += alpha * (target - x);
                for (int k = 0; k < n; ++k)
                    if (on[k] && (x[k] <= 0.0 || (target[k] <= 0.0 && x[k] < 1e-14 * (1.0 + x.maxCoeff())))) {
                        x[k] = 0.0;
                        on[k] = false;
                    }
                continue;
            }

            x = target;
            Eigen::VectorXd gx = gradient(x);
            int worst = -1;
            double most_negative = -tol;
            for (int k = 0; k < n; ++k)
                if (!dead[k] && !on[k] && gx[k] < most_negative) {
                    most_negative = gx[k];
                    worst = k;
                }
            if (worst >= 0) {
                on[worst] = true;
                continue;
            }
            if (kkt(x) > tol) return false;
            if (delta_value(z, x) > 0.0) return false;
            z = x;
            return true;
        }
        return false;
    }

    // f(to) - f(from), evaluated through the quadratic expansion around
    // `from`; immune to the cancellation that plagues absolute values when
    // the Hessian is badly scaled.
    double delta_value(const Eigen::VectorXd& from, const Eigen::VectorXd& to) const {
        Eigen::VectorXd d = to - from;
        return gradient(from).dot(d) + 0.5 * d.dot(hessian * d);
    }
};

} // namespace

double qp_objective(const QpProblem& p, const Eigen::VectorXd& z) {
    Eigen::VectorXd r = p.design.target - p.design.entries * z;
    return p.linear_cost.dot(z) + p.multiplier.dot(r) + 0.5 * p.penalty * r.squaredNorm();
}

double kkt_residual(const QpProblem& p, const Eigen::VectorXd& z) {
    return QuadraticForm(p).kkt(z);
}

QpSolution solve_nn_qp(const QpProblem& p, double tol, int max_iters) {
    QpOptions opts;
    opts.tol = tol;
    opts.max_iters = max_iters;
    return solve_nn_qp(p, opts);
}

QpSolution solve_nn_qp(const QpProblem& p, const QpOptions& opts) {
    p.validate();
    QuadraticForm form(p);
    int n = p.design.cols();

    QpSolution sol;
    sol.z = Eigen::VectorXd::Zero(n);
    if (opts.warm_start) {
        if (opts.warm_start->size() != n) throw ShapeError("warm start has wrong length");
        sol.z = *opts.warm_start;
    }
    form.clamp(sol.z);

    double lip = form.lipschitz();
    if (lip == 0.0) {
        // no quadratic part survives: with c >= 0 the origin is optimal
        sol.z.setZero();
        sol.kkt_residual = form.kkt(sol.z);
        sol.converged = sol.kkt_residual <= opts.tol;
        return sol;
    }
    double step = 1.0 / (1.05 * lip);

    // an absolute tolerance below the rounding floor of the gradient is
    // unreachable; clamp it so badly scaled problems terminate
    double gradient_scale = form.hessian.cwiseAbs().maxCoeff() * (1.0 + sol.z.cwiseAbs().maxCoeff()) +
                            form.grad0.cwiseAbs().maxCoeff();
    double tol = std::max(opts.tol, 32.0 * std::numeric_limits<double>::epsilon() * gradient_scale);

    Eigen::VectorXd z = sol.z;
    Eigen::VectorXd extrapolated = z;
    double fz = form.value(z);
    double momentum = 1.0;
    if (opts.objective_trace) opts.objective_trace->push_back(fz);

    for (int it = 1; it <= opts.max_iters; ++it) {
        sol.iterations = it;
        double kkt = form.kkt(z);
        if (kkt <= tol) {
            sol.kkt_residual = kkt;
            sol.converged = true;
            break;
        }

        // periodic direct solve on the active support; usually exact on the
        // first try when warm-started from the previous outer iterate
        if (it <= 2 || it % 25 == 0) {
            if (form.try_polish(z, fz, tol)) {
                sol.kkt_residual = form.kkt(z);
                sol.converged = true;
                if (opts.objective_trace) opts.objective_trace->push_back(form.value(z));
                break;
            }
        }

        Eigen::VectorXd z_next = extrapolated - step * form.gradient(extrapolated);
        form.clamp(z_next);
        double delta = form.delta_value(z, z_next);
        if (delta > 0.0) {
            // momentum overshot: restart from the monotone iterate
            z_next = z - step * form.gradient(z);
            form.clamp(z_next);
            delta = form.delta_value(z, z_next);
            momentum = 1.0;
        }
        assert(delta <= 1e-9 * (1.0 + std::abs(fz)));

        double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        // dead coordinates stay at zero in both iterates, so no clamp here
        extrapolated = z_next + ((momentum - 1.0) / momentum_next) * (z_next - z);
        z = z_next;
        fz += delta;
        momentum = momentum_next;
        if (opts.objective_trace) opts.objective_trace->push_back(fz);

        sol.kkt_residual = kkt;
    }

    sol.z = z;
    if (!sol.converged) sol.kkt_residual = form.kkt(z);
    return sol;
}

} // namespace asind

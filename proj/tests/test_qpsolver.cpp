#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "asind/qpsolver.hpp"
#include "asind/rng.hpp"
#include "oracles.hpp"

using namespace asind;

namespace {

QpProblem simple_problem(const Eigen::MatrixXd& b, const Eigen::VectorXd& y, double rho = 1.0) {
    QpProblem p;
    p.design.entries = b;
    p.design.target = y;
    p.multiplier = Eigen::VectorXd::Zero(b.rows());
    p.penalty = rho;
    p.linear_cost = Eigen::VectorXd::Zero(b.cols());
    return p;
}

} // namespace

TEST_CASE("orthonormal columns, feasible optimum reached exactly") {
    Eigen::MatrixXd b(3, 2);
    b << 1, 0, 0, 1, 0, 0;
    Eigen::VectorXd y(3);
    y << 0.7, 0.3, 0.0;  // in the column space, nonnegative coordinates
    QpProblem p = simple_problem(b, y);
    QpSolution sol = solve_nn_qp(p, 1e-10, 10000);
    CHECK(sol.converged);
    CHECK(sol.z[0] == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(sol.z[1] == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("active constraint clips the unconstrained optimum") {
    Eigen::MatrixXd b(1, 1);
    b << 1;
    Eigen::VectorXd y(1);
    y << -1;
    QpProblem p = simple_problem(b, y);
    QpSolution sol = solve_nn_qp(p);
    CHECK(sol.converged);
    CHECK(sol.z[0] == 0.0);
    CHECK(kkt_residual(p, sol.z) <= 1e-8);
}

TEST_CASE("all-zero design returns the origin") {
    QpProblem p = simple_problem(Eigen::MatrixXd::Zero(4, 3), Eigen::VectorXd::Ones(4));
    p.linear_cost = Eigen::VectorXd::Ones(3);
    QpSolution sol = solve_nn_qp(p);
    CHECK(sol.converged);
    CHECK(sol.z.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kkt residual at the origin") {
    Eigen::MatrixXd b(2, 2);
    b << 1, 0, 0, 1;
    Eigen::VectorXd y(2);

    SUBCASE("origin optimal when gradient is nonnegative") {
        y << -1, -2;
        QpProblem p = simple_problem(b, y);
        CHECK(kkt_residual(p, Eigen::VectorXd::Zero(2)) == 0.0);
    }
    SUBCASE("violated stationarity is reported") {
        y << 3, -1;
        QpProblem p = simple_problem(b, y);
        // gradient at the origin is (-3, 1): first coordinate wants to grow
        CHECK(kkt_residual(p, Eigen::VectorXd::Zero(2)) == doctest::Approx(3.0));
    }
}

TEST_CASE("500 random problems match active-set enumeration") {
    Rng rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        QpProblem p = oracle::random_qp(rng);
        auto reference = oracle::active_set_enumeration(p);
        REQUIRE(reference.has_value());
        QpSolution sol = solve_nn_qp(p, 1e-9, 50000);
        CHECK(sol.converged);
        CHECK(kkt_residual(p, sol.z) <= 1e-8);
        double gap = qp_objective(p, sol.z) - qp_objective(p, *reference);
        CHECK(gap <= 1e-8);
    }
}

TEST_CASE("objective trace is monotone non-increasing") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        QpProblem p = oracle::random_qp(rng);
        std::vector<double> trace;
        QpOptions opts;
        opts.objective_trace = &trace;
        solve_nn_qp(p, opts);
        for (size_t k = 1; k < trace.size(); ++k)
            CHECK(trace[k] <= trace[k - 1] + 1e-9 * (1.0 + std::abs(trace[k - 1])));
    }
}

TEST_CASE("scaling (y, lambda, c) by s preserves the optimal support") {
    Rng rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        QpProblem p = oracle::random_qp(rng);
        const double s = 3.5;
        QpProblem scaled = p;
        scaled.design.target *= s;
        scaled.multiplier *= s;
        scaled.linear_cost *= s;
        QpSolution base = solve_nn_qp(p, 1e-10, 100000);
        QpSolution alt = solve_nn_qp(scaled, 1e-10, 100000);
        REQUIRE(base.converged);
        REQUIRE(alt.converged);
        for (int k = 0; k < base.z.size(); ++k) {
            bool on_base = base.z[k] > 1e-6;
            bool on_alt = alt.z[k] > 1e-6 * s;
            CHECK(on_base == on_alt);
        }
        // the objective scales quadratically under this family
        double f_base = qp_objective(p, base.z);
        double f_alt = qp_objective(scaled, alt.z);
        CHECK(f_alt == doctest::Approx(s * s * f_base).epsilon(1e-6));
    }
}

TEST_CASE("solution is start-point independent") {
    Rng rng(123);
    for (int trial = 0; trial < 10; ++trial) {
        QpProblem p = oracle::random_qp(rng);
        QpSolution cold = solve_nn_qp(p, 1e-10, 100000);
        double f_cold = qp_objective(p, cold.z);
        for (int start = 0; start < 5; ++start) {
            Eigen::VectorXd w(p.design.cols());
            for (int k = 0; k < w.size(); ++k) w[k] = rng.uniform(0.0, 2.0);
            QpOptions opts;
            opts.tol = 1e-10;
            opts.max_iters = 100000;
            opts.warm_start = &w;
            QpSolution warm = solve_nn_qp(p, opts);
            CHECK(qp_objective(p, warm.z) == doctest::Approx(f_cold).epsilon(1e-7));
        }
    }
}

TEST_CASE("warm start at the optimum converges immediately") {
    Eigen::MatrixXd b(3, 2);
    b << 1, 0, 0, 1, 1, 1;
    Eigen::VectorXd y(3);
    y << 1, 2, 3;
    QpProblem p = simple_problem(b, y);
    QpSolution first = solve_nn_qp(p, 1e-10, 100000);
    QpOptions opts;
    opts.tol = 1e-10;
    opts.warm_start = &first.z;
    QpSolution second = solve_nn_qp(p, opts);
    CHECK(second.converged);
    CHECK(second.iterations <= 2);
}

TEST_CASE("invalid problems are rejected") {
    Eigen::MatrixXd b(2, 1);
    b << 1, 1;
    Eigen::VectorXd y(2);
    y << 1, 1;
    QpProblem p = simple_problem(b, y);
    SUBCASE("nonpositive penalty") {
        p.penalty = 0.0;
        CHECK_THROWS_AS(solve_nn_qp(p), std::invalid_argument);
    }
    SUBCASE("negative linear cost") {
        p.linear_cost[0] = -1.0;
        CHECK_THROWS_AS(solve_nn_qp(p), std::invalid_argument);
    }
    SUBCASE("multiplier length mismatch") {
        p.multiplier = Eigen::VectorXd::Zero(3);
        CHECK_THROWS_AS(solve_nn_qp(p), ShapeError);
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "asind/dynamics.hpp"
#include "asind/netgen.hpp"
#include "asind/sindy.hpp"

using namespace asind;

TEST_CASE("feature rows enumerate monomials in declared order") {
    Eigen::MatrixXd one(1, 1);
    one << 2.0;
    DesignMatrix d1 = build_poly_features(one, 2);
    REQUIRE(d1.cols() == 3);
    CHECK(d1.entries(0, 0) == 1.0);
    CHECK(d1.entries(0, 1) == 2.0);
    CHECK(d1.entries(0, 2) == 4.0);

    Eigen::MatrixXd two(1, 2);
    two << 2.0, 3.0;
    DesignMatrix d2 = build_poly_features(two, 2);
    REQUIRE(d2.cols() == 6);
    double expected[6] = {1, 2, 3, 4, 6, 9};
    for (int k = 0; k < 6; ++k) CHECK(d2.entries(0, k) == doctest::Approx(expected[k]));

    // all-zero states: constant column only
    DesignMatrix dz = build_poly_features(Eigen::MatrixXd::Zero(4, 3), 2);
    CHECK((dz.entries.col(0).array() == 1.0).all());
    CHECK(dz.entries.rightCols(dz.cols() - 1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("feature count follows the closed form") {
    for (int n : {1, 3, 16}) {
        PolyLibrary lib = PolyLibrary::make(n, 2);
        CHECK(lib.feature_count() == 1 + n + n * (n + 1) / 2);
        PolyLibrary lin = PolyLibrary::make(n, 1);
        CHECK(lin.feature_count() == 1 + n);
        PolyLibrary sq = PolyLibrary::make(n, 2, false);
        CHECK(sq.feature_count() == 1 + 2 * n);
    }
    CHECK_THROWS_AS(PolyLibrary::make(3, 5), std::invalid_argument);
}

TEST_CASE("stlsq recovers an exact linear law") {
    Eigen::MatrixXd states(50, 1);
    for (int t = 0; t < 50; ++t) states(t, 0) = 0.1 + 0.05 * t;
    DesignMatrix features = build_poly_features(states, 2);
    Eigen::MatrixXd targets = 3.0 * states;  // xdot = 3x
    Eigen::MatrixXd coeffs = stlsq(features, targets, 1.0, 0.0, 20);
    CHECK(coeffs(1, 0) == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(coeffs(0, 0) == 0.0);
    CHECK(coeffs(2, 0) == 0.0);
}

TEST_CASE("threshold above every coefficient gives the zero model") {
    Eigen::MatrixXd states(30, 2);
    for (int t = 0; t < 30; ++t) {
        states(t, 0) = std::sin(0.2 * t);
        states(t, 1) = std::cos(0.17 * t);
    }
    DesignMatrix features = build_poly_features(states, 2);
    Eigen::MatrixXd targets = 0.01 * states;
    Eigen::MatrixXd coeffs = stlsq(features, targets, 10.0, 1e-6, 20);
    CHECK(coeffs.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("logistic-style scalar law is recovered from its own trajectory") {
    // xdot = 1 - x^2 through the generic machinery: simulate with rk4
    auto f = [](const Eigen::VectorXd& x) {
        return Eigen::VectorXd((1.0 - x.array().square()).matrix());
    };
    Trajectory traj = integrate_rk4_fn(f, Eigen::VectorXd::Constant(1, 0.2), 0.01, 400);
    SindyConfig cfg;
    cfg.threshold = 0.05;
    cfg.ridge = 1e-6;
    SindyModel model = fit_sindy(traj, cfg);
    CHECK(model.coeffs(0, 0) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(model.coeffs(1, 0) == doctest::Approx(0.0).epsilon(1e-3));
    CHECK(model.coeffs(2, 0) == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("stlsq support never grows between rounds") {
    DynamicsSpec spec = make_default_spec(Model::sis, 6, 21);
    AdjacencyMatrix a = gen_er(6, 0.4, 21);
    Trajectory traj = integrate_rk4(spec, a, draw_initial_state(spec, 21), 0.01, 300);
    DesignMatrix features = build_poly_features(traj.states, 2);

    // rerun stlsq with increasing round budget: the support at round k+1 is a
    // subset of the support at round k
    std::vector<int> sizes;
    for (int rounds = 1; rounds <= 6; ++rounds) {
        Eigen::MatrixXd coeffs = stlsq(features, *traj.derivatives, 0.05, 1e-6, rounds);
        int nnz = 0;
        for (int p = 0; p < coeffs.rows(); ++p)
            for (int c = 0; c < coeffs.cols(); ++c)
                if (coeffs(p, c) != 0.0) ++nnz;
        sizes.push_back(nnz);
    }
    for (size_t k = 1; k < sizes.size(); ++k) CHECK(sizes[k] <= sizes[k - 1]);
}

TEST_CASE("threshold 0 and ridge 0 on a full-rank system is ordinary least squares") {
    Eigen::MatrixXd states(40, 1);
    for (int t = 0; t < 40; ++t) states(t, 0) = 0.3 + 0.04 * t;
    DesignMatrix features = build_poly_features(states, 1);
    Eigen::VectorXd target(40);
    for (int t = 0; t < 40; ++t) target[t] = 2.0 + 0.5 * states(t, 0) + 1e-3 * std::sin(t);
    Eigen::MatrixXd coeffs = stlsq(features, target, 0.0, 0.0, 20);
    Eigen::VectorXd ols =
        features.entries.colPivHouseholderQr().solve(target);
    CHECK((coeffs.col(0) - ols).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("zero dynamics give the zero model and a constant prediction") {
    Trajectory traj;
    traj.dt = 0.01;
    traj.states = Eigen::MatrixXd::Constant(100, 3, 0.5);
    traj.derivatives = Eigen::MatrixXd::Zero(100, 3);
    SindyModel model = fit_sindy(traj, 2, 0.05, 1e-6);
    CHECK(model.coeffs.cwiseAbs().maxCoeff() == 0.0);
    Trajectory pred = predict_sindy(model, Eigen::VectorXd::Constant(3, 0.5), 0.01, 50);
    CHECK((pred.states.array() == 0.5).all());
}

TEST_CASE("rollout divergence surfaces as DivergenceError") {
    SindyModel model;
    model.library = PolyLibrary::make(1, 2);
    model.coeffs = Eigen::MatrixXd::Zero(3, 1);
    model.coeffs(2, 0) = 5.0;  // xdot = 5 x^2 blows up in finite time
    CHECK_THROWS_AS(predict_sindy(model, Eigen::VectorXd::Constant(1, 1.0), 0.05, 200),
                    DivergenceError);
}

TEST_CASE("fit requires derivatives") {
    Trajectory traj;
    traj.dt = 0.01;
    traj.states = Eigen::MatrixXd::Zero(10, 2);
    CHECK_THROWS_AS(fit_sindy(traj, 2, 0.05, 1e-6), std::invalid_argument);
}

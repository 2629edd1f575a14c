#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>

namespace asind {

struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an integration or rollout produces non-finite values.
struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& what, int step) : std::runtime_error(what), step_index(step) {}
    int step_index;
};

struct InsufficientDataError : std::runtime_error {
    explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, int line = -1) : std::runtime_error(what), line_number(line) {}
    int line_number;
};

// N x N nonnegative interaction weights, zero diagonal. Ground-truth
// instances are binary {0, 1}; estimates carry arbitrary nonnegative reals.
struct AdjacencyMatrix {
    Eigen::MatrixXd weights;

    AdjacencyMatrix() = default;
    explicit AdjacencyMatrix(Eigen::MatrixXd w) : weights(std::move(w)) {}

    static AdjacencyMatrix zeros(int n) { return AdjacencyMatrix(Eigen::MatrixXd::Zero(n, n)); }

    int n() const { return static_cast<int>(weights.rows()); }

    int edge_count() const {
        int c = 0;
        for (int i = 0; i < n(); ++i)
            for (int j = 0; j < n(); ++j)
                if (weights(i, j) != 0.0) ++c;
        return c;
    }

    bool is_symmetric(double tol = 0.0) const {
        return (weights - weights.transpose()).cwiseAbs().maxCoeff() <= tol;
    }

    void validate() const {
        if (weights.rows() != weights.cols())
            throw ShapeError("adjacency matrix must be square");
        for (int i = 0; i < n(); ++i) {
            if (weights(i, i) != 0.0)
                throw std::invalid_argument("adjacency diagonal must be zero");
            for (int j = 0; j < n(); ++j)
                if (weights(i, j) < 0.0)
                    throw std::invalid_argument("adjacency weights must be nonnegative");
        }
    }
};

enum class TrajectoryOrigin { simulated_exact, estimated };

// Uniformly sampled node states, one row per sample, one column per node.
struct Trajectory {
    double dt = 0.0;
    Eigen::MatrixXd states;                      // T x N
    std::optional<Eigen::MatrixXd> derivatives;  // T x N when present
    TrajectoryOrigin origin = TrajectoryOrigin::estimated;

    int samples() const { return static_cast<int>(states.rows()); }
    int nodes() const { return static_cast<int>(states.cols()); }
};

} // namespace asind

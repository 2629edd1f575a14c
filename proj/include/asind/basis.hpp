#pragma once

#include <functional>
#include <string>
#include <vector>

#include "asind/types.hpp"

namespace asind {

struct SelfBasis {
    std::string name;
    std::function<double(double)> fn;
};

struct PairBasis {
    std::string name;
    std::function<double(double, double)> fn;  // (x_i, x_j)
};

// Ordered candidate functions; fitted models are sparse linear combinations
// of these against observed derivatives.
struct BasisLibrary {
    std::vector<SelfBasis> self_bases;
    std::vector<PairBasis> pair_bases;

    int m1() const { return static_cast<int>(self_bases.size()); }
    int m2() const { return static_cast<int>(pair_bases.size()); }
    int size() const { return m1() + m2(); }

    void validate() const;
};

// Built-in bases by string key. Canonical names are themselves valid keys, so
// serialized libraries round-trip. Aliases: sin_diff, hill2, hill:<h>,
// contact; poly:<k> expands to [1, x_i, ..., x_i^k].
SelfBasis make_self_basis(const std::string& key);
PairBasis make_pair_basis(const std::string& key);
std::vector<SelfBasis> expand_self_keys(const std::vector<std::string>& keys);

BasisLibrary library_from_keys(const std::vector<std::string>& self_keys,
                               const std::vector<std::string>& pair_keys);

// Self: [1, x_i, x_i^2]. Pair: [x_j, x_i*x_j, x_j^2, sin(x_j-x_i),
// x_j^2/(1+x_j^2), (1-x_i)*x_j]. Every built-in model is exactly
// representable here; the rest act as distractors.
BasisLibrary default_library();

struct DesignMatrix {
    Eigen::MatrixXd entries;  // T x cols
    Eigen::VectorXd target;   // length T

    int rows() const { return static_cast<int>(entries.rows()); }
    int cols() const { return static_cast<int>(entries.cols()); }
};

// Precomputed basis evaluations over one trajectory, shared by every step of
// the alternating fit. self_vals[i] is T x M1; pair_vals[i][m] is T x N with
// entry (t, j) = G_m(x_i(t), x_j(t)). The scale vectors hold the RMS
// magnitude of each candidate over the data; sparsity costs are weighted by
// them so that selection is invariant to how large a basis function runs.
struct BasisTables {
    std::vector<Eigen::MatrixXd> self_vals;
    std::vector<std::vector<Eigen::MatrixXd>> pair_vals;
    std::vector<Eigen::VectorXd> self_scale;      // per node: M1
    std::vector<Eigen::VectorXd> pair_scale;      // per node: M2, rms over (t, j)
    std::vector<Eigen::VectorXd> neighbor_scale;  // per node: N, rms over (t, m)
    const Eigen::MatrixXd* derivatives = nullptr;

    static BasisTables build(const BasisLibrary& lib, const Trajectory& traj);

    int samples() const { return self_vals.empty() ? 0 : static_cast<int>(self_vals[0].rows()); }
    int nodes() const { return static_cast<int>(self_vals.size()); }
    int m1() const { return self_vals.empty() ? 0 : static_cast<int>(self_vals[0].cols()); }
    int m2() const { return pair_vals.empty() ? 0 : static_cast<int>(pair_vals[0].size()); }

    // Model output for node i given coefficients and an adjacency row.
    Eigen::VectorXd node_output(int i, const Eigen::VectorXd& w_i, const Eigen::VectorXd& a_row) const;
    // Residual dx_i - node_output.
    Eigen::VectorXd node_residual(int i, const Eigen::VectorXd& w_i, const Eigen::VectorXd& a_row) const;
};

// Regression design for the coefficient step: self columns, then pair columns
// aggregated through a fixed adjacency row; target is the derivative series.
DesignMatrix assemble_w_design(const BasisLibrary& lib, const Trajectory& traj, int i,
                               const Eigen::VectorXd& a_row);
DesignMatrix assemble_w_design(const BasisTables& tables, int i, const Eigen::VectorXd& a_row);

// Regression design for the adjacency step: one column per candidate neighbor
// j holding the w-weighted pair response; the self column is pinned to zero;
// target is the derivative series minus the self part.
DesignMatrix assemble_a_design(const BasisLibrary& lib, const Trajectory& traj, int i,
                               const Eigen::VectorXd& w_i);
DesignMatrix assemble_a_design(const BasisTables& tables, int i, const Eigen::VectorXd& w_i);

// Render "dx_i/dt = ..." for node i, substituting the node index into names.
std::string format_node_equation(const BasisLibrary& lib, int i, const Eigen::VectorXd& w_i);

} // namespace asind

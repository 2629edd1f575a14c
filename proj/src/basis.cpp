#include "asind/basis.hpp"

#include <cmath>
#include <cstdio>
#include <set>

namespace asind {

void BasisLibrary::validate() const {
    if (m1() < 1 || m2() < 1)
        throw std::invalid_argument("basis library needs at least one self and one pair basis");
    std::set<std::string> names;
    for (const auto& b : self_bases)
        if (!names.insert("self:" + b.name).second)
            throw std::invalid_argument("duplicate self basis name '" + b.name + "'");
    for (const auto& b : pair_bases)
        if (!names.insert("pair:" + b.name).second)
            throw std::invalid_argument("duplicate pair basis name '" + b.name + "'");
}

namespace {

int parse_suffix_int(const std::string& key, const std::string& prefix) {
    int value = 0;
    try {
        size_t pos = 0;
        value = std::stoi(key.substr(prefix.size()), &pos);
        if (pos != key.size() - prefix.size()) throw std::invalid_argument("");
    } catch (...) {
        throw std::invalid_argument("malformed basis key '" + key + "'");
    }
    return value;
}

} // namespace

SelfBasis make_self_basis(const std::string& key) {
    if (key == "1") return {"1", [](double) { return 1.0; }};
    if (key == "x_i") return {"x_i", [](double x) { return x; }};
    if (key == "x_i^2") return {"x_i^2", [](double x) { return x * x; }};
    if (key.rfind("x_i^", 0) == 0) {
        int p = parse_suffix_int(key, "x_i^");
        if (p < 1) throw std::invalid_argument("power in '" + key + "' must be >= 1");
        return {key, [p](double x) { return std::pow(x, p); }};
    }
    throw std::invalid_argument("unknown self basis key '" + key + "'");
}

std::vector<SelfBasis> expand_self_keys(const std::vector<std::string>& keys) {
    std::vector<SelfBasis> out;
    for (const auto& key : keys) {
        if (key.rfind("poly:", 0) == 0) {
            int order = parse_suffix_int(key, "poly:");
            if (order < 0) throw std::invalid_argument("negative order in '" + key + "'");
            out.push_back(make_self_basis("1"));
            if (order >= 1) out.push_back(make_self_basis("x_i"));
            for (int p = 2; p <= order; ++p) out.push_back(make_self_basis("x_i^" + std::to_string(p)));
        } else {
            out.push_back(make_self_basis(key));
        }
    }
    return out;
}

PairBasis make_pair_basis(const std::string& key) {
    if (key == "x_j") return {"x_j", [](double, double xj) { return xj; }};
    if (key == "x_i*x_j") return {"x_i*x_j", [](double xi, double xj) { return xi * xj; }};
    if (key == "x_j^2") return {"x_j^2", [](double, double xj) { return xj * xj; }};
    if (key == "sin(x_j-x_i)" || key == "sin_diff")
        return {"sin(x_j-x_i)", [](double xi, double xj) { return std::sin(xj - xi); }};
    if (key == "(1-x_i)*x_j" || key == "contact")
        return {"(1-x_i)*x_j", [](double xi, double xj) { return (1.0 - xi) * xj; }};
    if (key == "x_j^2/(1+x_j^2)" || key == "hill2")
        return {"x_j^2/(1+x_j^2)", [](double, double xj) {
                    double p = xj * xj;
                    return p / (1.0 + p);
                }};
    if (key.rfind("hill:", 0) == 0) {
        int h = parse_suffix_int(key, "hill:");
        if (h < 1) throw std::invalid_argument("hill exponent in '" + key + "' must be >= 1");
        if (h == 2) return make_pair_basis("hill2");
        std::string name = "x_j^" + std::to_string(h) + "/(1+x_j^" + std::to_string(h) + ")";
        return {name, [h](double, double xj) {
                    double p = std::pow(xj, h);
                    return p / (1.0 + p);
                }};
    }
    if (key.rfind("x_j^", 0) == 0 && key.find('/') == std::string::npos) {
        int p = parse_suffix_int(key, "x_j^");
        if (p < 1) throw std::invalid_argument("power in '" + key + "' must be >= 1");
        return {key, [p](double, double xj) { return std::pow(xj, p); }};
    }
    // general hill written out, e.g. x_j^3/(1+x_j^3)
    if (key.rfind("x_j^", 0) == 0) {
        size_t slash = key.find('/');
        std::string head = key.substr(0, slash);
        int h = parse_suffix_int(head, "x_j^");
        std::string expect = "x_j^" + std::to_string(h) + "/(1+x_j^" + std::to_string(h) + ")";
        if (key == expect) return make_pair_basis("hill:" + std::to_string(h));
    }
    throw std::invalid_argument("unknown pair basis key '" + key + "'");
}

BasisLibrary library_from_keys(const std::vector<std::string>& self_keys,
                               const std::vector<std::string>& pair_keys) {
    BasisLibrary lib;
    lib.self_bases = expand_self_keys(self_keys);
    for (const auto& key : pair_keys) lib.pair_bases.push_back(make_pair_basis(key));
    lib.validate();
    return lib;
}

BasisLibrary default_library() {
    return library_from_keys({"poly:2"},
                             {"x_j", "x_i*x_j", "x_j^2", "sin(x_j-x_i)", "x_j^2/(1+x_j^2)", "(1-x_i)*x_j"});
}

BasisTables BasisTables::build(const BasisLibrary& lib, const Trajectory& traj) {
    if (!traj.derivatives)
        throw std::invalid_argument("trajectory has no derivatives; estimate them first");
    int t_count = traj.samples();
    int n = traj.nodes();
    BasisTables tables;
    tables.derivatives = &*traj.derivatives;
    tables.self_vals.resize(n);
    tables.pair_vals.resize(n);
    tables.self_scale.resize(n);
    tables.pair_scale.resize(n);
    tables.neighbor_scale.resize(n);
    for (int i = 0; i < n; ++i) {
        tables.self_vals[i].resize(t_count, lib.m1());
        for (int m = 0; m < lib.m1(); ++m)
            for (int t = 0; t < t_count; ++t)
                tables.self_vals[i](t, m) = lib.self_bases[m].fn(traj.states(t, i));
        tables.pair_vals[i].resize(lib.m2());
        for (int m = 0; m < lib.m2(); ++m) {
            Eigen::MatrixXd& g = tables.pair_vals[i][m];
            g.resize(t_count, n);
            for (int t = 0; t < t_count; ++t) {
                double xi = traj.states(t, i);
                for (int j = 0; j < n; ++j)
                    g(t, j) = lib.pair_bases[m].fn(xi, traj.states(t, j));
            }
        }

        tables.self_scale[i].resize(lib.m1());
        for (int m = 0; m < lib.m1(); ++m)
            tables.self_scale[i][m] = std::sqrt(tables.self_vals[i].col(m).squaredNorm() / t_count);
        tables.pair_scale[i].resize(lib.m2());
        for (int m = 0; m < lib.m2(); ++m) {
            const Eigen::MatrixXd& g = tables.pair_vals[i][m];
            double total = 0.0;
            int used = 0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                total += g.col(j).squaredNorm();
                ++used;
            }
            tables.pair_scale[i][m] = std::sqrt(total / std::max(1, used * t_count));
        }
        // adjacency entries are commensurate quantities already
        tables.neighbor_scale[i] = Eigen::VectorXd::Ones(n);
    }
    return tables;
}

Eigen::VectorXd BasisTables::node_output(int i, const Eigen::VectorXd& w_i,
                                         const Eigen::VectorXd& a_row) const {
    Eigen::VectorXd out = self_vals[i] * w_i.head(m1());
    for (int m = 0; m < m2(); ++m) {
        double coef = w_i[m1() + m];
        if (coef != 0.0) out += coef * (pair_vals[i][m] * a_row);
    }
    return out;
}

Eigen::VectorXd BasisTables::node_residual(int i, const Eigen::VectorXd& w_i,
                                           const Eigen::VectorXd& a_row) const {
    return derivatives->col(i) - node_output(i, w_i, a_row);
}

DesignMatrix assemble_w_design(const BasisTables& tables, int i, const Eigen::VectorXd& a_row) {
    if (a_row.size() != tables.nodes())
        throw ShapeError("adjacency row length does not match node count");
    if ((a_row.array() < 0.0).any())
        throw std::invalid_argument("adjacency row must be nonnegative");
    DesignMatrix d;
    d.entries.resize(tables.samples(), tables.m1() + tables.m2());
    d.entries.leftCols(tables.m1()) = tables.self_vals[i];
    for (int m = 0; m < tables.m2(); ++m)
        d.entries.col(tables.m1() + m) = tables.pair_vals[i][m] * a_row;
    d.target = tables.derivatives->col(i);
    return d;
}

DesignMatrix assemble_w_design(const BasisLibrary& lib, const Trajectory& traj, int i,
                               const Eigen::VectorXd& a_row) {
    return assemble_w_design(BasisTables::build(lib, traj), i, a_row);
}

DesignMatrix assemble_a_design(const BasisTables& tables, int i, const Eigen::VectorXd& w_i) {
    if (w_i.size() != tables.m1() + tables.m2())
        throw ShapeError("coefficient vector length does not match library size");
    DesignMatrix d;
    d.entries = Eigen::MatrixXd::Zero(tables.samples(), tables.nodes());
    for (int m = 0; m < tables.m2(); ++m) {
        double coef = w_i[tables.m1() + m];
        if (coef != 0.0) d.entries += coef * tables.pair_vals[i][m];
    }
    d.entries.col(i).setZero();
    d.target = tables.derivatives->col(i) - tables.self_vals[i] * w_i.head(tables.m1());
    return d;
}

DesignMatrix assemble_a_design(const BasisLibrary& lib, const Trajectory& traj, int i,
                               const Eigen::VectorXd& w_i) {
    return assemble_a_design(BasisTables::build(lib, traj), i, w_i);
}

namespace {

std::string substitute_node(const std::string& name, int i) {
    std::string out = name;
    const std::string pat = "x_i";
    std::string rep = "x_" + std::to_string(i);
    size_t pos = 0;
    while ((pos = out.find(pat, pos)) != std::string::npos) {
        // avoid clobbering x_i^2's caret suffix handling: plain substring swap is fine
        out.replace(pos, pat.size(), rep);
        pos += rep.size();
    }
    return out;
}

std::string format_coef(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

std::string format_node_equation(const BasisLibrary& lib, int i, const Eigen::VectorXd& w_i) {
    std::string eq = "dx_" + std::to_string(i) + "/dt =";
    bool any = false;
    for (int m = 0; m < lib.m1(); ++m) {
        double coef = w_i[m];
        if (coef == 0.0) continue;
        std::string term = format_coef(std::abs(coef)) + "*" + substitute_node(lib.self_bases[m].name, i);
        eq += any ? (coef < 0 ? " - " : " + ") : (coef < 0 ? " -" : " ");
        eq += term;
        any = true;
    }
    std::string pair_part;
    bool any_pair = false;
    for (int m = 0; m < lib.m2(); ++m) {
        double coef = w_i[lib.m1() + m];
        if (coef == 0.0) continue;
        std::string term = format_coef(std::abs(coef)) + "*" + substitute_node(lib.pair_bases[m].name, i);
        pair_part += any_pair ? (coef < 0 ? " - " : " + ") : (coef < 0 ? "-" : "");
        pair_part += term;
        any_pair = true;
    }
    if (any_pair) {
        eq += any ? " + " : " ";
        eq += "Σ_j A_" + std::to_string(i) + "j * (" + pair_part + ")";
        any = true;
    }
    if (!any) eq += " 0";
    return eq;
}

} // namespace asind

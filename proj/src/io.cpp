#include "asind/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace asind {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double parse_double(const std::string& s, int line_no) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse number '" + s + "'",
                         line_no);
    }
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, const char* what) {
    if (!rows.is_array() || rows.empty())
        throw ParseError(std::string("expected a nonempty array of rows for ") + what);
    int r = static_cast<int>(rows.size());
    int c = static_cast<int>(rows[0].size());
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(rows[i].size()) != c)
            throw ParseError(std::string("ragged rows in ") + what);
        for (int j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
    }
    return m;
}

} // namespace

void save_trajectory(const Trajectory& traj, const std::filesystem::path& path,
                     const std::optional<TrajectoryMeta>& meta) {
    std::ofstream out = open_out(path);
    out << "t";
    for (int j = 0; j < traj.nodes(); ++j) out << ",node_" << j;
    out << "\n";
    for (int t = 0; t < traj.samples(); ++t) {
        out << format_double(t * traj.dt);
        for (int j = 0; j < traj.nodes(); ++j) out << "," << format_double(traj.states(t, j));
        out << "\n";
    }
    if (meta) {
        json m;
        m["model"] = meta->model;
        m["parameters"] = meta->parameters_json.empty() ? json::object() : json::parse(meta->parameters_json);
        m["seed"] = meta->seed;
        m["dt"] = meta->dt;
        std::ofstream mout = open_out(path.string() + ".meta.json");
        mout << m.dump(2) << "\n";
    }
}

Trajectory load_trajectory(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty trajectory file '" + path.string() + "'", 1);
    std::vector<std::string> header = split_csv_line(line);
    if (header.empty() || header[0] != "t")
        throw ParseError("line 1: first column must be 't'", 1);
    int n = static_cast<int>(header.size()) - 1;
    if (n < 1) throw ParseError("line 1: missing column 'node_0'", 1);
    for (int j = 0; j < n; ++j) {
        std::string expected = "node_" + std::to_string(j);
        if (header[j + 1] != expected)
            throw ParseError("line 1: missing column '" + expected + "' (found '" + header[j + 1] + "')", 1);
    }

    std::vector<double> times;
    std::vector<Eigen::RowVectorXd> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != n + 1)
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(n + 1) +
                                 " fields, got " + std::to_string(fields.size()),
                             line_no);
        times.push_back(parse_double(fields[0], line_no));
        Eigen::RowVectorXd row(n);
        for (int j = 0; j < n; ++j) row[j] = parse_double(fields[j + 1], line_no);
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw ParseError("trajectory needs at least 2 samples", line_no);

    Trajectory traj;
    traj.dt = times[1] - times[0];
    if (traj.dt <= 0.0) throw ParseError("non-increasing time column", 2);
    traj.states.resize(static_cast<int>(rows.size()), n);
    for (size_t t = 0; t < rows.size(); ++t) traj.states.row(static_cast<int>(t)) = rows[t];
    traj.origin = TrajectoryOrigin::estimated;
    return traj;
}

void save_adjacency_csv(const AdjacencyMatrix& a, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    for (int j = 0; j < a.n(); ++j) out << (j ? "," : "") << j;
    out << "\n";
    for (int i = 0; i < a.n(); ++i) {
        for (int j = 0; j < a.n(); ++j) out << (j ? "," : "") << format_double(a.weights(i, j));
        out << "\n";
    }
}

AdjacencyMatrix load_adjacency_csv(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty adjacency file", 1);
    int n = static_cast<int>(split_csv_line(line).size());
    AdjacencyMatrix a = AdjacencyMatrix::zeros(n);
    int line_no = 1;
    for (int i = 0; i < n; ++i) {
        if (!std::getline(in, line))
            throw ParseError("expected " + std::to_string(n) + " rows, got " + std::to_string(i),
                             line_no);
        ++line_no;
        std::vector<std::string> fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != n)
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(n) +
                                 " fields, got " + std::to_string(fields.size()),
                             line_no);
        for (int j = 0; j < n; ++j) a.weights(i, j) = parse_double(fields[j], line_no);
    }
    return a;
}

void save_edge_list(const AdjacencyMatrix& a, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    for (int i = 0; i < a.n(); ++i)
        for (int j = 0; j < a.n(); ++j)
            if (a.weights(i, j) != 0.0)
                out << i << "," << j << "," << format_double(a.weights(i, j)) << "\n";
}

AdjacencyMatrix load_edge_list(const std::filesystem::path& path, int n) {
    std::ifstream in = open_in(path);
    AdjacencyMatrix a = AdjacencyMatrix::zeros(n);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != 3)
            throw ParseError("line " + std::to_string(line_no) + ": expected 'i,j,weight'", line_no);
        int i = static_cast<int>(parse_double(fields[0], line_no));
        int j = static_cast<int>(parse_double(fields[1], line_no));
        if (i < 0 || i >= n || j < 0 || j >= n)
            throw ParseError("line " + std::to_string(line_no) + ": node index out of range", line_no);
        a.weights(i, j) = parse_double(fields[2], line_no);
    }
    return a;
}

namespace {

json config_to_json(const AsindConfig& cfg) {
    json c;
    c["penalty"] = cfg.penalty;
    c["multiplier_step"] = cfg.multiplier_step;
    c["outer_max_iters"] = cfg.outer_max_iters;
    c["outer_tol"] = cfg.outer_tol;
    c["init_sweeps"] = cfg.init_sweeps;
    c["qp_tol"] = cfg.qp_tol;
    c["qp_max_iters"] = cfg.qp_max_iters;
    c["threshold_w"] = cfg.threshold_w;
    c["threshold_a"] = cfg.threshold_a;
    c["refit_on_support"] = cfg.refit_on_support;
    return c;
}

} // namespace

void save_model(const IdentifiedModel& model, const AsindConfig& cfg, const SolverState& state,
                const std::filesystem::path& path) {
    json doc;
    doc["method"] = "asind";
    json lib;
    lib["self"] = json::array();
    for (const auto& b : model.library.self_bases) lib["self"].push_back(b.name);
    lib["pair"] = json::array();
    for (const auto& b : model.library.pair_bases) lib["pair"].push_back(b.name);
    doc["library"] = lib;
    doc["w"] = matrix_to_json(model.w);
    doc["a_hat"] = matrix_to_json(model.a_hat.weights);
    doc["config"] = config_to_json(cfg);
    json hist;
    hist["iterations"] = state.iteration;
    json lag = json::array();
    for (const auto& rec : state.lagrangian_history) {
        lag.push_back(rec.before_a);
        lag.push_back(rec.after_a);
        lag.push_back(rec.after_w);
    }
    hist["lagrangian"] = lag;  // flattened triples (before_a, after_a, after_w)
    hist["residual"] = state.residual_history;
    hist["warnings"] = state.warnings;
    doc["history"] = hist;
    std::ofstream out = open_out(path);
    out << doc.dump(2) << "\n";
}

IdentifiedModel load_model(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    json doc = json::parse(in, nullptr, true);
    if (doc.value("method", "") != "asind")
        throw ParseError("'" + path.string() + "' does not hold an asind model");
    IdentifiedModel model;
    std::vector<std::string> self_keys = doc.at("library").at("self").get<std::vector<std::string>>();
    std::vector<std::string> pair_keys = doc.at("library").at("pair").get<std::vector<std::string>>();
    model.library = library_from_keys(self_keys, pair_keys);
    model.w = matrix_from_json(doc.at("w"), "w");
    model.a_hat = AdjacencyMatrix(matrix_from_json(doc.at("a_hat"), "a_hat"));
    if (model.w.cols() != model.library.size())
        throw ParseError("coefficient width disagrees with library size");
    if (model.a_hat.n() != model.w.rows()) throw ParseError("a_hat size disagrees with w rows");
    return model;
}

void save_sindy_model(const SindyModel& model, const std::filesystem::path& path) {
    json doc;
    doc["method"] = "sindy";
    doc["n"] = model.library.n;
    doc["order"] = model.library.order;
    doc["interactions"] = model.library.interactions;
    doc["with_trig"] = model.library.with_trig;
    doc["feature_names"] = model.library.feature_names;
    doc["coeffs"] = matrix_to_json(model.coeffs);
    std::ofstream out = open_out(path);
    out << doc.dump(2) << "\n";
}

SindyModel load_sindy_model(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    json doc = json::parse(in, nullptr, true);
    if (doc.value("method", "") != "sindy")
        throw ParseError("'" + path.string() + "' does not hold a sindy model");
    SindyModel model;
    model.library = PolyLibrary::make(doc.at("n").get<int>(), doc.at("order").get<int>(),
                                      doc.value("interactions", true), doc.value("with_trig", false));
    model.coeffs = matrix_from_json(doc.at("coeffs"), "coeffs");
    if (model.coeffs.rows() != model.library.feature_count())
        throw ParseError("coefficient rows disagree with feature count");
    return model;
}

std::string peek_model_method(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    json doc = json::parse(in, nullptr, true);
    return doc.value("method", "");
}

void save_equations(const IdentifiedModel& model, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    for (int i = 0; i < model.n(); ++i)
        out << format_node_equation(model.library, i, model.w.row(i)) << "\n";
    out << "\n# adjacency rows (nonzero entries)\n";
    for (int i = 0; i < model.n(); ++i) {
        out << "A_" << i << "j:";
        bool any = false;
        for (int j = 0; j < model.n(); ++j)
            if (model.a_hat.weights(i, j) != 0.0) {
                out << " " << j << ":" << format_double(model.a_hat.weights(i, j));
                any = true;
            }
        if (!any) out << " (empty)";
        out << "\n";
    }
}

} // namespace asind

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "asind/sindy.hpp"
#include "asind/solver.hpp"
#include "asind/types.hpp"

namespace asind {

// Sidecar metadata written next to trajectory CSVs.
struct TrajectoryMeta {
    std::string model;
    std::string parameters_json;  // raw JSON object text
    std::uint64_t seed = 0;
    double dt = 0.0;
};

// Doubles are written with enough digits to round-trip exactly.
std::string format_double(double v);

void save_trajectory(const Trajectory& traj, const std::filesystem::path& path,
                     const std::optional<TrajectoryMeta>& meta = std::nullopt);

// Reads the CSV states; dt comes from the time column. Derivatives are not
// stored, so the result loads as origin=estimated with derivatives unset.
Trajectory load_trajectory(const std::filesystem::path& path);

void save_adjacency_csv(const AdjacencyMatrix& a, const std::filesystem::path& path);
AdjacencyMatrix load_adjacency_csv(const std::filesystem::path& path);
void save_edge_list(const AdjacencyMatrix& a, const std::filesystem::path& path);
AdjacencyMatrix load_edge_list(const std::filesystem::path& path, int n);

void save_model(const IdentifiedModel& model, const AsindConfig& cfg, const SolverState& state,
                const std::filesystem::path& path);
IdentifiedModel load_model(const std::filesystem::path& path);

void save_sindy_model(const SindyModel& model, const std::filesystem::path& path);
SindyModel load_sindy_model(const std::filesystem::path& path);

// "asind" or "sindy" from a serialized model file.
std::string peek_model_method(const std::filesystem::path& path);

void save_equations(const IdentifiedModel& model, const std::filesystem::path& path);

} // namespace asind

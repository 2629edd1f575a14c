#pragma once

#include <cstdint>
#include <string>

#include "asind/types.hpp"

namespace asind {

enum class NetworkKind { erdos_renyi, watts_strogatz, barabasi_albert };

NetworkKind network_kind_from_string(const std::string& s);
std::string to_string(NetworkKind kind);

struct NetworkConfig {
    NetworkKind kind = NetworkKind::erdos_renyi;
    int n = 16;
    double er_p = 0.1;     // connection probability
    int ws_k = 4;          // ring-lattice degree, even, < n
    double ws_p = 0.1;     // rewiring probability
    double ba_alpha = 0.41;
    double ba_beta = 0.54;
    double ba_gamma = 0.05;
    bool symmetrize_ba = false;
    std::uint64_t seed = 0;

    void validate() const;
};

// Undirected G(n, p): every unordered pair connected independently.
AdjacencyMatrix gen_er(int n, double p, std::uint64_t seed);

// Ring lattice of degree k, then each clockwise edge rewired with probability p.
// Edge count is exactly n*k/2 for any p.
AdjacencyMatrix gen_ws(int n, int k, double p, std::uint64_t seed);

// Directed scale-free growth: alpha adds a node wired to an existing node by
// in-degree preference, beta adds an edge between existing nodes, gamma adds a
// node receiving an edge chosen by out-degree preference. Starts from a
// directed 3-cycle; parallel edges collapse, self-loops are dropped.
AdjacencyMatrix gen_ba_scale_free(int n, double alpha, double beta, double gamma, std::uint64_t seed);

AdjacencyMatrix generate_network(const NetworkConfig& cfg);

// Brute-force reachability over the undirected support.
bool is_connected(const AdjacencyMatrix& a);

} // namespace asind

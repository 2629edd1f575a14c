#include "asind/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "asind/rng.hpp"

namespace asind {

NetworkKind network_kind_from_string(const std::string& s) {
    if (s == "erdos-renyi" || s == "er") return NetworkKind::erdos_renyi;
    if (s == "watts-strogatz" || s == "ws") return NetworkKind::watts_strogatz;
    if (s == "barabasi-albert" || s == "ba") return NetworkKind::barabasi_albert;
    throw std::invalid_argument("unknown network kind '" + s +
                                "' (valid: erdos-renyi, watts-strogatz, barabasi-albert)");
}

std::string to_string(NetworkKind kind) {
    switch (kind) {
        case NetworkKind::erdos_renyi: return "erdos-renyi";
        case NetworkKind::watts_strogatz: return "watts-strogatz";
        case NetworkKind::barabasi_albert: return "barabasi-albert";
    }
    return "?";
}

void NetworkConfig::validate() const {
    if (n < 1) throw std::invalid_argument("network size must be >= 1");
    switch (kind) {
        case NetworkKind::erdos_renyi:
            if (er_p < 0.0 || er_p > 1.0) throw std::invalid_argument("er_p must lie in [0, 1]");
            break;
        case NetworkKind::watts_strogatz:
            if (ws_k % 2 != 0 || ws_k >= n) throw std::invalid_argument("ws_k must be even and < n");
            if (ws_p < 0.0 || ws_p > 1.0) throw std::invalid_argument("ws_p must lie in [0, 1]");
            break;
        case NetworkKind::barabasi_albert:
            if (std::abs(ba_alpha + ba_beta + ba_gamma - 1.0) > 1e-9)
                throw std::invalid_argument("ba_alpha + ba_beta + ba_gamma must sum to 1");
            if (ba_alpha < 0 || ba_beta < 0 || ba_gamma < 0)
                throw std::invalid_argument("scale-free control parameters must be nonnegative");
            if (n < 3) throw std::invalid_argument("scale-free generator needs n >= 3");
            break;
    }
}

AdjacencyMatrix gen_er(int n, double p, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("network size must be >= 1");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("connection probability must lie in [0, 1]");
    Rng rng(mix_seed(seed, 0xE2));
    AdjacencyMatrix a = AdjacencyMatrix::zeros(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < p) {
                a.weights(i, j) = 1.0;
                a.weights(j, i) = 1.0;
            }
    return a;
}

AdjacencyMatrix gen_ws(int n, int k, double p, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("network size must be >= 1");
    if (k % 2 != 0 || k >= n) throw std::invalid_argument("lattice degree must be even and < n");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("rewiring probability must lie in [0, 1]");
    Rng rng(mix_seed(seed, 0x35));
    AdjacencyMatrix a = AdjacencyMatrix::zeros(n);
    for (int i = 0; i < n; ++i)
        for (int d = 1; d <= k / 2; ++d) {
            int j = (i + d) % n;
            a.weights(i, j) = 1.0;
            a.weights(j, i) = 1.0;
        }
    // rewire each clockwise lattice edge with probability p, keeping the count
    for (int d = 1; d <= k / 2; ++d)
        for (int i = 0; i < n; ++i) {
            int j = (i + d) % n;
            if (rng.uniform() >= p) continue;
            // degree n-1 leaves no legal new endpoint
            int degree_i = 0;
            for (int m = 0; m < n; ++m)
                if (a.weights(i, m) != 0.0) ++degree_i;
            if (degree_i >= n - 1) continue;
            int target;
            do {
                target = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
            } while (target == i || a.weights(i, target) != 0.0);
            a.weights(i, j) = 0.0;
            a.weights(j, i) = 0.0;
            a.weights(i, target) = 1.0;
            a.weights(target, i) = 1.0;
        }
    return a;
}

namespace {

// Degree-proportional draw with +1 smoothing so fresh nodes stay reachable.
int preferential_pick(const std::vector<int>& degree, int count, Rng& rng) {
    double total = 0.0;
    for (int i = 0; i < count; ++i) total += degree[i] + 1.0;
    double r = rng.uniform() * total;
    double acc = 0.0;
    for (int i = 0; i < count; ++i) {
        acc += degree[i] + 1.0;
        if (r < acc) return i;
    }
    return count - 1;
}

} // namespace

AdjacencyMatrix gen_ba_scale_free(int n, double alpha, double beta, double gamma, std::uint64_t seed) {
    if (n < 3) throw std::invalid_argument("scale-free generator needs n >= 3");
    if (std::abs(alpha + beta + gamma - 1.0) > 1e-9)
        throw std::invalid_argument("alpha + beta + gamma must sum to 1");
    if (alpha < 0 || beta < 0 || gamma < 0)
        throw std::invalid_argument("scale-free control parameters must be nonnegative");
    Rng rng(mix_seed(seed, 0xBA));

    AdjacencyMatrix a = AdjacencyMatrix::zeros(n);
    std::vector<int> in_deg(n, 0), out_deg(n, 0);
    auto add_edge = [&](int from, int to) {
        if (from == to) return;
        if (a.weights(from, to) == 0.0) {
            a.weights(from, to) = 1.0;
            ++out_deg[from];
            ++in_deg[to];
        }
    };

    // seed graph: directed 3-cycle
    add_edge(0, 1);
    add_edge(1, 2);
    add_edge(2, 0);
    int count = 3;

    while (count < n) {
        double r = rng.uniform();
        if (r < alpha) {
            int target = preferential_pick(in_deg, count, rng);
            int v = count++;
            add_edge(v, target);
        } else if (r < alpha + beta) {
            int from = preferential_pick(out_deg, count, rng);
            int to = preferential_pick(in_deg, count, rng);
            add_edge(from, to);
        } else {
            int source = preferential_pick(out_deg, count, rng);
            int v = count++;
            add_edge(source, v);
        }
    }
    return a;
}

AdjacencyMatrix generate_network(const NetworkConfig& cfg) {
    cfg.validate();
    switch (cfg.kind) {
        case NetworkKind::erdos_renyi: return gen_er(cfg.n, cfg.er_p, cfg.seed);
        case NetworkKind::watts_strogatz: return gen_ws(cfg.n, cfg.ws_k, cfg.ws_p, cfg.seed);
        case NetworkKind::barabasi_albert: {
            AdjacencyMatrix a = gen_ba_scale_free(cfg.n, cfg.ba_alpha, cfg.ba_beta, cfg.ba_gamma, cfg.seed);
            if (cfg.symmetrize_ba) {
                for (int i = 0; i < a.n(); ++i)
                    for (int j = 0; j < a.n(); ++j)
                        if (a.weights(i, j) != 0.0) a.weights(j, i) = 1.0;
            }
            return a;
        }
    }
    throw std::logic_error("unreachable");
}

bool is_connected(const AdjacencyMatrix& a) {
    int n = a.n();
    if (n == 0) return true;
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int visited = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int j = 0; j < n; ++j) {
            if (!seen[j] && (a.weights(v, j) != 0.0 || a.weights(j, v) != 0.0)) {
                seen[j] = true;
                ++visited;
                stack.push_back(j);
            }
        }
    }
    return visited == n;
}

} // namespace asind

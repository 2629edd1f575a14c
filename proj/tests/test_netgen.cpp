#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <vector>

#include "asind/netgen.hpp"

using namespace asind;

TEST_CASE("er with p=0 is empty, p=1 is complete") {
    AdjacencyMatrix empty = gen_er(4, 0.0, 1);
    CHECK(empty.edge_count() == 0);
    AdjacencyMatrix full = gen_er(4, 1.0, 1);
    CHECK(full.edge_count() == 12);  // 6 undirected edges, both directions
    CHECK(full.is_symmetric());
}

TEST_CASE("er edge count concentrates around p*n*(n-1)/2") {
    // single fixed seed lands in a broad band
    AdjacencyMatrix a = gen_er(16, 0.1, 0);
    int undirected = a.edge_count() / 2;
    CHECK(undirected >= 2);
    CHECK(undirected <= 25);

    // expectation p*C(16,2) = 12, monte-carlo over 1000 seeds
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed)
        total += gen_er(16, 0.1, seed).edge_count() / 2;
    double mean = total / 1000.0;
    CHECK(mean == doctest::Approx(12.0).epsilon(1.0 / 12.0));
}

TEST_CASE("er validates the probability") {
    CHECK_THROWS_AS(gen_er(4, -0.1, 0), std::invalid_argument);
    CHECK_THROWS_AS(gen_er(4, 1.1, 0), std::invalid_argument);
}

TEST_CASE("ws without rewiring is the ring lattice") {
    AdjacencyMatrix ring = gen_ws(6, 2, 0.0, 3);
    for (int i = 0; i < 6; ++i) {
        CHECK(ring.weights.row(i).sum() == 2.0);
        CHECK(ring.weights(i, (i + 1) % 6) == 1.0);
    }
    AdjacencyMatrix lattice = gen_ws(16, 4, 0.0, 3);
    for (int i = 0; i < 16; ++i) CHECK(lattice.weights.row(i).sum() == 4.0);
}

TEST_CASE("ws rewiring conserves the edge count and keeps the graph usable") {
    AdjacencyMatrix a = gen_ws(16, 4, 0.1, 0);
    CHECK(a.edge_count() == 2 * 32);  // n*k/2 undirected edges
    CHECK(a.is_symmetric());
    CHECK(is_connected(a));
    for (std::uint64_t seed = 1; seed <= 50; ++seed)
        CHECK(gen_ws(16, 4, 0.1, seed).edge_count() == 64);
}

TEST_CASE("ws rejects odd or oversized degree") {
    CHECK_THROWS_AS(gen_ws(16, 3, 0.1, 0), std::invalid_argument);
    CHECK_THROWS_AS(gen_ws(4, 4, 0.1, 0), std::invalid_argument);
}

TEST_CASE("scale-free generator starts from the seed cycle") {
    AdjacencyMatrix a = gen_ba_scale_free(3, 0.41, 0.54, 0.05, 0);
    CHECK(a.edge_count() >= 2);
    for (int i = 0; i < 3; ++i) CHECK(a.weights(i, i) == 0.0);
}

TEST_CASE("scale-free output is binary with zero diagonal") {
    AdjacencyMatrix a = gen_ba_scale_free(16, 0.41, 0.54, 0.05, 7);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) {
            CHECK((a.weights(i, j) == 0.0 || a.weights(i, j) == 1.0));
            if (i == j) CHECK(a.weights(i, j) == 0.0);
        }
}

TEST_CASE("scale-free degrees carry a heavy tail") {
    int heavy = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        AdjacencyMatrix a = gen_ba_scale_free(200, 0.41, 0.54, 0.05, seed);
        std::vector<double> degree(200, 0.0);
        for (int i = 0; i < 200; ++i)
            degree[i] = a.weights.row(i).sum() + a.weights.col(i).sum();
        std::sort(degree.begin(), degree.end());
        double median = 0.5 * (degree[99] + degree[100]);
        if (degree.back() >= 3.0 * median) ++heavy;
    }
    CHECK(heavy >= 95);
}

TEST_CASE("scale-free parameters must sum to one") {
    CHECK_THROWS_AS(gen_ba_scale_free(16, 0.5, 0.5, 0.5, 0), std::invalid_argument);
}

TEST_CASE("generators are deterministic in the seed") {
    for (std::uint64_t seed : {0ull, 42ull}) {
        AdjacencyMatrix a = gen_er(16, 0.1, seed);
        AdjacencyMatrix b = gen_er(16, 0.1, seed);
        CHECK(a.weights == b.weights);
        AdjacencyMatrix c = gen_ws(16, 4, 0.1, seed);
        AdjacencyMatrix d = gen_ws(16, 4, 0.1, seed);
        CHECK(c.weights == d.weights);
        AdjacencyMatrix e = gen_ba_scale_free(16, 0.41, 0.54, 0.05, seed);
        AdjacencyMatrix f = gen_ba_scale_free(16, 0.41, 0.54, 0.05, seed);
        CHECK(e.weights == f.weights);
    }
}

TEST_CASE("network config dispatch and validation") {
    NetworkConfig cfg;
    cfg.kind = NetworkKind::watts_strogatz;
    cfg.n = 16;
    cfg.seed = 5;
    AdjacencyMatrix a = generate_network(cfg);
    CHECK(a.edge_count() == 64);

    cfg.kind = NetworkKind::barabasi_albert;
    cfg.ba_alpha = 0.3;  // breaks the sum-to-one invariant
    CHECK_THROWS_AS(generate_network(cfg), std::invalid_argument);

    CHECK_THROWS_AS(network_kind_from_string("smallworld"), std::invalid_argument);
    CHECK(network_kind_from_string("erdos-renyi") == NetworkKind::erdos_renyi);
}

TEST_CASE("symmetrize flag closes directed edges") {
    NetworkConfig cfg;
    cfg.kind = NetworkKind::barabasi_albert;
    cfg.n = 16;
    cfg.seed = 9;
    cfg.symmetrize_ba = true;
    AdjacencyMatrix a = generate_network(cfg);
    CHECK(a.is_symmetric());
}

#include <random>
#include <set>

#include "doctest.h"
#include "mapmatch/common.hpp"
#include "mapmatch/sspd.hpp"

using namespace mapmatch;

namespace {

double exact_diameter(const GeometricGraph& g, std::span<const int> side) {
    double d = 0;
    for (std::size_t i = 0; i < side.size(); ++i) {
        for (std::size_t j = i + 1; j < side.size(); ++j) {
            d = std::max(d, dist(g.vertex(side[i]), g.vertex(side[j])));
        }
    }
    return d;
}

double exact_set_distance(const GeometricGraph& g, std::span<const int> a,
                          std::span<const int> b) {
    double d = std::numeric_limits<double>::infinity();
    for (int u : a) {
        for (int v : b) d = std::min(d, dist(g.vertex(u), g.vertex(v)));
    }
    return d;
}

// Exhaustive coverage check: every unordered pair in exactly one SSPD pair.
void check_coverage(const GeometricGraph& g, const SspdIndex& idx) {
    const int n = g.vertex_count();
    std::vector<std::vector<int>> count(n, std::vector<int>(n, 0));
    for (int p = 0; p < idx.pair_count(); ++p) {
        auto a = idx.node_vertices(idx.pair(p).node_a);
        auto b = idx.node_vertices(idx.pair(p).node_b);
        for (int u : a) {
            for (int v : b) {
                ++count[std::min(u, v)][std::max(u, v)];
            }
        }
    }
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            CHECK(count[u][v] == 1);
        }
    }
}

}  // namespace

TEST_CASE("two vertices give the single pair") {
    GeometricGraph g({{0, 0}, {1, 0}}, {{0, 1}});
    SspdIndex idx = build_sspd(g);
    CHECK(idx.pair_count() == 1);
    auto lk = idx.lookup_pair(0, 1);
    REQUIRE(lk.side_a.size() == 1);
    REQUIRE(lk.side_b.size() == 1);
    CHECK(lk.side_a[0] == 0);
    CHECK(lk.side_b[0] == 1);
    CHECK_THROWS_AS(idx.lookup_pair(1, 1), input_error);
}

TEST_CASE("three collinear vertices are covered exactly once") {
    GeometricGraph g({{0, 0}, {1, 0}, {2, 0}}, {{0, 1}, {1, 2}});
    SspdIndex idx = build_sspd(g);
    check_coverage(g, idx);
}

TEST_CASE("rejects single-vertex input") {
    GeometricGraph g({{0, 0}}, {});
    CHECK_THROWS_AS(build_sspd(g), input_error);
}

TEST_CASE("50-vertex generator graph: coverage, separation, lookup vs scan") {
    GeometricGraph g = generate_network(10, 5, 16.0, 0.25, 2024);
    REQUIRE(g.vertex_count() == 50);
    SspdIndex idx = build_sspd(g);
    check_coverage(g, idx);

    // Separation with exact diameters and set distances.
    for (int p = 0; p < idx.pair_count(); ++p) {
        auto a = idx.node_vertices(idx.pair(p).node_a);
        auto b = idx.node_vertices(idx.pair(p).node_b);
        double lhs = std::min(exact_diameter(g, a), exact_diameter(g, b));
        double rhs = idx.separation() * exact_set_distance(g, a, b);
        CHECK(lhs <= rhs + 1e-12);
    }

    // Lookup agrees with a linear scan over pairs, with u on side_a.
    std::mt19937_64 rng(split_seed(3, 6));
    for (int trial = 0; trial < 200; ++trial) {
        int u = static_cast<int>(rng() % g.vertex_count());
        int v = static_cast<int>(rng() % g.vertex_count());
        if (u == v) continue;
        auto lk = idx.lookup_pair(u, v);
        int found = -1;
        for (int p = 0; p < idx.pair_count() && found < 0; ++p) {
            auto a = idx.node_vertices(idx.pair(p).node_a);
            auto b = idx.node_vertices(idx.pair(p).node_b);
            bool ua = std::find(a.begin(), a.end(), u) != a.end();
            bool vb = std::find(b.begin(), b.end(), v) != b.end();
            bool ub = std::find(b.begin(), b.end(), u) != b.end();
            bool va = std::find(a.begin(), a.end(), v) != a.end();
            if ((ua && vb) || (ub && va)) found = p;
        }
        CHECK(found == lk.pair_id);
        CHECK(std::find(lk.side_a.begin(), lk.side_a.end(), u) != lk.side_a.end());
        CHECK(std::find(lk.side_b.begin(), lk.side_b.end(), v) != lk.side_b.end());
    }

    // Weight and pair counts are recorded.
    CHECK(idx.total_weight() > 0);
    MESSAGE("pairs=", idx.pair_count(), " weight=", idx.total_weight(),
            " n=", g.vertex_count());
}

#include <random>

#include "doctest.h"
#include "mapmatch/common.hpp"
#include "mapmatch/freespace.hpp"
#include "oracles.hpp"

using namespace mapmatch;

namespace {

// u --- m --- w with m lifted off the chord.
GeometricGraph chain_graph(double lift) {
    return GeometricGraph({{0, 0}, {1, lift}, {2, 0}}, {{0, 1}, {1, 2}});
}

}  // namespace

TEST_CASE("fixed endpoints: trivial cases") {
    GeometricGraph g = chain_graph(1.0);
    // Empty path against a degenerate segment at the vertex location.
    CHECK(match_fixed_endpoints_decide(g, 0, 0, {{0, 0}, {0, 0}}, 0.0));
    CHECK(!match_fixed_endpoints_decide(g, 0, 0, {{0.5, 0}, {0.5, 0}}, 0.25));
    // A path graph matching its own geometry at r = 0.
    GeometricGraph path({{0, 0}, {1, 0}, {2, 0}}, {{0, 1}, {1, 2}});
    CHECK(match_fixed_endpoints_decide(path, 0, 2, {{0, 0}, {2, 0}}, 0.0));
    CHECK(match_fixed_endpoints(path, 0, 2, {{0, 0}, {2, 0}}, 1e-9) ==
          doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("fixed endpoints: chain against its chord") {
    // The only path passes the lifted middle vertex; optimum equals the lift.
    for (double lift : {0.5, 1.0, 2.5}) {
        GeometricGraph g = chain_graph(lift);
        double v = match_fixed_endpoints(g, 0, 2, {{0, 0}, {2, 0}}, 1e-9);
        CHECK(v == doctest::Approx(lift).epsilon(1e-8));
    }
}

TEST_CASE("fixed endpoints: decision agrees with the walk oracle on a detour graph") {
    // Square detour: direct edge u-w plus a loop through two off-chord nodes.
    GeometricGraph g({{0, 0}, {2, 0}, {0.7, 0.8}, {1.3, 0.8}},
                     {{0, 1}, {0, 2}, {2, 3}, {3, 1}});
    oracle::WalkOracle wo(g, 0.02);
    Segment ab{{0, 0}, {2, 0}};
    std::mt19937_64 rng(split_seed(5, 4));
    for (double r : {0.05, 0.2, 0.5, 0.79, 0.81, 1.2}) {
        bool engine = match_fixed_endpoints_decide(g, 0, 1, ab, r);
        double opt = wo.match(Polyline({ab.a, ab.b}), 0.02, 0, 1);
        // oracle value sits within ~2 spacings above the true optimum
        if (opt <= r) CHECK(engine);
        if (opt > r + 0.06) CHECK(!engine);
    }
    double v = match_fixed_endpoints(g, 0, 1, ab, 1e-9);
    CHECK(v == doctest::Approx(0.0).epsilon(1e-9));  // the direct edge matches exactly
    double vdetour = match_fixed_endpoints(g, 0, 3, {{0, 0}, {1.3, 0.8}}, 1e-9);
    double odetour = wo.match(Polyline({{0, 0}, {1.3, 0.8}}), 0.02, 0, 3);
    CHECK(vdetour <= odetour + 1e-9);
    CHECK(vdetour >= odetour - 0.07);
}

TEST_CASE("match_exact: trivial and single point cases") {
    GeometricGraph g = chain_graph(0.0);
    // Trajectory equal to a path's geometry.
    CHECK(match_exact(g, Polyline({{0, 0}, {1, 0}, {2, 0}}), 1e-9) ==
          doctest::Approx(0.0).epsilon(1e-9));
    // Single point at distance 2 from the nearest vertex: single-vertex
    // paths are allowed, so the answer is that distance.
    CHECK(match_exact(g, Polyline({{1, 2}}), 1e-9) == doctest::Approx(2.0));
    CHECK_THROWS_AS(match_exact(g, Polyline({{0, 0}}), 0.0), input_error);
}

TEST_CASE("match_exact agrees with the walk oracle on random instances") {
    std::mt19937_64 rng(split_seed(17, 5));
    for (int trial = 0; trial < 6; ++trial) {
        GeometricGraph g = generate_network(5, 4, 16.0, 0.2, 100 + trial);
        double spacing = 0.05;
        oracle::WalkOracle wo(g, spacing);
        std::uniform_real_distribution<double> off(-0.4, 0.4);
        std::vector<Point> pts;
        int q = 4 + static_cast<int>(rng() % 3);
        int v = static_cast<int>(rng() % g.vertex_count());
        for (int i = 0; i < q; ++i) {
            Point p = g.vertex(v);
            pts.push_back({p.x + off(rng), p.y + off(rng)});
            const auto& nbrs = g.neighbors(v);
            v = nbrs[rng() % nbrs.size()].to;
        }
        Polyline Q(pts);
        double engine = match_exact(g, Q, 1e-9);
        double approx = wo.match(Q, spacing);
        CHECK(engine <= approx + 1e-9);                  // oracle never beats the optimum
        CHECK(engine >= approx - 3 * spacing - 1e-9);    // and is within resolution above it
    }
}

TEST_CASE("match_exact decision is monotone in r") {
    GeometricGraph g = generate_network(4, 4, 16.0, 0.25, 77);
    Polyline Q({{0.2, 0.1}, {1.4, 0.3}, {2.2, 1.1}, {2.9, 2.2}});
    double v = match_exact(g, Q, 1e-9);
    FreespaceMatcher m(g);
    CHECK(m.decide_exact(Q, v * 1.0001 + 1e-12));
    CHECK(!m.decide_exact(Q, v * 0.98));
    CHECK(m.decide_exact(Q, v * 3.7));
}

TEST_CASE("match_exact never beats fixed-endpoint optima") {
    GeometricGraph g = generate_network(4, 4, 16.0, 0.25, 31);
    Polyline Q({{0.5, 0.2}, {2.5, 0.4}});
    Segment ab{Q.front(), Q.back()};
    double open = match_exact(g, Q, 1e-9);
    FreespaceMatcher m(g);
    for (int u = 0; u < g.vertex_count(); u += 3) {
        for (int w = 0; w < g.vertex_count(); w += 4) {
            double fixed = m.match_fixed_endpoints(u, w, ab, 1e-9);
            CHECK(open <= fixed * (1 + 1e-9) + 1e-12);
        }
    }
}

#include <random>

#include "doctest.h"
#include "mapmatch/common.hpp"
#include "mapmatch/freespace.hpp"
#include "mapmatch/gadgets.hpp"

using namespace mapmatch;

TEST_CASE("base curves match the published coordinates") {
    double h = 0.01;
    Polyline a1 = base_curve(BaseCurveKind::one_a, h);
    std::vector<Point> expect{{0, 0}, {12, 0}, {12, h}, {6, h}, {6, 2 * h}, {18, 2 * h}};
    REQUIRE(a1.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) {
        CHECK(a1[i].x == expect[i].x);
        CHECK(a1[i].y == expect[i].y);
    }
    CHECK_THROWS_AS(base_curve(BaseCurveKind::one_a, 0.0), input_error);
}

TEST_CASE("base curve distances at h = 0.01") {
    double h = 0.01;
    Polyline a0 = base_curve(BaseCurveKind::zero_a, h);
    Polyline a1 = base_curve(BaseCurveKind::one_a, h);
    Polyline b0 = base_curve(BaseCurveKind::zero_b, h);
    Polyline b1 = base_curve(BaseCurveKind::one_b, h);
    CHECK(frechet_distance(a0, b0, 1e-7) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(frechet_distance(a0, b1, 1e-7) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(frechet_distance(a1, b0, 1e-7) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(frechet_distance(a1, b1, 1e-7) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("ov brute force and forcing") {
    OvInstance yes;
    yes.d = 1;
    yes.a = {{0}};
    yes.b = {{1}};
    CHECK(yes.brute_force_yes());
    OvInstance no;
    no.d = 1;
    no.a = {{1}};
    no.b = {{1}};
    CHECK(!no.brute_force_yes());
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        CHECK(random_ov(3, 3, 3, seed, 1).brute_force_yes());
        CHECK(!random_ov(3, 3, 3, seed, 2).brute_force_yes());
    }
    CHECK_THROWS_AS(random_ov(0, 1, 1, 0), input_error);
}

TEST_CASE("gadget instances are connected, planar, and sized as expected") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        OvInstance ov = random_ov(3, 3, 2, seed);
        GadgetInstance gi = build_gadget(ov);
        CHECK(gi.is_yes == ov.brute_force_yes());
        // Size accounting: |P| = Theta(d n), |Q| = Theta(d m).
        int p = gi.graph.complexity();
        int q = static_cast<int>(gi.trajectory.size());
        CHECK(p >= 6 * ov.d * static_cast<int>(ov.a.size()));
        CHECK(p <= 40 * ov.d * static_cast<int>(ov.a.size()) + 80);
        CHECK(q >= 6 * ov.d * static_cast<int>(ov.b.size()));
        CHECK(q <= 20 * ov.d * static_cast<int>(ov.b.size()) + 40);
        // Planarity scan: crossings only at shared endpoints.
        for (int e = 0; e < gi.graph.edge_count(); ++e) {
            for (int f = e + 1; f < gi.graph.edge_count(); ++f) {
                CHECK(!segments_cross(gi.graph.edge_segment(e), gi.graph.edge_segment(f)));
            }
        }
    }
    // d = 1 exercises the bow connectors.
    OvInstance ov1 = random_ov(3, 2, 1, 9);
    GadgetInstance gi1 = build_gadget(ov1);
    for (int e = 0; e < gi1.graph.edge_count(); ++e) {
        for (int f = e + 1; f < gi1.graph.edge_count(); ++f) {
            CHECK(!segments_cross(gi1.graph.edge_segment(e), gi1.graph.edge_segment(f)));
        }
    }
}

TEST_CASE("yes and no instances keep the gap") {
    // Orthogonal singletons: YES.
    OvInstance yes;
    yes.d = 2;
    yes.a = {{1, 0}, {0, 1}};
    yes.b = {{0, 1}, {1, 0}};
    REQUIRE(yes.brute_force_yes());
    GadgetInstance gy = build_gadget(yes);
    GapResult ry = verify_gap(gy, 1e-7);
    CHECK(ry.value <= 1.001 * (1 + 1e-7));
    CHECK(ry.gap_ok);

    // All-ones vectors: NO.
    OvInstance no;
    no.d = 2;
    no.a = {{1, 1}, {1, 1}};
    no.b = {{1, 1}, {1, 1}};
    REQUIRE(!no.brute_force_yes());
    GadgetInstance gn = build_gadget(no);
    GapResult rn = verify_gap(gn, 1e-7);
    CHECK(rn.value >= 3.0 / (1 + 1e-7));
    CHECK(rn.gap_ok);
}

TEST_CASE("random tiny instances always satisfy the gap") {
    std::mt19937_64 rng(split_seed(81, 18));
    for (int trial = 0; trial < 10; ++trial) {
        int n = 1 + static_cast<int>(rng() % 3);
        int m = 1 + static_cast<int>(rng() % 3);
        int d = 1 + static_cast<int>(rng() % 3);
        GadgetInstance gi = build_gadget(random_ov(n, m, d, 4000 + trial));
        GapResult res = verify_gap(gi, 1e-7);
        CHECK(res.gap_ok);
    }
}

TEST_CASE("oversized instances are refused") {
    GadgetInstance gi = build_gadget(random_ov(2, 2, 2, 5));
    CHECK_THROWS_AS(verify_gap(gi, 1e-7, 10), input_error);
}

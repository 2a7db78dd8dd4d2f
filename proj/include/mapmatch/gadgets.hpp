#ifndef MAPMATCH_GADGETS_HPP
#define MAPMATCH_GADGETS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "mapmatch/graph.hpp"

namespace mapmatch {

enum class BaseCurveKind { one_a, zero_a, zero_b, one_b };

// The four six-vertex gadget curves; distances between A/B kinds are 1
// except d_F(1_A, 1_B) = 3.
Polyline base_curve(BaseCurveKind kind, double h);

struct OvInstance {
    std::vector<std::vector<int>> a;  // entries in {0,1}
    std::vector<std::vector<int>> b;
    int d = 0;

    bool brute_force_yes() const;
};

// force: 0 = plain random, 1 = plant an orthogonal pair, 2 = forbid them.
OvInstance random_ov(int n, int m, int d, std::uint64_t seed, int force = 0);

struct GadgetInstance {
    GeometricGraph graph;
    Polyline trajectory;
    double h = 0.0;
    bool is_yes = false;
};

// Orthogonal-vectors lower-bound instance: graph from curves U, V and T_i
// with their connectors, trajectory from the W_j blocks. h <= 0 selects a
// default small enough to keep the YES side under 1.001.
GadgetInstance build_gadget(const OvInstance& ov, double h = 0.0);

struct GapResult {
    double value = 0.0;
    bool gap_ok = false;
};

// Runs the exact matcher and checks the YES <= 1.001 / NO >= 3 gap.
// Instances with graph complexity * trajectory complexity above the cap are
// refused.
GapResult verify_gap(const GadgetInstance& gi, double rel_tol,
                     std::size_t complexity_cap = 4'000'000);

}  // namespace mapmatch

#endif

#ifndef MAPMATCH_TRANSIT_HPP
#define MAPMATCH_TRANSIT_HPP

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "mapmatch/freespace.hpp"
#include "mapmatch/graph.hpp"
#include "mapmatch/sspd.hpp"

namespace mapmatch {

// Transit vertices of one semi-separated pair: every path from side_a to
// side_b passes through one of them. Obtained from the sink side of a
// unit-capacity min cut.
struct TransitSet {
    int pair_id = -1;
    std::vector<int> cut_vertices;
    int flow_value = 0;
    // Ball certifying c >= flow/2 via the annulus argument; radius 0 when the
    // chosen side is a singleton (degree witnesses cover that case).
    Point witness_center;
    double witness_radius = 0.0;
};

TransitSet compute_transit_vertices(const GeometricGraph& g, const SspdIndex& sspd, int pair_id);

// Precomputed min-Fréchet values for transit pairs, keyed by unordered
// vertex pair (the value is reversal-invariant).
struct TransitDistanceTable {
    std::unordered_map<std::uint64_t, double> entries;
    std::size_t enumerated_pairs = 0;  // sum over pairs of |A u B| * |C|

    static std::uint64_t key(int u, int w) {
        if (u > w) std::swap(u, w);
        return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(w);
    }
    double lookup(int u, int w) const;
};

TransitDistanceTable precompute_transit_distances(const GeometricGraph& g, const SspdIndex& sspd,
                                                  const std::vector<TransitSet>& transit_sets,
                                                  double rel_tol, bool parallel);

// Stage-1 index: SSPD + transit sets + distance table.
struct Stage1Index {
    SspdIndex sspd;
    std::vector<TransitSet> transit_sets;
    TransitDistanceTable table;
    double rel_tol = 1e-9;
    // Sampled packedness estimate, raised by the min-cut witness balls so
    // that |C_i| <= 2 * c_estimate holds for every pair.
    double c_estimate = 0.0;
    Point witness_center;
    double witness_radius = 0.0;
};

Stage1Index build_stage1(const GeometricGraph& g, double rel_tol, std::uint64_t seed,
                         bool parallel, int packedness_samples = 64);

// Theorem-2 query: min over transit vertices w of max(D_uw, D_wv) + D_w with
// D_w the distance from w to segment uv. Returns 0 when u == v.
double straightest_path_query(const GeometricGraph& g, const Stage1Index& idx, int u, int v);

// Variant against an arbitrary query segment; D_w becomes d_F(uw o wv, ab).
double straightest_path_query_segment(const GeometricGraph& g, const Stage1Index& idx, int u,
                                      int v, const Segment& ab, double rel_tol);

}  // namespace mapmatch

#endif

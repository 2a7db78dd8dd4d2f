#ifndef MAPMATCH_SEGMENT_INDEX_HPP
#define MAPMATCH_SEGMENT_INDEX_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "mapmatch/transit.hpp"

namespace mapmatch {

// Gonzales farthest-point ordering under the graph metric. radius[k] is the
// covering radius after k+1 centers; radii are non-increasing.
struct ClusterHierarchy {
    std::vector<int> order;
    std::vector<double> radius;
    std::vector<int> rank;  // vertex -> position in order
};

ClusterHierarchy build_cluster_hierarchy(const GeometricGraph& g);

// 3D orthogonal range reporting over (x, y, radius) with exact box
// semantics; answers match a linear scan.
class RangeIndex3D {
  public:
    void build(std::vector<std::array<double, 3>> pts);
    // ids with x in [x0,x1], y in [y0,y1], z >= zmin; ascending id order.
    std::vector<int> query(double x0, double x1, double y0, double y1, double zmin) const;

  private:
    struct Node {
        double x, y, z;
        int id;
    };
    std::vector<Node> nodes_;  // kd layout: median at the range midpoint
    void build_range(int begin, int end, int axis);
    void query_range(int begin, int end, int axis, double x0, double x1, double y0, double y1,
                     double zmin, std::vector<int>& out) const;
};

struct CandidateVertexSet {
    std::vector<int> anchors;
};

// Stage-2 index: per-transit-pair exponential grid stores, the Gonzales
// hierarchy with its range index, and the segment map-matching query.
//
// Grid-store values are materialized on first use: the full snapped-pair
// table per transit pair is astronomically large at practical eps, while the
// set of cells a workload touches is small. Values are deterministic
// regardless of evaluation order, so persisted and recomputed entries agree
// bit-exactly.
class SegmentIndex {
  public:
    SegmentIndex(const GeometricGraph& g, const Stage1Index& s1, double eps);

    double eps() const { return eps_; }
    double eps_prime() const { return eps_ / 6.0; }
    const ClusterHierarchy& hierarchy() const { return hierarchy_; }
    const RangeIndex3D& range_index() const { return range_index_; }

    // Lemma-5 lookup for one transit pair (u, w): a (1+eps')-approximation of
    // min over u-w paths of d_F(path, s), via the snapped segment's stored
    // value plus the exact snap compensation (keeps it an upper bound
    // attained by a real path).
    double grid_value(int u, int w, const Segment& s) const;

    // Lemma-6 query: 3-approximation to locate the scale, then transit split
    // points on the chord, combining two grid lookups per candidate.
    double query_fixed_endpoints_eps(int u, int v, const Segment& ab) const;

    // Cutoff-aware variant: callers that only compare the value against a
    // threshold can stop early. `exact` is false when the evaluation was
    // truncated; the value is then still an upper bound backed by a real
    // path (or the 3-approximation when it already refutes the cutoff).
    struct EpsValue {
        double value;
        bool exact;
    };
    EpsValue query_fixed_endpoints_eps_bounded(int u, int v, const Segment& ab,
                                               double cutoff) const;

    // Lemma-7/8 candidate anchors: range query on the concentric square of
    // side 4r at threshold eps_cov*r, plus the first center whose Gonzales
    // radius drops below the threshold.
    CandidateVertexSet candidate_vertices(Point center, double r, double eps_cov) const;

    // Theorem-3 segment map-matching: bisection over the three-case decision.
    double segment_query(const Segment& ab, double rel_tol) const;

    // Persistence hooks for the lazy store.
    struct GridEntry {
        std::uint64_t key_hi, key_lo;
        double value;
    };
    std::vector<GridEntry> export_grid_entries() const;
    void import_grid_entries(const std::vector<GridEntry>& entries);
    std::size_t grid_entry_count() const;
    std::size_t grid_miss_count() const;

  private:
    const GeometricGraph* g_;
    const Stage1Index* s1_;
    double eps_;

    ClusterHierarchy hierarchy_;
    RangeIndex3D range_index_;

    // Internal approximation constants (fractions of eps').
    double snap_kappa_ = 1.0 / 3.0;   // grid cell = kappa * eps' * scale
    double chord_step_ = 0.5;         // split-point spacing = step * eps' * r3
    double grid_rel_tol_ = 1e-4;      // store-entry bisection tolerance

    struct KeyHash {
        std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const {
            std::uint64_t h = k.first * 0x9e3779b97f4a7c15ULL ^ (k.second + 0x7f4a7c15ULL);
            h ^= h >> 33;
            h *= 0xff51afd7ed558ccdULL;
            h ^= h >> 33;
            return static_cast<std::size_t>(h);
        }
    };
    mutable std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, double, KeyHash> cache_;
    mutable std::size_t misses_ = 0;
    mutable std::unique_ptr<FreespaceMatcher> matcher_;
    mutable std::mutex mu_;

    int nearest_vertex(Point p) const;

    struct Decision {
        int kind;      // 0 feasible, 1 infeasible, 2 window
        double r_min;  // best candidate value seen (real-path upper bound)
    };
    Decision segment_decide(const Segment& ab, double r,
                            std::unordered_map<std::uint64_t, EpsValue>& pair_memo) const;
};

}  // namespace mapmatch

#endif

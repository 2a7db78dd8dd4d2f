#ifndef MAPMATCH_TRAJECTORY_INDEX_HPP
#define MAPMATCH_TRAJECTORY_INDEX_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "mapmatch/segment_index.hpp"

namespace mapmatch {

// Per-edge trough {(x,y,z) : d((x,y),e) <= 4z <= 8/eps * |e|} registered in a
// hierarchical 3D grid (one level per trough size class). Stabbing queries
// filter the level-local candidates exactly, so reports equal a linear scan.
class TroughIndex {
  public:
    TroughIndex() = default;
    TroughIndex(const GeometricGraph& g, double eps);

    double eps() const { return eps_; }
    bool contains(int edge, double x, double y, double z) const;
    // Edges whose trough contains (x, y, z), ascending.
    std::vector<int> stab(double x, double y, double z) const;

  private:
    const GeometricGraph* g_ = nullptr;
    double eps_ = 0.0;
    struct CellKey {
        int level, ix, iy, iz;
        bool operator==(const CellKey&) const = default;
    };
    struct CellHash {
        std::size_t operator()(const CellKey& k) const {
            std::uint64_t h = 1469598103934665603ULL;
            for (int v : {k.level, k.ix, k.iy, k.iz}) {
                h ^= static_cast<std::uint32_t>(v);
                h *= 1099511628211ULL;
            }
            return static_cast<std::size_t>(h);
        }
    };
    std::unordered_map<CellKey, std::vector<int>, CellHash> cells_;
    std::vector<int> levels_;  // distinct occupied levels, ascending
};

TroughIndex build_trough_index(const GeometricGraph& g, double eps);

struct CandidatePoint {
    GraphPoint gp;
    Point pos;
    bool from_vertex;  // vertex anchor vs edge sample
};

// Certified result of a map-matching query: the threshold is attained by the
// witness layered path over the final decision's candidate sets.
struct MatchDiagnostics {
    double value = 0.0;
    std::vector<std::vector<CandidatePoint>> layers;
    std::vector<int> witness;  // index into each layer, one per trajectory vertex
};

// Stage-3 index: trough stabbing for long-near edges, candidate match points
// per trajectory vertex, and the capacity-DAG decision with bisection.
class TrajectoryIndex {
  public:
    TrajectoryIndex(const GeometricGraph& g, const Stage1Index& s1, const SegmentIndex& s2,
                    double eps);

    double eps() const { return eps_; }
    double eps_prime() const { return eps_ / 9.0; }
    // Coverage parameter for candidate sets (fraction of eps; the decision
    // thresholds stay at eps/9).
    double eps_cov() const { return eps_ / 6.0; }
    const TroughIndex& troughs() const { return troughs_; }

    // Lemma-9 candidate points for one trajectory vertex: vertex anchors
    // covering at eps_cov/2, plus evenly spaced samples on long-near edges
    // clipped to the concentric square of side 4r.
    std::vector<CandidatePoint> candidate_points(Point a, double r) const;

    // Theorem-1 arc capacity between consecutive-layer candidates. Same-edge
    // pairs use the exact segment formula; cross-edge pairs take the best of
    // the four endpoint pairings against the clipped subsegment. +inf when no
    // pairing admits the clipping at threshold r.
    double edge_arc_capacity(const CandidatePoint& b1, const CandidatePoint& b2, Point a1,
                             Point a2, double r) const;

    // Full map-matching query; the result is always certified by a feasible
    // layered path (diagnostics carry it when requested).
    double map_match_query(const Polyline& Q, double rel_tol,
                           MatchDiagnostics* diag = nullptr) const;

  private:
    const GeometricGraph* g_;
    const Stage1Index* s1_;
    const SegmentIndex* s2_;
    double eps_;
    TroughIndex troughs_;

    // Staged capacity evaluation: upper is a certified capacity upper bound
    // (real-path backed); complete marks it as the exact capacity. The sweep
    // only needs threshold comparisons, so most arcs are settled by the
    // same-edge formula or a 3-approximation refutation without touching the
    // grid stores.
    struct CapEntry {
        double upper = std::numeric_limits<double>::infinity();
        bool complete = false;
    };
    double same_edge_value(const CandidatePoint& b1, const CandidatePoint& b2, Point a1,
                           Point a2) const;
    // Cross-edge part only; callers must have checked the endpoint filters.
    bool cross_admissible(const CandidatePoint& b1, const CandidatePoint& b2, Point a1,
                          Point a2, double r_clip, double r_prime, CapEntry& entry) const;

    struct DecisionResult {
        bool feasible = false;
        std::vector<int> witness;
    };
    DecisionResult sweep(const Polyline& Q,
                         const std::vector<std::vector<CandidatePoint>>& layers, double r,
                         double r_prime,
                         std::unordered_map<std::uint64_t, CapEntry>& cap_memo) const;
};

}  // namespace mapmatch

#endif

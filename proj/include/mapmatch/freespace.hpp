#ifndef MAPMATCH_FREESPACE_HPP
#define MAPMATCH_FREESPACE_HPP

#include <cstdint>
#include <vector>

#include "mapmatch/graph.hpp"

namespace mapmatch {

// Matching engine over the free-space surface of a graph against a curve.
// A single instance holds scratch buffers and is not safe for concurrent
// use; distinct instances over a shared immutable graph are.
class FreespaceMatcher {
  public:
    explicit FreespaceMatcher(const GeometricGraph& g);

    const GeometricGraph& graph() const { return *g_; }

    // True iff some path from u to w has d_F(path, ab) <= r. Dijkstra over
    // per-edge free-space cells with priority = position along ab; the
    // single-vertex path is allowed when u == w.
    bool decide_fixed(int u, int w, const Segment& ab, double r);

    // Bisection minimization of min over u-w paths of d_F(path, ab).
    double match_fixed_endpoints(int u, int w, const Segment& ab, double rel_tol);

    // True iff some path between graph vertices has d_F(path, Q) <= r.
    // Multi-source variant: every vertex within r of Q's start seeds the
    // search, and any vertex whose free space covers the tail of Q accepts.
    bool decide_exact(const Polyline& Q, double r);

    // Bisection minimization over all vertex-to-vertex paths.
    double match_exact(const Polyline& Q, double rel_tol);

  private:
    const GeometricGraph* g_;

    // Segment fast path: epoch-stamped reach values per vertex.
    std::vector<double> reach_;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
    std::vector<std::pair<double, int>> heap_;

    // Surface search state (sized on demand): best value per vertex-cell and
    // per half-edge-boundary state.
    std::vector<double> best_v_;
    std::vector<double> best_h_;
    std::vector<double> tail_start_;
};

// Convenience wrappers constructing a matcher per call.
bool match_fixed_endpoints_decide(const GeometricGraph& g, int u, int w, const Segment& ab,
                                  double r);
double match_fixed_endpoints(const GeometricGraph& g, int u, int w, const Segment& ab,
                             double rel_tol);
bool match_exact_decide(const GeometricGraph& g, const Polyline& Q, double r);
double match_exact(const GeometricGraph& g, const Polyline& Q, double rel_tol);

}  // namespace mapmatch

#endif

#include "mapmatch/freespace.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <queue>

#include "mapmatch/common.hpp"

namespace mapmatch {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

FreespaceMatcher::FreespaceMatcher(const GeometricGraph& g) : g_(&g) {
    reach_.assign(g.vertex_count(), kInf);
    stamp_.assign(g.vertex_count(), 0);
}

bool FreespaceMatcher::decide_fixed(int u, int w, const Segment& ab, double r) {
    if (!(r >= 0)) return false;
    const GeometricGraph& g = *g_;
    Interval fu = free_interval(g.vertex(u), ab, r);
    if (!fu.contains(0.0)) return false;
    Interval fw = free_interval(g.vertex(w), ab, r);
    if (fw.empty() || fw.hi < 1.0) return false;
    // Accepting at w only needs [y, 1] free there; the free portion is a
    // single interval, so reaching w at all suffices once d(w, b) <= r.
    if (u == w) return true;

    ++epoch_;
    heap_.clear();
#ifndef NDEBUG
    std::vector<int> parent(g.vertex_count(), -1);
#endif
    auto relax = [&](int v, double y, [[maybe_unused]] int from) {
        if (stamp_[v] != epoch_ || y < reach_[v]) {
            stamp_[v] = epoch_;
            reach_[v] = y;
#ifndef NDEBUG
            parent[v] = from;
#endif
            heap_.push_back({y, v});
            std::push_heap(heap_.begin(), heap_.end(), std::greater<>{});
        }
    };
    relax(u, 0.0, -1);
    while (!heap_.empty()) {
        std::pop_heap(heap_.begin(), heap_.end(), std::greater<>{});
        auto [y, v] = heap_.back();
        heap_.pop_back();
        if (stamp_[v] != epoch_ || y > reach_[v]) continue;
#ifndef NDEBUG
        // Certify the popped state by replaying its predecessor chain: the
        // monotone free-space path exists iff every hop's exit recomputes to
        // the recorded reach value.
        for (int c = v; parent[c] >= 0; c = parent[c]) {
            int p = parent[c];
            Interval fi = free_interval(g.vertex(c), ab, r);
            assert(!fi.empty());
            assert(reach_[p] <= reach_[c] + 1e-12);
            assert(std::max(reach_[p], fi.lo) <= reach_[c] + 1e-12);
        }
#endif
        if (v == w) return true;
        for (const auto& h : g.neighbors(v)) {
            if (stamp_[h.to] == epoch_ && reach_[h.to] <= y) continue;
            Interval fr = free_interval(g.vertex(h.to), ab, r);
            if (fr.empty()) continue;
            double y2 = std::max(y, fr.lo);
            if (y2 > fr.hi) continue;
            relax(h.to, y2, v);
        }
    }
    return false;
}

double FreespaceMatcher::match_fixed_endpoints(int u, int w, const Segment& ab, double rel_tol) {
    if (!(rel_tol > 0)) throw input_error("rel_tol must be positive");
    const GeometricGraph& g = *g_;
    double lo = std::max(dist(g.vertex(u), ab.a), dist(g.vertex(w), ab.b));
    double hi = lo;
    for (const Point& p : g.vertices()) {
        hi = std::max(hi, std::max(dist(p, ab.a), dist(p, ab.b)));
    }
    if (hi <= lo) hi = lo;
    double v = minimize_monotone([&](double r) { return decide_fixed(u, w, ab, r); }, lo,
                                 hi * (1 + 1e-12) + 1e-300, rel_tol);
    return std::max(v, lo);
}

namespace {

// Surface states for a q-vertex curve: vertex states (v, cell j) hold the
// lowest reachable curve parameter at vertex v within cell j; half-edge
// states (he, j) hold the lowest reachable position along the oriented edge
// on the boundary at curve vertex j+1.
struct SurfaceItem {
    double priority;
    std::int64_t id;  // even: vertex state, odd: half-edge state
    friend bool operator>(const SurfaceItem& a, const SurfaceItem& b) {
        return a.priority > b.priority || (a.priority == b.priority && a.id > b.id);
    }
};

}  // namespace

bool FreespaceMatcher::decide_exact(const Polyline& Q, double r) {
    if (!(r >= 0)) return false;
    const GeometricGraph& g = *g_;
    const int nv = g.vertex_count();
    if (Q.size() == 1) {
        for (int v = 0; v < nv; ++v) {
            if (dist(g.vertex(v), Q[0]) <= r) return true;
        }
        return false;
    }
    const int cells = static_cast<int>(Q.segment_count());

    auto vfree = [&](int v, int j) { return free_interval(g.vertex(v), Q.segment(j), r); };

    // tail_start_[v]: least parameter t with [t, q-1] entirely inside v's
    // free space; +inf when v cannot match the end of Q.
    tail_start_.assign(nv, kInf);
    for (int v = 0; v < nv; ++v) {
        Interval iv = vfree(v, cells - 1);
        if (iv.empty() || iv.hi < 1.0) continue;
        double ts = (cells - 1) + iv.lo;
        for (int j = cells - 2; j >= 0; --j) {
            if (ts > j + 1) break;  // run already broken at the corner
            Interval fj = vfree(v, j);
            if (fj.empty() || fj.hi < 1.0) break;
            ts = j + fj.lo;
        }
        tail_start_[v] = ts;
    }

    best_v_.assign(static_cast<std::size_t>(nv) * cells, kInf);
    const int half_edges = 2 * g.edge_count();
    best_h_.assign(static_cast<std::size_t>(half_edges) * cells, kInf);

    std::priority_queue<SurfaceItem, std::vector<SurfaceItem>, std::greater<>> pq;
    auto relax_v = [&](int v, int j, double y) {
        std::size_t k = static_cast<std::size_t>(v) * cells + j;
        if (y < best_v_[k]) {
            best_v_[k] = y;
            pq.push({y, 2 * static_cast<std::int64_t>(k)});
        }
    };
    auto relax_h = [&](int he, int j, double x) {
        std::size_t k = static_cast<std::size_t>(he) * cells + j;
        if (x < best_h_[k]) {
            best_h_[k] = x;
            pq.push({static_cast<double>(j + 1), 2 * static_cast<std::int64_t>(k) + 1});
        }
    };

    for (int v = 0; v < nv; ++v) {
        Interval f0 = vfree(v, 0);
        if (!f0.empty() && f0.lo <= 0.0) relax_v(v, 0, 0.0);
    }

    auto oriented_free = [&](int he, int jboundary) {
        int e = he / 2;
        Segment s = g.edge_segment(e);
        if (he & 1) s = s.reversed();
        return free_interval(Q[jboundary], s, r);
    };

    while (!pq.empty()) {
        auto [prio, id] = pq.top();
        pq.pop();
        std::size_t k = static_cast<std::size_t>(id / 2);
        if (id % 2 == 0) {
            int v = static_cast<int>(k / cells);
            int j = static_cast<int>(k % cells);
            double y = best_v_[k];
            if (prio > y) continue;
            // [y, end] is free at v exactly when y falls inside the tail run.
            if (y >= tail_start_[v]) return true;
            Interval fv = vfree(v, j);
            for (const auto& h : g.neighbors(v)) {
                // Exit at the far endpoint within this cell.
                Interval fr = vfree(h.to, j);
                if (!fr.empty()) {
                    double y2 = std::max(y, j + fr.lo);
                    if (y2 <= j + fr.hi) relax_v(h.to, j, y2);
                }
                // Enter the edge's next cell through the top boundary; every
                // free position is reachable from a left-boundary entry.
                if (j + 1 < cells) {
                    int he = 2 * h.edge + (g.edge(h.edge).first == v ? 0 : 1);
                    Interval ft = oriented_free(he, j + 1);
                    if (!ft.empty()) relax_h(he, j, ft.lo);
                }
            }
            // Wait at v across the cell corner.
            if (j + 1 < cells && fv.hi >= 1.0) {
                Interval fn = vfree(v, j + 1);
                if (!fn.empty() && fn.lo <= 0.0) relax_v(v, j + 1, j + 1);
            }
        } else {
            int he = static_cast<int>(k / cells);
            int j = static_cast<int>(k % cells);
            double bx = best_h_[k];
            int v_far = (he & 1) ? g.edge(he / 2).first : g.edge(he / 2).second;
            // From a bottom entry every free point of the right boundary of
            // cell j+1 is reachable.
            Interval fr = vfree(v_far, j + 1);
            if (!fr.empty()) relax_v(v_far, j + 1, (j + 1) + fr.lo);
            if (j + 2 < cells) {
                Interval ft = oriented_free(he, j + 2);
                if (!ft.empty()) {
                    double x2 = std::max(bx, ft.lo);
                    if (x2 <= ft.hi) relax_h(he, j + 1, x2);
                }
            }
        }
    }
    return false;
}

double FreespaceMatcher::match_exact(const Polyline& Q, double rel_tol) {
    if (!(rel_tol > 0)) throw input_error("rel_tol must be positive");
    const GeometricGraph& g = *g_;
    double start_best = kInf, end_best = kInf;
    for (const Point& p : g.vertices()) {
        start_best = std::min(start_best, dist(p, Q.front()));
        end_best = std::min(end_best, dist(p, Q.back()));
    }
    if (Q.size() == 1) return start_best;
    double lo = std::max(start_best, end_best);
    // Single-vertex paths give a cheap feasible upper bound.
    double hi = kInf;
    for (const Point& p : g.vertices()) {
        double worst = 0.0;
        for (const Point& a : Q.vertices()) worst = std::max(worst, dist(p, a));
        hi = std::min(hi, worst);
    }
    hi = std::max(hi, lo);
    double v = minimize_monotone([&](double r) { return decide_exact(Q, r); }, lo,
                                 hi * (1 + 1e-12) + 1e-300, rel_tol);
    return std::max(v, lo);
}

bool match_fixed_endpoints_decide(const GeometricGraph& g, int u, int w, const Segment& ab,
                                  double r) {
    FreespaceMatcher m(g);
    return m.decide_fixed(u, w, ab, r);
}

double match_fixed_endpoints(const GeometricGraph& g, int u, int w, const Segment& ab,
                             double rel_tol) {
    FreespaceMatcher m(g);
    return m.match_fixed_endpoints(u, w, ab, rel_tol);
}

bool match_exact_decide(const GeometricGraph& g, const Polyline& Q, double r) {
    FreespaceMatcher m(g);
    return m.decide_exact(Q, r);
}

double match_exact(const GeometricGraph& g, const Polyline& Q, double rel_tol) {
    FreespaceMatcher m(g);
    return m.match_exact(Q, rel_tol);
}

}  // namespace mapmatch

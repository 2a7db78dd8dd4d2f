#ifndef MAPMATCH_TEST_ORACLES_HPP
#define MAPMATCH_TEST_ORACLES_HPP

// Independent oracles for the engine's answers. Everything here recomputes
// from first principles (discrete Fréchet DP, dense resampling, exhaustive
// scans) without touching the free-space implementation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "mapmatch/graph.hpp"

namespace oracle {

using mapmatch::GeometricGraph;
using mapmatch::Point;
using mapmatch::Polyline;

inline double pdist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Curve resampled so consecutive samples are at most `spacing` apart.
inline std::vector<Point> resample(const std::vector<Point>& pts, double spacing) {
    std::vector<Point> out;
    out.push_back(pts.front());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double len = pdist(pts[i], pts[i + 1]);
        int steps = std::max(1, static_cast<int>(std::ceil(len / spacing)));
        for (int s = 1; s <= steps; ++s) {
            double t = static_cast<double>(s) / steps;
            out.push_back({pts[i].x + t * (pts[i + 1].x - pts[i].x),
                           pts[i].y + t * (pts[i + 1].y - pts[i].y)});
        }
    }
    return out;
}

// Classic discrete Fréchet DP (rolling rows).
inline double discrete_frechet(const std::vector<Point>& A, const std::vector<Point>& B) {
    const std::size_t n = A.size(), m = B.size();
    std::vector<double> prev(m), cur(m);
    for (std::size_t j = 0; j < m; ++j) {
        double d = pdist(A[0], B[j]);
        prev[j] = j == 0 ? d : std::max(prev[j - 1], d);
    }
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double d = pdist(A[i], B[j]);
            double best;
            if (j == 0) {
                best = prev[0];
            } else {
                best = std::min({prev[j], prev[j - 1], cur[j - 1]});
            }
            cur[j] = std::max(best, d);
        }
        std::swap(prev, cur);
    }
    return prev[m - 1];
}

// d_F approximated by dense resampling; value lies in [d_F, d_F + 2*spacing].
inline double frechet_resampled(const Polyline& A, const Polyline& B, double spacing) {
    return discrete_frechet(resample(A.vertices(), spacing), resample(B.vertices(), spacing));
}

// Walk-based map matching oracle: nodes are graph vertices plus evenly
// spaced interior samples on every edge; the trajectory is resampled at the
// same spacing. A bottleneck Dijkstra per trajectory sample propagates the
// best achievable max-cost. Walks start and end at graph vertices; pass
// fixed_start/fixed_end to pin the endpoints. Result is within about
// 2*spacing above the continuous optimum and never below it.
struct WalkOracle {
    std::vector<Point> nodes;
    std::vector<std::vector<int>> adj;
    std::vector<int> real_vertex;  // node -> original vertex id or -1

    explicit WalkOracle(const GeometricGraph& g, double spacing) {
        for (int v = 0; v < g.vertex_count(); ++v) {
            nodes.push_back(g.vertex(v));
            real_vertex.push_back(v);
        }
        adj.resize(nodes.size());
        for (int e = 0; e < g.edge_count(); ++e) {
            auto [a, b] = g.edge(e);
            double len = g.edge_length(e);
            int steps = std::max(1, static_cast<int>(std::ceil(len / spacing)));
            int prev = a;
            for (int s = 1; s < steps; ++s) {
                double t = static_cast<double>(s) / steps;
                Point p = {g.vertex(a).x + t * (g.vertex(b).x - g.vertex(a).x),
                           g.vertex(a).y + t * (g.vertex(b).y - g.vertex(a).y)};
                int id = static_cast<int>(nodes.size());
                nodes.push_back(p);
                real_vertex.push_back(-1);
                adj.resize(nodes.size());
                adj[prev].push_back(id);
                adj[id].push_back(prev);
                prev = id;
            }
            adj[prev].push_back(b);
            adj[b].push_back(prev);
        }
    }

    // Bottleneck relaxation at a fixed trajectory sample.
    void relax(std::vector<double>& cost, Point sample) const {
        for (std::size_t v = 0; v < nodes.size(); ++v) {
            if (std::isfinite(cost[v])) cost[v] = std::max(cost[v], pdist(nodes[v], sample));
        }
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        for (std::size_t v = 0; v < nodes.size(); ++v) {
            if (std::isfinite(cost[v])) pq.push({cost[v], static_cast<int>(v)});
        }
        while (!pq.empty()) {
            auto [c, v] = pq.top();
            pq.pop();
            if (c > cost[v]) continue;
            for (int w : adj[v]) {
                double nc = std::max(c, pdist(nodes[w], sample));
                if (nc < cost[w]) {
                    cost[w] = nc;
                    pq.push({nc, w});
                }
            }
        }
    }

    double match(const Polyline& Q, double spacing, int fixed_start = -1,
                 int fixed_end = -1) const {
        const double inf = std::numeric_limits<double>::infinity();
        std::vector<Point> samples = resample(Q.vertices(), spacing);
        std::vector<double> cost(nodes.size(), inf);
        for (std::size_t v = 0; v < nodes.size(); ++v) {
            if (real_vertex[v] >= 0 && (fixed_start < 0 || real_vertex[v] == fixed_start)) {
                cost[v] = 0.0;
            }
        }
        relax(cost, samples[0]);
        for (std::size_t m = 1; m < samples.size(); ++m) relax(cost, samples[m]);
        double best = inf;
        for (std::size_t v = 0; v < nodes.size(); ++v) {
            if (real_vertex[v] >= 0 && (fixed_end < 0 || real_vertex[v] == fixed_end)) {
                best = std::min(best, cost[v]);
            }
        }
        return best;
    }
};

// Exact total edge length inside a ball, recomputed from the quadratic.
inline double length_in_ball(const GeometricGraph& g, Point c, double r) {
    double total = 0.0;
    for (int e = 0; e < g.edge_count(); ++e) {
        Point a = g.vertex(g.edge(e).first), b = g.vertex(g.edge(e).second);
        double dx = b.x - a.x, dy = b.y - a.y;
        double qa = dx * dx + dy * dy;
        if (qa == 0.0) continue;
        double qb = (a.x - c.x) * dx + (a.y - c.y) * dy;
        double qc = (a.x - c.x) * (a.x - c.x) + (a.y - c.y) * (a.y - c.y) - r * r;
        double disc = qb * qb - qa * qc;
        if (disc <= 0) continue;
        double lo = std::max(0.0, (-qb - std::sqrt(disc)) / qa);
        double hi = std::min(1.0, (-qb + std::sqrt(disc)) / qa);
        if (hi > lo) total += (hi - lo) * std::sqrt(qa);
    }
    return total;
}

// Dense grid of centers and radii; certifies a packedness lower bound.
inline double dense_packedness(const GeometricGraph& g, int grid = 24) {
    Point lo = g.bbox_min(), hi = g.bbox_max();
    double diag = pdist(lo, hi);
    double best = 0.0;
    for (int i = 0; i <= grid; ++i) {
        for (int j = 0; j <= grid; ++j) {
            Point c = {lo.x + (hi.x - lo.x) * i / grid, lo.y + (hi.y - lo.y) * j / grid};
            for (double r = diag; r > diag / 512; r *= 0.8) {
                best = std::max(best, length_in_ball(g, c, r) / r);
            }
        }
    }
    return best;
}

}  // namespace oracle

#endif

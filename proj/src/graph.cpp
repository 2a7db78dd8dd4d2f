#include "mapmatch/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "mapmatch/common.hpp"

namespace mapmatch {

GeometricGraph::GeometricGraph(std::vector<Point> vertices,
                               std::vector<std::pair<int, int>> edges)
    : verts_(std::move(vertices)), edges_(std::move(edges)) {
    const int n = static_cast<int>(verts_.size());
    if (n == 0) throw input_error("graph needs at least one vertex");
    for (const Point& p : verts_) {
        if (!finite(p)) throw input_error("graph has non-finite coordinates");
    }
    adj_.resize(n);
    lengths_.reserve(edges_.size());
    int e = 0;
    for (auto& [u, v] : edges_) {
        if (u < 0 || u >= n || v < 0 || v >= n) throw input_error("edge endpoint out of range");
        if (u == v) throw input_error("self-loops are not allowed");
        double len = dist(verts_[u], verts_[v]);
        lengths_.push_back(len);
        total_length_ += len;
        adj_[u].push_back({v, e});
        adj_[v].push_back({u, e});
        ++e;
    }
    // Connectivity check; disconnected inputs are rejected at ingestion.
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (const HalfEdge& h : adj_[v]) {
            if (!seen[h.to]) {
                seen[h.to] = 1;
                ++count;
                stack.push_back(h.to);
            }
        }
    }
    if (count != n) throw input_error("graph is not connected");
    bbox_min_ = bbox_max_ = verts_[0];
    for (const Point& p : verts_) {
        bbox_min_.x = std::min(bbox_min_.x, p.x);
        bbox_min_.y = std::min(bbox_min_.y, p.y);
        bbox_max_.x = std::max(bbox_max_.x, p.x);
        bbox_max_.y = std::max(bbox_max_.y, p.y);
    }
}

GraphPoint normalize(const GeometricGraph& g, GraphPoint p) {
    if (p.is_vertex()) {
        if (p.vertex >= g.vertex_count()) throw input_error("graph point vertex out of range");
        return p;
    }
    if (p.edge < 0 || p.edge >= g.edge_count()) throw input_error("graph point edge out of range");
    if (!(p.t >= 0.0 && p.t <= 1.0)) throw input_error("graph point parameter outside [0,1]");
    if (p.t == 0.0) return GraphPoint::at_vertex(g.edge(p.edge).first);
    if (p.t == 1.0) return GraphPoint::at_vertex(g.edge(p.edge).second);
    return p;
}

Point position(const GeometricGraph& g, const GraphPoint& p) {
    GraphPoint n = normalize(g, p);
    if (n.is_vertex()) return g.vertex(n.vertex);
    return g.edge_segment(n.edge).at(n.t);
}

bool same_point(const GeometricGraph& g, const GraphPoint& a, const GraphPoint& b) {
    GraphPoint na = normalize(g, a), nb = normalize(g, b);
    if (na.is_vertex() != nb.is_vertex()) return false;
    if (na.is_vertex()) return na.vertex == nb.vertex;
    return na.edge == nb.edge && na.t == nb.t;
}

std::vector<double> multi_source_distances(const GeometricGraph& g,
                                           const std::vector<std::pair<int, double>>& seeds) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(g.vertex_count(), inf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (auto [v, d] : seeds) {
        if (d < dist[v]) {
            dist[v] = d;
            pq.push({d, v});
        }
    }
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[v]) continue;
        for (const auto& h : g.neighbors(v)) {
            double nd = d + g.edge_length(h.edge);
            if (nd < dist[h.to]) {
                dist[h.to] = nd;
                pq.push({nd, h.to});
            }
        }
    }
    return dist;
}

std::vector<double> vertex_distances(const GeometricGraph& g, int source) {
    return multi_source_distances(g, {{source, 0.0}});
}

double graph_distance(const GeometricGraph& g, const GraphPoint& up, const GraphPoint& vp) {
    GraphPoint u = normalize(g, up), v = normalize(g, vp);
    if (same_point(g, u, v)) return 0.0;

    auto seeds_of = [&](const GraphPoint& p) {
        std::vector<std::pair<int, double>> s;
        if (p.is_vertex()) {
            s.push_back({p.vertex, 0.0});
        } else {
            auto [a, b] = g.edge(p.edge);
            double len = g.edge_length(p.edge);
            s.push_back({a, p.t * len});
            s.push_back({b, (1.0 - p.t) * len});
        }
        return s;
    };

    std::vector<double> d = multi_source_distances(g, seeds_of(u));
    double best = std::numeric_limits<double>::infinity();
    for (auto [w, off] : seeds_of(v)) best = std::min(best, d[w] + off);
    // Both interior on one edge: the direct along-edge route skips vertices.
    if (!u.is_vertex() && !v.is_vertex() && u.edge == v.edge) {
        best = std::min(best, std::abs(u.t - v.t) * g.edge_length(u.edge));
    }
    return best;
}

GeometricGraph largest_component(const std::vector<Point>& vertices,
                                 const std::vector<std::pair<int, int>>& edges) {
    const int n = static_cast<int>(vertices.size());
    std::vector<std::vector<int>> adj(n);
    for (auto& [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        std::vector<int> stack{s};
        comp[s] = ncomp;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[v]) {
                if (comp[w] < 0) {
                    comp[w] = ncomp;
                    stack.push_back(w);
                }
            }
        }
        ++ncomp;
    }
    std::vector<int> size(ncomp, 0);
    for (int v = 0; v < n; ++v) ++size[comp[v]];
    int best = static_cast<int>(std::max_element(size.begin(), size.end()) - size.begin());
    std::vector<int> remap(n, -1);
    std::vector<Point> verts;
    for (int v = 0; v < n; ++v) {
        if (comp[v] == best) {
            remap[v] = static_cast<int>(verts.size());
            verts.push_back(vertices[v]);
        }
    }
    std::vector<std::pair<int, int>> es;
    for (auto& [u, v] : edges) {
        if (comp[u] == best) es.push_back({remap[u], remap[v]});
    }
    return GeometricGraph(std::move(verts), std::move(es));
}

GeometricGraph subdivide_at(const GeometricGraph& g, const std::vector<GraphPoint>& points) {
    std::vector<std::vector<double>> cuts(g.edge_count());
    for (const GraphPoint& p : points) {
        GraphPoint n = normalize(g, p);
        if (!n.is_vertex()) cuts[n.edge].push_back(n.t);
    }
    std::vector<Point> verts = g.vertices();
    std::vector<std::pair<int, int>> edges;
    for (int e = 0; e < g.edge_count(); ++e) {
        auto [a, b] = g.edge(e);
        auto& ts = cuts[e];
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        int prev = a;
        Segment seg = g.edge_segment(e);
        for (double t : ts) {
            int nv = static_cast<int>(verts.size());
            verts.push_back(seg.at(t));
            edges.push_back({prev, nv});
            prev = nv;
        }
        edges.push_back({prev, b});
    }
    return GeometricGraph(std::move(verts), std::move(edges));
}

}  // namespace mapmatch

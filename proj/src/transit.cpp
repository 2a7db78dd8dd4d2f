#include "mapmatch/transit.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "mapmatch/common.hpp"
#include "mapmatch/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mapmatch {

namespace {

double exact_radius_around(const GeometricGraph& g, std::span<const int> side, int center) {
    double r = 0.0;
    for (int v : side) r = std::max(r, dist(g.vertex(center), g.vertex(v)));
    return r;
}

double exact_diameter(const GeometricGraph& g, std::span<const int> side) {
    double d = 0.0;
    for (std::size_t i = 0; i < side.size(); ++i) {
        for (std::size_t j = i + 1; j < side.size(); ++j) {
            d = std::max(d, dist(g.vertex(side[i]), g.vertex(side[j])));
        }
    }
    return d;
}

}  // namespace

TransitSet compute_transit_vertices(const GeometricGraph& g, const SspdIndex& sspd, int pair_id) {
    const auto& rec = sspd.pair(pair_id);
    auto sa = sspd.node_vertices(rec.node_a);
    auto sb = sspd.node_vertices(rec.node_b);
    // Sources live on the side with the smaller bounding-box diameter, the
    // side whose exact diameter the build predicate certifies.
    const auto& nodes = sspd.nodes();
    double da = dist(nodes[rec.node_a].bmin, nodes[rec.node_a].bmax);
    double db = dist(nodes[rec.node_b].bmin, nodes[rec.node_b].bmax);
    std::span<const int> src = (da <= db) ? sa : sb;
    std::span<const int> dst = (da <= db) ? sb : sa;

    const int n = g.vertex_count();
    std::vector<char> is_src(n, 0), is_dst(n, 0);
    for (int v : src) is_src[v] = 1;
    for (int v : dst) is_dst[v] = 1;

    // Ford-Fulkerson with BFS augmenting paths. Each undirected edge is an
    // arc pair with capacity 1 each way; residual cancellation makes that
    // equivalent to shared unit capacity.
    std::vector<int> cap(2 * g.edge_count(), 1);
    auto arc_of = [&](int v, const GeometricGraph::HalfEdge& h) {
        return 2 * h.edge + (g.edge(h.edge).first == v ? 0 : 1);
    };
    std::vector<int> parent_vertex(n), parent_arc(n);
    std::vector<char> seen(n);
    int flow = 0;
    while (true) {
        std::fill(seen.begin(), seen.end(), 0);
        std::queue<int> q;
        for (int v : src) {
            seen[v] = 1;
            q.push(v);
        }
        int found = -1;
        while (!q.empty() && found < 0) {
            int v = q.front();
            q.pop();
            for (const auto& h : g.neighbors(v)) {
                int a = arc_of(v, h);
                if (cap[a] <= 0 || seen[h.to]) continue;
                seen[h.to] = 1;
                parent_vertex[h.to] = v;
                parent_arc[h.to] = a;
                if (is_dst[h.to]) {
                    found = h.to;
                    break;
                }
                q.push(h.to);
            }
        }
        if (found < 0) break;
        for (int v = found; !is_src[v]; v = parent_vertex[v]) {
            int a = parent_arc[v];
            cap[a] -= 1;
            cap[a ^ 1] += 1;
        }
        ++flow;
    }

    // seen[] now marks the residual source side; cut edges leave it.
    TransitSet ts;
    ts.pair_id = pair_id;
    ts.flow_value = flow;
    std::vector<char> in_cut(n, 0);
    for (int v = 0; v < n; ++v) {
        if (!seen[v]) continue;
        for (const auto& h : g.neighbors(v)) {
            if (!seen[h.to] && !in_cut[h.to]) {
                in_cut[h.to] = 1;
                ts.cut_vertices.push_back(h.to);
            }
        }
    }
    std::sort(ts.cut_vertices.begin(), ts.cut_vertices.end());

    if (src.size() > 1) {
        int a0 = src[0];
        ts.witness_center = g.vertex(a0);
        ts.witness_radius = 2.0 * exact_diameter(g, src);
        (void)exact_radius_around;
    }
    return ts;
}

double TransitDistanceTable::lookup(int u, int w) const {
    if (u == w) return 0.0;
    auto it = entries.find(key(u, w));
    if (it == entries.end()) throw invariant_error("missing transit pair entry");
    return it->second;
}

TransitDistanceTable precompute_transit_distances(const GeometricGraph& g, const SspdIndex& sspd,
                                                  const std::vector<TransitSet>& transit_sets,
                                                  double rel_tol, bool parallel) {
    TransitDistanceTable table;
    std::vector<std::uint64_t> keys;
    for (const TransitSet& ts : transit_sets) {
        const auto& rec = sspd.pair(ts.pair_id);
        for (int node : {rec.node_a, rec.node_b}) {
            for (int u : sspd.node_vertices(node)) {
                for (int w : ts.cut_vertices) {
                    ++table.enumerated_pairs;
                    if (u != w) keys.push_back(TransitDistanceTable::key(u, w));
                }
            }
        }
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

    std::vector<double> values(keys.size());
    auto compute = [&](FreespaceMatcher& m, std::size_t i) {
        int u = static_cast<int>(keys[i] >> 32);
        int w = static_cast<int>(keys[i] & 0xffffffffu);
        values[i] = m.match_fixed_endpoints(u, w, {g.vertex(u), g.vertex(w)}, rel_tol);
    };
#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel
        {
            FreespaceMatcher m(g);
#pragma omp for schedule(dynamic, 16)
            for (long long i = 0; i < static_cast<long long>(keys.size()); ++i) {
                compute(m, static_cast<std::size_t>(i));
            }
        }
    } else
#else
    (void)parallel;
#endif
    {
        FreespaceMatcher m(g);
        for (std::size_t i = 0; i < keys.size(); ++i) compute(m, i);
    }

    table.entries.reserve(keys.size() * 2);
    for (std::size_t i = 0; i < keys.size(); ++i) table.entries.emplace(keys[i], values[i]);
    return table;
}

Stage1Index build_stage1(const GeometricGraph& g, double rel_tol, std::uint64_t seed,
                         bool parallel, int packedness_samples) {
    Stage1Index idx;
    idx.rel_tol = rel_tol;
    idx.sspd = build_sspd(g, 0.5);
    idx.transit_sets.reserve(idx.sspd.pair_count());
    for (int p = 0; p < idx.sspd.pair_count(); ++p) {
        idx.transit_sets.push_back(compute_transit_vertices(g, idx.sspd, p));
    }
    idx.table = precompute_transit_distances(g, idx.sspd, idx.transit_sets, rel_tol, parallel);

    PackednessReport rep = estimate_packedness(g, packedness_samples, seed);
    idx.c_estimate = rep.c_estimate;
    idx.witness_center = rep.witness_center;
    idx.witness_radius = rep.witness_radius;
    // Fold in the min-cut witness balls; this is the re-estimation that
    // fires when sampling under-estimated c.
    for (const TransitSet& ts : idx.transit_sets) {
        if (ts.witness_radius <= 0) continue;
        double ratio = edge_length_in_ball(g, ts.witness_center, ts.witness_radius) /
                       ts.witness_radius;
        if (ratio > idx.c_estimate) {
            idx.c_estimate = ratio;
            idx.witness_center = ts.witness_center;
            idx.witness_radius = ts.witness_radius;
        }
    }
    return idx;
}

double straightest_path_query(const GeometricGraph& g, const Stage1Index& idx, int u, int v) {
    if (u == v) return 0.0;
    auto lk = idx.sspd.lookup_pair(u, v);
    const TransitSet& ts = idx.transit_sets[lk.pair_id];
    Segment uv{g.vertex(u), g.vertex(v)};
    double best = std::numeric_limits<double>::infinity();
    for (int w : ts.cut_vertices) {
        double dw = point_segment_distance(g.vertex(w), uv);
        double cand = std::max(idx.table.lookup(u, w), idx.table.lookup(w, v)) + dw;
        best = std::min(best, cand);
    }
    return best;
}

double straightest_path_query_segment(const GeometricGraph& g, const Stage1Index& idx, int u,
                                      int v, const Segment& ab, double rel_tol) {
    (void)rel_tol;
    if (u == v) {
        // Single-vertex path; any detour only raises the endpoint bound.
        return std::max(dist(g.vertex(u), ab.a), dist(g.vertex(u), ab.b));
    }
    auto lk = idx.sspd.lookup_pair(u, v);
    const TransitSet& ts = idx.transit_sets[lk.pair_id];
    // d_F(uw o wv, ab) in closed form: w matches a point of ab and both
    // halves are segment-vs-segment.
    double ends = std::max(dist(g.vertex(u), ab.a), dist(g.vertex(v), ab.b));
    double best = std::numeric_limits<double>::infinity();
    for (int w : ts.cut_vertices) {
        double dw = std::max(ends, point_segment_distance(g.vertex(w), ab));
        double cand = std::max(idx.table.lookup(u, w), idx.table.lookup(w, v)) + dw;
        best = std::min(best, cand);
    }
    return best;
}

}  // namespace mapmatch

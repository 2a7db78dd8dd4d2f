#include "mapmatch/segment_index.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <tuple>

#include "mapmatch/common.hpp"

namespace mapmatch {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ClusterHierarchy build_cluster_hierarchy(const GeometricGraph& g) {
    const int n = g.vertex_count();
    ClusterHierarchy h;
    h.order.reserve(n);
    h.radius.reserve(n);
    h.rank.assign(n, -1);

    std::vector<double> mind = vertex_distances(g, 0);
    h.order.push_back(0);
    h.rank[0] = 0;
    h.radius.push_back(*std::max_element(mind.begin(), mind.end()));
    for (int k = 1; k < n; ++k) {
        int next = -1;
        double far = -1.0;
        for (int v = 0; v < n; ++v) {
            if (h.rank[v] < 0 && mind[v] > far) {
                far = mind[v];
                next = v;
            }
        }
        h.order.push_back(next);
        h.rank[next] = k;
        std::vector<double> d = vertex_distances(g, next);
        double radius = 0.0;
        for (int v = 0; v < n; ++v) {
            mind[v] = std::min(mind[v], d[v]);
            radius = std::max(radius, mind[v]);
        }
        h.radius.push_back(radius);
    }
    return h;
}

void RangeIndex3D::build(std::vector<std::array<double, 3>> pts) {
    nodes_.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        nodes_[i] = {pts[i][0], pts[i][1], pts[i][2], static_cast<int>(i)};
    }
    if (!nodes_.empty()) build_range(0, static_cast<int>(nodes_.size()), 0);
}

void RangeIndex3D::build_range(int begin, int end, int axis) {
    if (end - begin <= 1) return;
    int mid = begin + (end - begin) / 2;
    auto less = [axis](const Node& a, const Node& b) {
        double ka = axis == 0 ? a.x : axis == 1 ? a.y : a.z;
        double kb = axis == 0 ? b.x : axis == 1 ? b.y : b.z;
        if (ka != kb) return ka < kb;
        return a.id < b.id;
    };
    std::nth_element(nodes_.begin() + begin, nodes_.begin() + mid, nodes_.begin() + end, less);
    build_range(begin, mid, (axis + 1) % 3);
    build_range(mid + 1, end, (axis + 1) % 3);
}

void RangeIndex3D::query_range(int begin, int end, int axis, double x0, double x1, double y0,
                               double y1, double zmin, std::vector<int>& out) const {
    if (begin >= end) return;
    int mid = begin + (end - begin) / 2;
    const Node& m = nodes_[mid];
    if (x0 <= m.x && m.x <= x1 && y0 <= m.y && m.y <= y1 && m.z >= zmin) out.push_back(m.id);
    double key = axis == 0 ? m.x : axis == 1 ? m.y : m.z;
    double lo = axis == 0 ? x0 : axis == 1 ? y0 : zmin;
    bool go_left = (lo <= key);
    bool go_right;
    if (axis == 0) {
        go_right = (x1 >= key);
    } else if (axis == 1) {
        go_right = (y1 >= key);
    } else {
        go_right = true;  // z range is one-sided [zmin, inf)
    }
    if (go_left) query_range(begin, mid, (axis + 1) % 3, x0, x1, y0, y1, zmin, out);
    if (go_right) query_range(mid + 1, end, (axis + 1) % 3, x0, x1, y0, y1, zmin, out);
}

std::vector<int> RangeIndex3D::query(double x0, double x1, double y0, double y1,
                                     double zmin) const {
    std::vector<int> out;
    if (!nodes_.empty()) {
        query_range(0, static_cast<int>(nodes_.size()), 0, x0, x1, y0, y1, zmin, out);
    }
    std::sort(out.begin(), out.end());
    return out;
}

SegmentIndex::SegmentIndex(const GeometricGraph& g, const Stage1Index& s1, double eps)
    : g_(&g), s1_(&s1), eps_(eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw input_error("eps must lie in (0, 1)");
    hierarchy_ = build_cluster_hierarchy(g);
    std::vector<std::array<double, 3>> pts(g.vertex_count());
    for (int v = 0; v < g.vertex_count(); ++v) {
        pts[v] = {g.vertex(v).x, g.vertex(v).y, hierarchy_.radius[hierarchy_.rank[v]]};
    }
    range_index_.build(std::move(pts));
    matcher_ = std::make_unique<FreespaceMatcher>(g);
}

int SegmentIndex::nearest_vertex(Point p) const {
    int best = 0;
    double bd = kInf;
    for (int v = 0; v < g_->vertex_count(); ++v) {
        double d = dist(p, g_->vertex(v));
        if (d < bd) {
            bd = d;
            best = v;
        }
    }
    return best;
}

double SegmentIndex::grid_value(int u, int w, const Segment& s) const {
    Segment seg = s;
    if (u > w) {
        std::swap(u, w);
        seg = seg.reversed();
    }
    double d1 = dist(g_->vertex(u), seg.a);
    double d2 = dist(g_->vertex(w), seg.b);
    double base = (u == w) ? 0.0 : s1_->table.lookup(u, w);
    if (base == 0.0) {
        // A zero-deviation path exists between u and w: translating its
        // endpoints to the query segment is exact.
        return std::max(d1, d2);
    }
    const double ep = eps_prime();
    double m = std::max({0.5 * base, d1, d2});
    if (m >= (2.0 / ep) * base) {
        // Far regime: the path's own deviation is below eps' * m.
        return std::max(d1, d2) + base;
    }
    int k = static_cast<int>(std::ceil(std::log2(m / base)));
    if (k < -1) k = -1;
    double scale = base * std::pow(2.0, k);
    double cell = snap_kappa_ * ep * scale;
    auto snap = [&](Point p, Point anchor) {
        return std::pair<int, int>{static_cast<int>(std::llround((p.x - anchor.x) / cell)),
                                   static_cast<int>(std::llround((p.y - anchor.y) / cell))};
    };
    auto [ia, ja] = snap(seg.a, g_->vertex(u));
    auto [ib, jb] = snap(seg.b, g_->vertex(w));
    Point sa = g_->vertex(u) + Point{ia * cell, ja * cell};
    Point sb = g_->vertex(w) + Point{ib * cell, jb * cell};

    // 14 bits per cell index; the snap bound 1/(kappa*eps') keeps indices
    // far below the limit for any sane eps.
    auto enc = [](int v) {
        if (v < -8191 || v > 8191) throw invariant_error("grid cell index out of range");
        return static_cast<std::uint64_t>(v + 8192) & 0x3fffULL;
    };
    std::pair<std::uint64_t, std::uint64_t> key{
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
            static_cast<std::uint32_t>(w),
        (static_cast<std::uint64_t>(static_cast<std::uint8_t>(k + 8)) << 56) | (enc(ia) << 42) |
            (enc(ja) << 28) | (enc(ib) << 14) | enc(jb)};

    double stored;
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            stored = it->second;
        } else {
            stored = matcher_->match_fixed_endpoints(u, w, {sa, sb}, grid_rel_tol_);
            cache_.emplace(key, stored);
            ++misses_;
        }
    }
    return stored + std::max(dist(seg.a, sa), dist(seg.b, sb));
}

double SegmentIndex::query_fixed_endpoints_eps(int u, int v, const Segment& ab) const {
    return query_fixed_endpoints_eps_bounded(u, v, ab, -1.0).value;
}

SegmentIndex::EpsValue SegmentIndex::query_fixed_endpoints_eps_bounded(int u, int v,
                                                                       const Segment& ab,
                                                                       double cutoff) const {
    if (u == v) {
        // Single-vertex path; any loop only raises the endpoint bound.
        return {std::max(dist(g_->vertex(u), ab.a), dist(g_->vertex(u), ab.b)), true};
    }
    auto lk = s1_->sspd.lookup_pair(u, v);
    const TransitSet& ts = s1_->transit_sets[lk.pair_id];
    const double ep = eps_prime();
    const double base_lb = std::max(dist(g_->vertex(u), ab.a), dist(g_->vertex(v), ab.b));

    // Lemma-4 3-approximation pins the scale and doubles as a fallback value.
    // d_F of the two-segment spine u-w-v against ab has a closed form: the
    // middle vertex matches some point of ab and both halves are
    // segment-vs-segment, where d_F is the larger endpoint distance.
    double r3 = kInf;
    for (int w : ts.cut_vertices) {
        double dw = std::max(base_lb, point_segment_distance(g_->vertex(w), ab));
        r3 = std::min(r3, std::max(s1_->table.lookup(u, w), s1_->table.lookup(w, v)) + dw);
    }
    if (cutoff >= 0 && r3 > 3.0 * (1 + 1e-9) * cutoff) {
        // The optimum is at least r3 / 3, already above the cutoff.
        return {r3, false};
    }
    double best = r3;
    double ab_len = ab.length();
    for (std::size_t i = 0; i < ts.cut_vertices.size(); ++i) {
        int w = ts.cut_vertices[i];
        if (cutoff >= 0 && best <= cutoff) return {best, false};
        Point wp = g_->vertex(w);
        // Both grid lookups are bounded below by half the transit base.
        double wlb = std::max({base_lb, point_segment_distance(wp, ab),
                               0.5 * s1_->table.lookup(u, w), 0.5 * s1_->table.lookup(w, v)});
        if (wlb >= best) continue;
        Interval chord = free_interval(wp, ab, r3);
        if (chord.empty()) continue;
        double spacing = chord_step_ * ep * r3;
        double chord_len = (chord.hi - chord.lo) * ab_len;
        int steps = std::max(1, static_cast<int>(std::ceil(chord_len / std::max(spacing, 1e-300))));
        for (int sidx = 0; sidx <= steps; ++sidx) {
            double t = chord.lo + (chord.hi - chord.lo) * (static_cast<double>(sidx) / steps);
            Point tp = ab.at(t);
            double lb = std::max(base_lb, dist(wp, tp));
            if (lb >= best) continue;
            double va = grid_value(u, w, {ab.a, tp});
            if (va >= best) continue;
            double vb = grid_value(w, v, {tp, ab.b});
            best = std::min(best, std::max(va, vb));
            if (cutoff >= 0 && best <= cutoff) return {best, false};
        }
    }
    return {best, true};
}

CandidateVertexSet SegmentIndex::candidate_vertices(Point center, double r,
                                                    double eps_cov) const {
    if (!(r > 0)) throw input_error("candidate query radius must be positive");
    CandidateVertexSet out;
    double threshold = eps_cov * r;
    out.anchors = range_index_.query(center.x - 2 * r, center.x + 2 * r, center.y - 2 * r,
                                     center.y + 2 * r, threshold);
    // First center whose Gonzales radius falls below the threshold: its
    // prefix covers every vertex within the threshold.
    const auto& rad = hierarchy_.radius;
    auto it = std::upper_bound(rad.begin(), rad.end(), threshold,
                               [](double t, double x) { return t > x; });
    if (it != rad.end()) {
        int v = hierarchy_.order[it - rad.begin()];
        Point p = g_->vertex(v);
        if (std::abs(p.x - center.x) <= 2 * r && std::abs(p.y - center.y) <= 2 * r) {
            out.anchors.push_back(v);
        }
    }
    std::sort(out.anchors.begin(), out.anchors.end());
    out.anchors.erase(std::unique(out.anchors.begin(), out.anchors.end()), out.anchors.end());
    return out;
}

SegmentIndex::Decision SegmentIndex::segment_decide(
    const Segment& ab, double r, std::unordered_map<std::uint64_t, EpsValue>& pair_memo) const {
    const double ep = eps_prime();
    CandidateVertexSet ta = candidate_vertices(ab.a, r, ep);
    CandidateVertexSet tb = candidate_vertices(ab.b, r, ep);
    if (ta.anchors.empty() || tb.anchors.empty()) return {1, kInf};
    double best = kInf;
    for (int u : ta.anchors) {
        double lba = dist(g_->vertex(u), ab.a);
        if (lba >= best) continue;
        for (int v : tb.anchors) {
            double lb = std::max(lba, dist(g_->vertex(v), ab.b));
            if (lb >= best) continue;
            std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
                                static_cast<std::uint32_t>(v);
            auto it = pair_memo.find(key);
            EpsValue val;
            if (it != pair_memo.end() && (it->second.exact || it->second.value <= r)) {
                val = it->second;
            } else {
                val = query_fixed_endpoints_eps_bounded(u, v, ab, r);
                pair_memo[key] = val;
            }
            best = std::min(best, val.value);
            if (best <= r) return {0, best};
        }
    }
    if (best <= r) return {0, best};
    double gate = (1.0 + ep) * (1.0 + ep) * r;
    if (best >= gate) return {1, best};
    return {2, best};
}

double SegmentIndex::segment_query(const Segment& ab, double rel_tol) const {
    if (!(rel_tol > 0)) throw input_error("rel_tol must be positive");
    if (g_->vertex_count() == 1) {
        return std::max(dist(g_->vertex(0), ab.a), dist(g_->vertex(0), ab.b));
    }
    double lo_a = kInf, lo_b = kInf;
    for (const Point& p : g_->vertices()) {
        lo_a = std::min(lo_a, dist(p, ab.a));
        lo_b = std::min(lo_b, dist(p, ab.b));
    }
    double lo = std::max(lo_a, lo_b);
    std::unordered_map<std::uint64_t, EpsValue> memo;
    double hi = query_fixed_endpoints_eps(nearest_vertex(ab.a), nearest_vertex(ab.b), ab);
    hi = std::max(hi, lo);
#ifndef NDEBUG
    double feas_min = std::numeric_limits<double>::infinity();
    double infeas_max = 0.0;
#endif
    for (int it = 0; it < 80; ++it) {
        if (hi <= lo * (1.0 + rel_tol) || hi - lo <= hi * 4e-16) break;
        double r = 0.5 * (lo + hi);
        if (r <= lo || r >= hi) break;
        Decision d = segment_decide(ab, r, memo);
#ifndef NDEBUG
        // The decision stays monotone over the bisection trace.
        if (d.kind == 0) feas_min = std::min(feas_min, r);
        if (d.kind == 1) infeas_max = std::max(infeas_max, r);
        assert(infeas_max <= feas_min);
#endif
        if (d.kind == 0) {
            hi = std::min(hi, std::max(d.r_min, lo));
        } else if (d.kind == 1) {
            lo = r;
            if (d.r_min < hi) hi = std::max(d.r_min, lo);
        } else {
            // Window case: d.r_min is a real-path value within the
            // (1+eps')^2 band of r, hence a certified (1+eps)-approximation.
            return std::max(d.r_min, lo);
        }
    }
    return hi;
}

std::vector<SegmentIndex::GridEntry> SegmentIndex::export_grid_entries() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<GridEntry> out;
    out.reserve(cache_.size());
    for (const auto& [k, v] : cache_) out.push_back({k.first, k.second, v});
    std::sort(out.begin(), out.end(), [](const GridEntry& a, const GridEntry& b) {
        return std::tie(a.key_hi, a.key_lo) < std::tie(b.key_hi, b.key_lo);
    });
    return out;
}

void SegmentIndex::import_grid_entries(const std::vector<GridEntry>& entries) {
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto& e : entries) cache_[{e.key_hi, e.key_lo}] = e.value;
}

std::size_t SegmentIndex::grid_entry_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.size();
}

std::size_t SegmentIndex::grid_miss_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return misses_;
}

}  // namespace mapmatch

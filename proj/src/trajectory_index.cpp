#include "mapmatch/trajectory_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mapmatch/common.hpp"

namespace mapmatch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Liang-Barsky parameter interval of s inside [x0,x1] x [y0,y1].
Interval clip_to_box(const Segment& s, double x0, double x1, double y0, double y1) {
    double dx = s.b.x - s.a.x, dy = s.b.y - s.a.y;
    double p[4] = {-dx, dx, -dy, dy};
    double q[4] = {s.a.x - x0, x1 - s.a.x, s.a.y - y0, y1 - s.a.y};
    double t0 = 0.0, t1 = 1.0;
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return Interval::none();
        } else {
            double t = q[i] / p[i];
            if (p[i] < 0.0) {
                t0 = std::max(t0, t);
            } else {
                t1 = std::min(t1, t);
            }
        }
    }
    if (t0 > t1) return Interval::none();
    return {t0, t1};
}

}  // namespace

TroughIndex::TroughIndex(const GeometricGraph& g, double eps) : g_(&g), eps_(eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw input_error("eps must lie in (0, 1)");
    for (int e = 0; e < g.edge_count(); ++e) {
        double len = g.edge_length(e);
        if (len <= 0.0) continue;
        double size = 18.0 / eps * len;
        int level = static_cast<int>(std::floor(std::log2(size)));
        double cell = std::pow(2.0, level);
        Segment s = g.edge_segment(e);
        double pad = 8.0 / eps * len;
        double x0 = std::min(s.a.x, s.b.x) - pad, x1 = std::max(s.a.x, s.b.x) + pad;
        double y0 = std::min(s.a.y, s.b.y) - pad, y1 = std::max(s.a.y, s.b.y) + pad;
        double z1 = 2.0 / eps * len;
        int ix0 = static_cast<int>(std::floor(x0 / cell)), ix1 = static_cast<int>(std::floor(x1 / cell));
        int iy0 = static_cast<int>(std::floor(y0 / cell)), iy1 = static_cast<int>(std::floor(y1 / cell));
        int iz1 = static_cast<int>(std::floor(z1 / cell));
        for (int ix = ix0; ix <= ix1; ++ix) {
            for (int iy = iy0; iy <= iy1; ++iy) {
                for (int iz = 0; iz <= iz1; ++iz) {
                    cells_[{level, ix, iy, iz}].push_back(e);
                }
            }
        }
        if (!std::binary_search(levels_.begin(), levels_.end(), level)) {
            levels_.insert(std::lower_bound(levels_.begin(), levels_.end(), level), level);
        }
    }
}

bool TroughIndex::contains(int edge, double x, double y, double z) const {
    double len = g_->edge_length(edge);
    if (4.0 * z > 8.0 / eps_ * len) return false;
    return point_segment_distance({x, y}, g_->edge_segment(edge)) <= 4.0 * z;
}

std::vector<int> TroughIndex::stab(double x, double y, double z) const {
    std::vector<int> out;
    if (z < 0.0) return out;
    for (int level : levels_) {
        double cell = std::pow(2.0, level);
        CellKey key{level, static_cast<int>(std::floor(x / cell)),
                    static_cast<int>(std::floor(y / cell)), static_cast<int>(std::floor(z / cell))};
        auto it = cells_.find(key);
        if (it == cells_.end()) continue;
        for (int e : it->second) {
            if (contains(e, x, y, z)) out.push_back(e);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

TroughIndex build_trough_index(const GeometricGraph& g, double eps) {
    return TroughIndex(g, eps);
}

TrajectoryIndex::TrajectoryIndex(const GeometricGraph& g, const Stage1Index& s1,
                                 const SegmentIndex& s2, double eps)
    : g_(&g), s1_(&s1), s2_(&s2), eps_(eps), troughs_(g, eps / 6.0) {
    if (!(eps > 0.0 && eps < 1.0)) throw input_error("eps must lie in (0, 1)");
}

std::vector<CandidatePoint> TrajectoryIndex::candidate_points(Point a, double r) const {
    if (!(r > 0)) throw input_error("candidate query radius must be positive");
    const double ec = eps_cov();
    std::vector<CandidatePoint> out;
    CandidateVertexSet anchors = s2_->candidate_vertices(a, r, ec / 2.0);
    for (int v : anchors.anchors) {
        out.push_back({GraphPoint::at_vertex(v), g_->vertex(v), true});
    }
    // Long-near edges via the trough stab at (a, r); samples on the chord
    // inside the concentric square of side 4r, spacing <= eps_cov * r / 2.
    std::vector<int> edges = troughs_.stab(a.x, a.y, r);
    double x0 = a.x - 2 * r, x1 = a.x + 2 * r, y0 = a.y - 2 * r, y1 = a.y + 2 * r;
    for (int e : edges) {
        Segment s = g_->edge_segment(e);
        Interval iv = clip_to_box(s, x0, x1, y0, y1);
        if (iv.empty()) continue;
        double len = (iv.hi - iv.lo) * g_->edge_length(e);
        int steps = std::max(1, static_cast<int>(std::ceil(len / (ec * r / 2.0))));
        for (int i = 0; i <= steps; ++i) {
            double t = iv.lo + (iv.hi - iv.lo) * (static_cast<double>(i) / steps);
            GraphPoint gp = normalize(*g_, GraphPoint::on_edge(e, t));
            out.push_back({gp, position(*g_, gp), false});
        }
    }
    // Dedup exact duplicates (vertex anchors vs samples landing on them).
    std::sort(out.begin(), out.end(), [](const CandidatePoint& l, const CandidatePoint& r2) {
        if (l.gp.vertex != r2.gp.vertex) return l.gp.vertex < r2.gp.vertex;
        if (l.gp.edge != r2.gp.edge) return l.gp.edge < r2.gp.edge;
        return l.gp.t < r2.gp.t;
    });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const CandidatePoint& l, const CandidatePoint& r2) {
                              return l.gp.vertex == r2.gp.vertex && l.gp.edge == r2.gp.edge &&
                                     l.gp.t == r2.gp.t;
                          }),
              out.end());
    return out;
}

double TrajectoryIndex::same_edge_value(const CandidatePoint& b1, const CandidatePoint& b2,
                                        Point a1, Point a2) const {
    // The straight along-edge subsegment is optimal among within-edge walks,
    // and d_F of two segments is the larger endpoint distance.
    bool share_edge = false;
    if (same_point(*g_, b1.gp, b2.gp)) {
        share_edge = true;
    } else if (!b1.gp.is_vertex() && !b2.gp.is_vertex()) {
        share_edge = b1.gp.edge == b2.gp.edge;
    } else if (b1.gp.is_vertex() && !b2.gp.is_vertex()) {
        auto [c, d] = g_->edge(b2.gp.edge);
        share_edge = (b1.gp.vertex == c || b1.gp.vertex == d);
    } else if (!b1.gp.is_vertex() && b2.gp.is_vertex()) {
        auto [c, d] = g_->edge(b1.gp.edge);
        share_edge = (b2.gp.vertex == c || b2.gp.vertex == d);
    } else {
        for (const auto& h : g_->neighbors(b1.gp.vertex)) {
            if (h.to == b2.gp.vertex) {
                share_edge = true;
                break;
            }
        }
    }
    if (!share_edge) return kInf;
    return std::max(dist(b1.pos, a1), dist(b2.pos, a2));
}

namespace {

struct Pairing {
    int x, y;
    double s_lo, s_hi;
    double lb;
};

}  // namespace

bool TrajectoryIndex::cross_admissible(const CandidatePoint& b1, const CandidatePoint& b2,
                                       Point a1, Point a2, double r_clip, double r_prime,
                                       CapEntry& entry) const {
    if (entry.upper <= r_prime) return true;
    if (entry.complete) return false;

    // Endpoint pairings, cheapest lower bound first; a pairing is only
    // priced via the grid when its bound cannot already refute the
    // threshold.
    Segment traj{a1, a2};
    auto endpoints = [&](const CandidatePoint& b) {
        std::vector<int> es;
        if (b.gp.is_vertex()) {
            es.push_back(b.gp.vertex);
        } else {
            es.push_back(g_->edge(b.gp.edge).first);
            es.push_back(g_->edge(b.gp.edge).second);
        }
        return es;
    };
    std::vector<Pairing> pairings;
    for (int x : endpoints(b1)) {
        double s_lo;
        if (b1.gp.is_vertex()) {
            s_lo = 0.0;
        } else {
            Interval iv = free_interval(g_->vertex(x), traj, r_clip);
            if (iv.empty()) continue;
            s_lo = iv.lo;
        }
        for (int y : endpoints(b2)) {
            double s_hi;
            if (b2.gp.is_vertex()) {
                s_hi = 1.0;
            } else {
                Interval iv = free_interval(g_->vertex(y), traj, r_clip);
                if (iv.empty()) continue;
                s_hi = iv.hi;
            }
            if (s_lo > s_hi) continue;
            Segment clipped{traj.at(s_lo), traj.at(s_hi)};
            double lb = std::max(dist(g_->vertex(x), clipped.a), dist(g_->vertex(y), clipped.b));
            pairings.push_back({x, y, s_lo, s_hi, lb});
        }
    }
    std::sort(pairings.begin(), pairings.end(),
              [](const Pairing& a, const Pairing& b) { return a.lb < b.lb; });
    bool truncated = false;
    for (const Pairing& p : pairings) {
        if (p.lb >= entry.upper) break;
        if (p.lb > r_prime) {
            truncated = true;  // refuted for this threshold only
            break;
        }
        Segment clipped{traj.at(p.s_lo), traj.at(p.s_hi)};
        SegmentIndex::EpsValue v =
            s2_->query_fixed_endpoints_eps_bounded(p.x, p.y, clipped, r_prime);
        entry.upper = std::min(entry.upper, v.value);
        if (!v.exact) truncated = true;
        if (entry.upper <= r_prime) return true;
    }
    if (!truncated) entry.complete = true;
    return entry.upper <= r_prime;
}

double TrajectoryIndex::edge_arc_capacity(const CandidatePoint& b1, const CandidatePoint& b2,
                                          Point a1, Point a2, double r) const {
    double best = same_edge_value(b1, b2, a1, a2);
    if (dist(b1.pos, a1) > r || dist(b2.pos, a2) > r) return best;
    Segment traj{a1, a2};
    auto endpoints = [&](const CandidatePoint& b) {
        std::vector<int> es;
        if (b.gp.is_vertex()) {
            es.push_back(b.gp.vertex);
        } else {
            es.push_back(g_->edge(b.gp.edge).first);
            es.push_back(g_->edge(b.gp.edge).second);
        }
        return es;
    };
    for (int x : endpoints(b1)) {
        double s_lo;
        if (b1.gp.is_vertex()) {
            s_lo = 0.0;
        } else {
            Interval iv = free_interval(g_->vertex(x), traj, r);
            if (iv.empty()) continue;
            s_lo = iv.lo;
        }
        for (int y : endpoints(b2)) {
            double s_hi;
            if (b2.gp.is_vertex()) {
                s_hi = 1.0;
            } else {
                Interval iv = free_interval(g_->vertex(y), traj, r);
                if (iv.empty()) continue;
                s_hi = iv.hi;
            }
            if (s_lo > s_hi) continue;
            double mid =
                s2_->query_fixed_endpoints_eps(x, y, Segment{traj.at(s_lo), traj.at(s_hi)});
            best = std::min(best, mid);
        }
    }
    return best;
}

TrajectoryIndex::DecisionResult TrajectoryIndex::sweep(
    const Polyline& Q, const std::vector<std::vector<CandidatePoint>>& layers, double r,
    double r_prime, std::unordered_map<std::uint64_t, CapEntry>& cap_memo) const {
    const int q = static_cast<int>(Q.size());
    const int ecount = g_->edge_count();
    DecisionResult res;
    std::vector<std::vector<int>> pred(q);
    std::vector<std::vector<char>> reach(q);
    for (int i = 0; i < q; ++i) {
        pred[i].assign(layers[i].size(), -1);
        reach[i].assign(layers[i].size(), 0);
    }
    for (std::size_t j = 0; j < layers[0].size(); ++j) {
        reach[0][j] = dist(layers[0][j].pos, Q[0]) <= r_prime;
    }
    // Cross-edge capacities depend only on the location keys (the edge, or
    // the vertex for vertex-form candidates) and the clipped subsegment, so
    // they are evaluated once per key pair; per-candidate work reduces to
    // the same-edge formula and the endpoint filters.
    auto key_of = [&](const CandidatePoint& cp) {
        return cp.gp.is_vertex() ? ecount + cp.gp.vertex : cp.gp.edge;
    };
    for (int i = 0; i + 1 < q; ++i) {
        bool any = false;
        Point a1 = Q[i], a2 = Q[i + 1];
        // Bucket reachable predecessors: per edge, the least |b - a1| among
        // candidates on that edge (vertex forms join every incident edge);
        // per location key, one cross-capable representative.
        std::unordered_map<int, std::pair<double, int>> edge_best;  // edge -> (dist, pred)
        std::unordered_map<int, int> cross_rep;                     // key -> pred
        for (std::size_t j = 0; j < layers[i].size(); ++j) {
            if (!reach[i][j]) continue;
            const CandidatePoint& b = layers[i][j];
            double d1 = dist(b.pos, a1);
            auto fold = [&](int e) {
                auto it = edge_best.find(e);
                if (it == edge_best.end() || d1 < it->second.first) {
                    edge_best[e] = {d1, static_cast<int>(j)};
                }
            };
            if (b.gp.is_vertex()) {
                for (const auto& h : g_->neighbors(b.gp.vertex)) fold(h.edge);
            } else {
                fold(b.gp.edge);
            }
            if (d1 <= r) {
                int k = key_of(b);
                auto it = cross_rep.find(k);
                if (it == cross_rep.end()) cross_rep[k] = static_cast<int>(j);
            }
        }
        if (edge_best.empty() && cross_rep.empty()) return res;
        for (std::size_t k = 0; k < layers[i + 1].size(); ++k) {
            const CandidatePoint& bk = layers[i + 1][k];
            double d2 = dist(bk.pos, a2);
            if (d2 > r_prime) continue;
            // Same-edge stage: the arc value is max(|b_j - a1|, |b_k - a2|),
            // minimized by the bucket representative.
            auto try_same = [&](int e) {
                auto it = edge_best.find(e);
                if (it != edge_best.end() && std::max(it->second.first, d2) <= r_prime) {
                    reach[i + 1][k] = 1;
                    pred[i + 1][k] = it->second.second;
                    return true;
                }
                return false;
            };
            bool ok = false;
            if (bk.gp.is_vertex()) {
                for (const auto& h : g_->neighbors(bk.gp.vertex)) {
                    if ((ok = try_same(h.edge))) break;
                }
            } else {
                ok = try_same(bk.gp.edge);
            }
            if (!ok && d2 <= r) {
                int key_k = key_of(bk);
                for (const auto& [key_j, j] : cross_rep) {
                    std::uint64_t mk = (static_cast<std::uint64_t>(i) << 48) |
                                       (static_cast<std::uint64_t>(key_j) << 24) |
                                       static_cast<std::uint64_t>(key_k);
                    CapEntry& entry = cap_memo[mk];
                    if (cross_admissible(layers[i][j], bk, a1, a2, r, r_prime, entry)) {
                        reach[i + 1][k] = 1;
                        pred[i + 1][k] = j;
                        ok = true;
                        break;
                    }
                }
            }
            any = any || ok;
        }
        if (!any) return res;
    }
    int final_idx = -1;
    for (std::size_t j = 0; j < layers[q - 1].size(); ++j) {
        if (reach[q - 1][j]) {
            final_idx = static_cast<int>(j);
            break;
        }
    }
    if (final_idx < 0) return res;
    res.feasible = true;
    res.witness.assign(q, -1);
    res.witness[q - 1] = final_idx;
    for (int i = q - 1; i > 0; --i) res.witness[i - 1] = pred[i][res.witness[i]];
    return res;
}

double TrajectoryIndex::map_match_query(const Polyline& Q, double rel_tol,
                                        MatchDiagnostics* diag) const {
    if (!(rel_tol > 0)) throw input_error("rel_tol must be positive");
    const int q = static_cast<int>(Q.size());
    if (q == 1) {
        double best = kInf;
        int best_e = 0;
        for (int e = 0; e < g_->edge_count(); ++e) {
            double d = point_segment_distance(Q[0], g_->edge_segment(e));
            if (d < best) {
                best = d;
                best_e = e;
            }
        }
        if (diag) {
            Segment s = g_->edge_segment(best_e);
            Point dir = s.b - s.a;
            double len2 = norm2(dir);
            double t = len2 > 0 ? std::clamp(dot(Q[0] - s.a, dir) / len2, 0.0, 1.0) : 0.0;
            GraphPoint gp = normalize(*g_, GraphPoint::on_edge(best_e, t));
            diag->value = best;
            diag->layers = {{{gp, position(*g_, gp), false}}};
            diag->witness = {0};
        }
        return best;
    }

    const double ep = eps_prime();
    const double window = (1.0 + ep) * (1.0 + ep);
    double lo = 0.0;
    for (const Point& a : Q.vertices()) {
        double d = kInf;
        for (int e = 0; e < g_->edge_count(); ++e) {
            d = std::min(d, point_segment_distance(a, g_->edge_segment(e)));
        }
        lo = std::max(lo, d / 3.0);
    }
    double hi = kInf;
    for (const Point& p : g_->vertices()) {
        double worst = 0.0;
        for (const Point& a : Q.vertices()) worst = std::max(worst, dist(p, a));
        hi = std::min(hi, worst);
    }
    hi = std::max(hi, lo);

    struct Certified {
        double value = kInf;
        std::vector<std::vector<CandidatePoint>> layers;
        std::vector<int> witness;
    } best;

    auto decide = [&](double r) {
        // 0 feasible at r, 1 infeasible at the widened threshold, 2 window.
        std::vector<std::vector<CandidatePoint>> layers(q);
        bool empty = false;
        for (int i = 0; i < q; ++i) {
            layers[i] = candidate_points(Q[i], r);
            if (layers[i].empty()) empty = true;
        }
        if (empty) return 1;
        // Clip slightly beyond r: covering anchors sit up to eps_cov * r off
        // the optimal path's matched points, and a clip at r exactly would
        // disconnect that chain. Certified piece costs become
        // max(r_clip, threshold).
        double r_clip = (1.0 + 1.5 * eps_cov()) * r;
        std::unordered_map<std::uint64_t, CapEntry> cap_memo;
        DecisionResult d1 = sweep(Q, layers, r_clip, r, cap_memo);
        if (d1.feasible) {
            if (r_clip < best.value) best = {r_clip, std::move(layers), std::move(d1.witness)};
            return 0;
        }
        DecisionResult d2 = sweep(Q, layers, r_clip, window * r, cap_memo);
        if (d2.feasible) {
            // Refine inside the window: feasibility is monotone in the
            // threshold and capacities are already memoized, so a few extra
            // sweeps certify a tighter value on the same DAG.
            double flo = r, fhi = window * r;
            DecisionResult dbest = std::move(d2);
            for (int i = 0; i < 12 && fhi > flo * (1 + 1e-9); ++i) {
                double mid = 0.5 * (flo + fhi);
                DecisionResult dm = sweep(Q, layers, r_clip, mid, cap_memo);
                if (dm.feasible) {
                    fhi = mid;
                    dbest = std::move(dm);
                } else {
                    flo = mid;
                }
            }
            double certified = std::max(fhi, r_clip);
            if (certified < best.value) {
                best = {certified, std::move(layers), std::move(dbest.witness)};
            }
            return 2;
        }
        return 1;
    };

    bool window_exit = false;
    for (int it = 0; it < 80; ++it) {
        if (hi <= lo * (1.0 + rel_tol) || hi - lo <= hi * 4e-16) break;
        double r = 0.5 * (lo + hi);
        if (r <= lo || r >= hi) break;
        int kind = decide(r);
        if (kind == 0) {
            hi = r;
        } else if (kind == 2) {
            window_exit = true;  // best already records the certified value
            break;
        } else {
            lo = r;
        }
    }
    // Certify the bracket end if bisection never produced a witness.
    if (!window_exit && best.witness.empty()) {
        double r = hi;
        for (int rounds = 0; rounds < 200 && decide(r) == 1; ++rounds) r *= 1.0 + ep;
    }
    if (!best.witness.empty() && diag) {
        diag->value = best.value;
        diag->layers = best.layers;
        diag->witness = best.witness;
    }
    return best.value;
}

}  // namespace mapmatch

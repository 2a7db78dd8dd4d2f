#include "mapmatch/gadgets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "mapmatch/common.hpp"
#include "mapmatch/freespace.hpp"

namespace mapmatch {

Polyline base_curve(BaseCurveKind kind, double h) {
    if (!(h > 0)) throw input_error("base curve height must be positive");
    double s;
    switch (kind) {
        case BaseCurveKind::one_a: s = 12; break;
        case BaseCurveKind::zero_b: s = 13; break;
        case BaseCurveKind::zero_a: s = 14; break;
        default: s = 15; break;
    }
    // (0,0) > (s,0) > (s,h) > (18-s,h) > (18-s,2h) > (18,2h)
    return Polyline({{0, 0}, {s, 0}, {s, h}, {18 - s, h}, {18 - s, 2 * h}, {18, 2 * h}});
}

bool OvInstance::brute_force_yes() const {
    for (const auto& va : a) {
        for (const auto& vb : b) {
            bool orth = true;
            for (int k = 0; k < d && orth; ++k) orth = (va[k] & vb[k]) == 0;
            if (orth) return true;
        }
    }
    return false;
}

OvInstance random_ov(int n, int m, int d, std::uint64_t seed, int force) {
    if (n < 1 || m < 1 || d < 1) throw input_error("OV instance needs n, m, d >= 1");
    std::mt19937_64 rng(split_seed(seed, 0x0f01));
    std::bernoulli_distribution bit(0.5);
    OvInstance ov;
    ov.d = d;
    ov.a.assign(n, std::vector<int>(d));
    ov.b.assign(m, std::vector<int>(d));
    for (auto& v : ov.a) {
        for (int& x : v) x = bit(rng);
    }
    for (auto& v : ov.b) {
        for (int& x : v) x = bit(rng);
    }
    if (force == 1) {
        int i = static_cast<int>(rng() % n), j = static_cast<int>(rng() % m);
        for (int k = 0; k < d; ++k) {
            if (ov.a[i][k] == 1) ov.b[j][k] = 0;
        }
    } else if (force == 2) {
        // A shared always-on coordinate rules out orthogonal pairs.
        for (auto& v : ov.a) v[0] = 1;
        for (auto& v : ov.b) v[0] = 1;
    }
    return ov;
}

namespace {

std::vector<Point> translated(const Polyline& c, double dx, double dy) {
    std::vector<Point> out;
    out.reserve(c.size());
    for (const Point& p : c.vertices()) out.push_back({p.x + dx, p.y + dy});
    return out;
}

void append(std::vector<Point>& stroke, const std::vector<Point>& pts) {
    for (const Point& p : pts) {
        if (stroke.empty() || !(stroke.back() == p)) stroke.push_back(p);
    }
}

}  // namespace

GadgetInstance build_gadget(const OvInstance& ov, double h) {
    const int p = static_cast<int>(ov.a.size());
    const int q = static_cast<int>(ov.b.size());
    const int d = ov.d;
    if (p < 1 || q < 1 || d < 1) throw input_error("OV instance needs n, m, d >= 1");
    // The S-block vertical offset drives the YES-side slack; keep the total
    // additive error comfortably below the 0.001 budget.
    double s_mult = std::max(7.0 * p, 4.0 * p + 9.0);
    double h_safe = 5e-4 / s_mult;
    if (h <= 0) h = std::min(1e-4 / p, h_safe);

    // T_i heights start above U's return edge at 3h so no connector is
    // collinear with it.
    auto t_height = [&](int i) { return 3.0 * (i + 2) * h; };
    double yv = std::max(6.0 * p, 3.0 * (p + 1) + 6.0) * h;  // V loop height
    double ys = yv + p * h;                                  // S block height
    double xr = 36.0 * d;                                    // right anchor x

    Polyline zero_a = base_curve(BaseCurveKind::zero_a, h);
    Polyline one_a = base_curve(BaseCurveKind::one_a, h);

    std::vector<std::vector<Point>> strokes;
    // U: start spike, the R blocks, and the return loop at height 3h.
    {
        std::vector<Point> u;
        append(u, {{0, -18}, {0, 0}});
        for (int k = 1; k <= d; ++k) append(u, translated(zero_a, 18.0 * k, 0.0));
        append(u, {{xr, 3 * h}, {0, 3 * h}, {0, 0}});
        strokes.push_back(std::move(u));
    }
    // V: the S blocks and the upper loop ending at the exit spike.
    {
        std::vector<Point> v;
        append(v, {{0, yv}});
        for (int k = 1; k <= d; ++k) append(v, translated(zero_a, 18.0 * k, ys));
        append(v, {{xr, yv}, {0, yv}, {0, 18}});
        strokes.push_back(std::move(v));
    }
    // T_i blocks plus their connectors.
    for (int i = 0; i < p; ++i) {
        double y = t_height(i);
        std::vector<Point> t;
        append(t, {{0, 3 * h}, {18, y}});
        for (int k = 1; k <= d; ++k) {
            append(t, translated(ov.a[i][k - 1] ? one_a : zero_a, 18.0 * k, y));
        }
        double x_end = 18.0 * (d + 1);
        double y_end = y + 2 * h;
        if (x_end >= xr) {
            // d == 1: connectors to the common anchor would overlap on the
            // vertical line; nested bows keep them disjoint.
            double kappa = p * h * std::pow((yv - y_end) / (yv - t_height(0) - 2 * h), 2.0);
            append(t, {{x_end + kappa, 0.5 * (y_end + yv)}, {xr, yv}});
        } else {
            append(t, {{xr, yv}});
        }
        strokes.push_back(std::move(t));
    }

    // Merge vertices by exact coordinate equality.
    std::map<std::pair<double, double>, int> vid;
    std::vector<Point> verts;
    std::vector<std::pair<int, int>> edges;
    std::map<std::pair<int, int>, bool> seen_edge;
    auto vertex_of = [&](Point pt) {
        auto key = std::make_pair(pt.x, pt.y);
        auto it = vid.find(key);
        if (it != vid.end()) return it->second;
        int id = static_cast<int>(verts.size());
        verts.push_back(pt);
        vid.emplace(key, id);
        return id;
    };
    for (const auto& stroke : strokes) {
        for (std::size_t i = 0; i + 1 < stroke.size(); ++i) {
            int a = vertex_of(stroke[i]);
            int b = vertex_of(stroke[i + 1]);
            if (a == b) continue;
            auto key = std::minmax(a, b);
            if (!seen_edge.emplace(key, true).second) continue;
            edges.push_back({a, b});
        }
    }

    // Trajectory Q from the W_j blocks.
    std::vector<Point> traj;
    append(traj, {{0, -18}});
    Polyline zero_b = base_curve(BaseCurveKind::zero_b, h);
    Polyline one_b = base_curve(BaseCurveKind::one_b, h);
    for (int j = 0; j < q; ++j) {
        append(traj, {{0, 0}});
        for (int k = 1; k <= d; ++k) {
            append(traj, translated(ov.b[j][k - 1] ? one_b : zero_b, 18.0 * k, 0.0));
        }
        append(traj, {{xr, 0}, {0, 3 * h}});
    }
    append(traj, {{0, 18}});

    GadgetInstance gi{GeometricGraph(std::move(verts), std::move(edges)),
                      Polyline(std::move(traj)), h, ov.brute_force_yes()};
    return gi;
}

GapResult verify_gap(const GadgetInstance& gi, double rel_tol, std::size_t complexity_cap) {
    std::size_t work = static_cast<std::size_t>(gi.graph.complexity()) * gi.trajectory.size();
    if (work > complexity_cap) {
        throw input_error("gadget instance exceeds the exact-matcher complexity cap");
    }
    GapResult res;
    res.value = match_exact(gi.graph, gi.trajectory, rel_tol);
    if (gi.is_yes) {
        res.gap_ok = res.value <= 1.001 * (1.0 + rel_tol);
    } else {
        res.gap_ok = res.value >= 3.0 / (1.0 + rel_tol);
    }
    return res;
}

}  // namespace mapmatch

#include <algorithm>
#include <cmath>
#include <random>

#include "mapmatch/common.hpp"
#include "mapmatch/graph.hpp"
#include "mapmatch/parallel.hpp"

namespace mapmatch {

double edge_length_in_ball(const GeometricGraph& g, Point center, double radius) {
    double total = 0.0;
    for (int e = 0; e < g.edge_count(); ++e) {
        Interval iv = free_interval(center, g.edge_segment(e), radius);
        if (!iv.empty()) total += (iv.hi - iv.lo) * g.edge_length(e);
    }
    return total;
}

namespace {

struct Candidate {
    Point center;
    double radius;
};

double ratio(const GeometricGraph& g, const Candidate& c) {
    if (!(c.radius > 0)) return 0.0;
    return edge_length_in_ball(g, c.center, c.radius) / c.radius;
}

}  // namespace

PackednessReport estimate_packedness(const GeometricGraph& g, int samples, std::uint64_t seed) {
    if (samples < 1) throw input_error("samples must be >= 1");
    std::vector<Candidate> cands;

    // Per-vertex balls at incident-edge critical radii; a radius equal to the
    // shortest incident edge certifies ratio >= degree.
    for (int v = 0; v < g.vertex_count(); ++v) {
        double mn = 0.0, mx = 0.0;
        bool first = true;
        for (const auto& h : g.neighbors(v)) {
            double len = g.edge_length(h.edge);
            mn = first ? len : std::min(mn, len);
            mx = first ? len : std::max(mx, len);
            first = false;
        }
        if (first) continue;
        cands.push_back({g.vertex(v), mn});
        cands.push_back({g.vertex(v), mx});
        cands.push_back({g.vertex(v), 2.0 * mx});
    }
    // Edge midpoints at half-length and at the local scale.
    for (int e = 0; e < g.edge_count(); ++e) {
        Segment s = g.edge_segment(e);
        Point mid = s.at(0.5);
        cands.push_back({mid, 0.5 * g.edge_length(e)});
        cands.push_back({mid, g.edge_length(e)});
    }
    // Whole-graph ball: the binding candidate on dense networks.
    Point lo = g.bbox_min(), hi = g.bbox_max();
    Point center = {0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)};
    double half_diag = 0.5 * g.bbox_diagonal();
    if (half_diag > 0) {
        cands.push_back({center, half_diag});
        cands.push_back({center, 0.5 * half_diag});
        cands.push_back({center, 0.25 * half_diag});
    }
    // Seeded random centers with radii spanning the graph scale.
    std::mt19937_64 rng(split_seed(seed, 0xc0ffee));
    std::uniform_real_distribution<double> ux(lo.x, std::nextafter(hi.x, hi.x + 1.0));
    std::uniform_real_distribution<double> uy(lo.y, std::nextafter(hi.y, hi.y + 1.0));
    double scale = std::max(half_diag, 1e-12);
    for (int i = 0; i < samples; ++i) {
        Point c = {ux(rng), uy(rng)};
        double frac = std::pow(2.0, -static_cast<double>(i % 8));
        cands.push_back({c, scale * frac});
    }

    std::vector<double> ratios(cands.size());
    parallel_for(cands.size(), true, [&](std::size_t i) { ratios[i] = ratio(g, cands[i]); });

    PackednessReport rep;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (ratios[i] > rep.c_estimate) {
            rep.c_estimate = ratios[i];
            rep.witness_center = cands[i].center;
            rep.witness_radius = cands[i].radius;
        }
    }
    return rep;
}

}  // namespace mapmatch

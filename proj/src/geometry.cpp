#include "mapmatch/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "mapmatch/common.hpp"

namespace mapmatch {

double point_segment_distance(Point p, const Segment& s) {
    Point d = s.b - s.a;
    double len2 = norm2(d);
    if (len2 == 0.0) return dist(p, s.a);
    double t = dot(p - s.a, d) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return dist(p, s.at(t));
}

Interval free_interval(Point p, const Segment& s, double r) {
    if (r < 0) return Interval::none();
    Point d = s.b - s.a;
    double a = norm2(d);
    if (a == 0.0) {
        return dist(p, s.a) <= r ? Interval::full() : Interval::none();
    }
    Point w = s.a - p;
    double b = dot(w, d);
    double c = norm2(w) - r * r;
    double disc = b * b - a * c;
    if (disc < 0) return Interval::none();
    double sq = std::sqrt(disc);
    double lo = (-b - sq) / a;
    double hi = (-b + sq) / a;
    lo = std::max(lo, 0.0);
    hi = std::min(hi, 1.0);
    if (lo > hi) return Interval::none();
    return {lo, hi};
}

FreeSpaceCell cell_free_space(const Segment& e, const Segment& f, double r) {
    FreeSpaceCell cell;
    cell.left = free_interval(e.a, f, r);
    cell.right = free_interval(e.b, f, r);
    cell.bottom = free_interval(f.a, e, r);
    cell.top = free_interval(f.b, e, r);
    return cell;
}

namespace {

int orientation(Point a, Point b, Point c) {
    double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if (v > 0) return 1;
    if (v < 0) return -1;
    return 0;
}

bool within_bbox(Point a, Point b, Point c) {
    return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_cross(const Segment& s, const Segment& t) {
    Point p1 = s.a, q1 = s.b, p2 = t.a, q2 = t.b;
    int shared = (p1 == p2) + (p1 == q2) + (q1 == p2) + (q1 == q2);
    if (shared >= 2) return true;  // identical or reversed segments overlap
    if (shared == 1) {
        // Sharing one endpoint is fine unless the segments overlap beyond it.
        Point common = (p1 == p2 || p1 == q2) ? p1 : q1;
        Point sa = (common == p1) ? q1 : p1;
        Point ta = (common == p2) ? q2 : p2;
        if (orientation(common, sa, ta) != 0) return false;
        // Collinear: overlap iff the free ends point the same way.
        return dot(sa - common, ta - common) > 0;
    }
    int o1 = orientation(p1, q1, p2);
    int o2 = orientation(p1, q1, q2);
    int o3 = orientation(p2, q2, p1);
    int o4 = orientation(p2, q2, q1);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && within_bbox(p1, q1, p2)) return true;
    if (o2 == 0 && within_bbox(p1, q1, q2)) return true;
    if (o3 == 0 && within_bbox(p2, q2, p1)) return true;
    if (o4 == 0 && within_bbox(p2, q2, q1)) return true;
    return false;
}

Polyline::Polyline(std::vector<Point> vertices) : verts_(std::move(vertices)) {
    if (verts_.empty()) throw input_error("polyline needs at least one vertex");
    for (const Point& p : verts_) {
        if (!finite(p)) throw input_error("polyline has non-finite coordinates");
    }
    cum_.resize(verts_.size());
    cum_[0] = 0.0;
    for (std::size_t i = 1; i < verts_.size(); ++i) {
        cum_[i] = cum_[i - 1] + dist(verts_[i - 1], verts_[i]);
    }
}

Point Polyline::at(double t) const {
    if (verts_.size() == 1) return verts_[0];
    t = std::clamp(t, 0.0, static_cast<double>(verts_.size() - 1));
    std::size_t i = std::min(static_cast<std::size_t>(t), verts_.size() - 2);
    double frac = t - static_cast<double>(i);
    return segment(i).at(frac);
}

Polyline Polyline::reversed() const {
    std::vector<Point> v(verts_.rbegin(), verts_.rend());
    return Polyline(std::move(v));
}

namespace {

// Reachable portion of a boundary interval: a suffix [lb, free.hi] of the
// boundary's free interval, identified by its lower bound. -1 marks "none".
constexpr double kNone = -1.0;

bool point_vs_polyline(const Point& p, const Polyline& poly, double r) {
    // d_F(point, curve) is the max vertex distance (per-segment distance to a
    // fixed point is convex, so maxima sit at vertices).
    for (const Point& q : poly.vertices()) {
        if (dist(p, q) > r) return false;
    }
    return true;
}

}  // namespace

bool frechet_decide(const Polyline& A, const Polyline& B, double r) {
    if (!(r >= 0) || !std::isfinite(r)) throw input_error("threshold must be finite and >= 0");
    if (dist(A.front(), B.front()) > r || dist(A.back(), B.back()) > r) return false;
    if (A.size() == 1) return point_vs_polyline(A[0], B, r);
    if (B.size() == 1) return point_vs_polyline(B[0], A, r);

    const std::size_t nseg = A.segment_count();
    const std::size_t mseg = B.segment_count();

    // Lower bounds of the reachable suffixes on the vertical boundaries of
    // the current column (A vertex i vs each B segment).
    std::vector<double> rv(mseg, kNone), next_rv(mseg, kNone);

    // Column 0: climb along x = 0 while boundary intervals stay contiguous.
    bool alive = true;
    for (std::size_t j = 0; j < mseg && alive; ++j) {
        Interval f = free_interval(A[0], B.segment(j), r);
        if (j == 0) {
            rv[j] = (f.contains(0.0)) ? 0.0 : kNone;
        } else {
            rv[j] = (f.lo <= 0.0 && !f.empty()) ? 0.0 : kNone;
        }
        alive = rv[j] != kNone && f.hi >= 1.0;
    }

    // Reachable lower bounds along the bottom row (B vertex 0 vs A segments).
    std::vector<double> bottom(nseg, kNone);
    alive = true;
    for (std::size_t i = 0; i < nseg && alive; ++i) {
        Interval f = free_interval(B[0], A.segment(i), r);
        if (i == 0) {
            bottom[i] = f.contains(0.0) ? 0.0 : kNone;
        } else {
            bottom[i] = (f.lo <= 0.0 && !f.empty()) ? 0.0 : kNone;
        }
        alive = bottom[i] != kNone && f.hi >= 1.0;
    }

    for (std::size_t i = 0; i < nseg; ++i) {
        double rh = bottom[i];
        for (std::size_t j = 0; j < mseg; ++j) {
            double fleft = rv[j];
            double fbot = rh;
            if (i + 1 == nseg && j + 1 == mseg) {
                // End corner is free (checked upfront); reachable from any
                // entry of this convex cell.
                if (fleft != kNone || fbot != kNone) return true;
            }
            // Right exit.
            Interval fr = free_interval(A[i + 1], B.segment(j), r);
            double out = kNone;
            if (!fr.empty()) {
                if (fbot != kNone) {
                    out = fr.lo;
                } else if (fleft != kNone) {
                    double t0 = std::max(fleft, fr.lo);
                    if (t0 <= fr.hi) out = t0;
                }
            }
            next_rv[j] = out;
            // Top exit.
            Interval ft = free_interval(B[j + 1], A.segment(i), r);
            double up = kNone;
            if (!ft.empty()) {
                if (fleft != kNone) {
                    up = ft.lo;
                } else if (fbot != kNone) {
                    double s0 = std::max(fbot, ft.lo);
                    if (s0 <= ft.hi) up = s0;
                }
            }
            rh = up;
        }
        std::swap(rv, next_rv);
    }
    return false;
}

double frechet_distance(const Polyline& A, const Polyline& B, double rel_tol) {
    if (!(rel_tol > 0)) throw input_error("rel_tol must be positive");
    double lo = std::max(dist(A.front(), B.front()), dist(A.back(), B.back()));
    double hi = 0.0;
    for (const Point& p : A.vertices()) {
        for (const Point& q : B.vertices()) hi = std::max(hi, dist(p, q));
    }
    if (hi <= lo) return lo;
    double v = minimize_monotone([&](double r) { return frechet_decide(A, B, r); }, lo, hi, rel_tol);
    return std::max(v, lo);
}

}  // namespace mapmatch

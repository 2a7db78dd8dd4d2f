#ifndef MAPMATCH_GEOMETRY_HPP
#define MAPMATCH_GEOMETRY_HPP

#include <cmath>
#include <vector>

namespace mapmatch {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
    friend bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm2(Point p) { return dot(p, p); }
inline double dist(Point a, Point b) { return std::sqrt(norm2(a - b)); }
inline bool finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

struct Segment {
    Point a;
    Point b;

    double length() const { return dist(a, b); }
    Point at(double t) const { return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}; }
    Segment reversed() const { return {b, a}; }
};

// Closed subinterval of [0,1]; empty when lo > hi.
struct Interval {
    double lo = 1.0;
    double hi = 0.0;

    bool empty() const { return lo > hi; }
    bool contains(double t) const { return lo <= t && t <= hi; }
    static Interval full() { return {0.0, 1.0}; }
    static Interval none() { return {1.0, 0.0}; }
};

double point_segment_distance(Point p, const Segment& s);

// Parameters t of s with d(p, s(t)) <= r, clipped to [0,1]. The sublevel set
// of a convex function, hence a single closed interval.
Interval free_interval(Point p, const Segment& s, double r);

// Free portions of the four boundaries of the parameter cell of e (x-axis)
// versus f (y-axis) at threshold r. Free space is closed (<= r).
struct FreeSpaceCell {
    Interval left;    // e.a vs f
    Interval right;   // e.b vs f
    Interval bottom;  // e vs f.a
    Interval top;     // e vs f.b
};

FreeSpaceCell cell_free_space(const Segment& e, const Segment& f, double r);

// True iff the segments share a point other than a common endpoint
// (includes collinear overlap). Used by planarity scans.
bool segments_cross(const Segment& s, const Segment& t);

class Polyline {
  public:
    Polyline() = default;
    explicit Polyline(std::vector<Point> vertices);

    const std::vector<Point>& vertices() const { return verts_; }
    const std::vector<double>& cumulative_length() const { return cum_; }
    std::size_t size() const { return verts_.size(); }
    const Point& operator[](std::size_t i) const { return verts_[i]; }
    const Point& front() const { return verts_.front(); }
    const Point& back() const { return verts_.back(); }
    double length() const { return cum_.back(); }
    std::size_t segment_count() const { return verts_.size() - 1; }
    Segment segment(std::size_t i) const { return {verts_[i], verts_[i + 1]}; }

    // Piecewise-linear position at parameter t in [0, size()-1].
    Point at(double t) const;

    Polyline reversed() const;

  private:
    std::vector<Point> verts_;
    std::vector<double> cum_;
};

// Decides d_F(A, B) <= r over monotone reparameterizations (free space is
// closed, so the decision is true at r equal to the distance).
bool frechet_decide(const Polyline& A, const Polyline& B, double r);

// Bisection over frechet_decide; returns v with d_F <= v <= (1+rel_tol)*d_F.
double frechet_distance(const Polyline& A, const Polyline& B, double rel_tol = 1e-9);

// Shared bisection driver for monotone decision procedures. Requires
// decide(hi) true; returns the hi end of the final bracket. If decide(lo)
// holds, returns lo exactly.
template <typename Decide>
double minimize_monotone(Decide&& decide, double lo, double hi, double rel_tol) {
    if (lo < 0) lo = 0;
    if (hi < lo) hi = lo;
    if (decide(lo)) return lo;
    // Halve downward first: decision cost shrinks with r, so this keeps the
    // expensive early probes to a minimum before regular bisection.
    while (hi > 2 * lo && hi > 1e-300) {
        double mid = hi / 2;
        if (mid <= lo) break;
        if (!decide(mid)) {
            lo = mid;
            break;
        }
        hi = mid;
    }
    for (int it = 0; it < 80; ++it) {
        if (hi <= lo * (1.0 + rel_tol) || hi - lo <= hi * 4e-16) break;
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (decide(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

}  // namespace mapmatch

#endif

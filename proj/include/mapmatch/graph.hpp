#ifndef MAPMATCH_GRAPH_HPP
#define MAPMATCH_GRAPH_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mapmatch/geometry.hpp"

namespace mapmatch {

// Plane-embedded connected undirected graph. Immutable after construction;
// edge lengths are Euclidean. Complexity p = |V| + |E|.
class GeometricGraph {
  public:
    struct HalfEdge {
        int to;
        int edge;
    };

    GeometricGraph(std::vector<Point> vertices, std::vector<std::pair<int, int>> edges);

    int vertex_count() const { return static_cast<int>(verts_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    int complexity() const { return vertex_count() + edge_count(); }
    const Point& vertex(int v) const { return verts_[v]; }
    const std::vector<Point>& vertices() const { return verts_; }
    const std::pair<int, int>& edge(int e) const { return edges_[e]; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    double edge_length(int e) const { return lengths_[e]; }
    Segment edge_segment(int e) const {
        return {verts_[edges_[e].first], verts_[edges_[e].second]};
    }
    const std::vector<HalfEdge>& neighbors(int v) const { return adj_[v]; }
    double total_edge_length() const { return total_length_; }

    // Smallest axis-aligned box containing all vertices.
    Point bbox_min() const { return bbox_min_; }
    Point bbox_max() const { return bbox_max_; }
    double bbox_diagonal() const { return dist(bbox_min_, bbox_max_); }

  private:
    std::vector<Point> verts_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<double> lengths_;
    std::vector<std::vector<HalfEdge>> adj_;
    Point bbox_min_, bbox_max_;
    double total_length_ = 0.0;
};

// A point on the graph: either a vertex, or a position t in [0,1] along an
// edge. Edge-endpoint forms normalize to the vertex form so the two compare
// equal.
struct GraphPoint {
    int vertex = -1;  // >= 0 for vertex form
    int edge = -1;    // >= 0 for edge form
    double t = 0.0;

    static GraphPoint at_vertex(int v) { return {v, -1, 0.0}; }
    static GraphPoint on_edge(int e, double t) { return {-1, e, t}; }
    bool is_vertex() const { return vertex >= 0; }
};

GraphPoint normalize(const GeometricGraph& g, GraphPoint p);
Point position(const GeometricGraph& g, const GraphPoint& p);
bool same_point(const GeometricGraph& g, const GraphPoint& a, const GraphPoint& b);

// Shortest-path distance under the graph metric (edge-interior points handled
// by transient splitting of their edges).
double graph_distance(const GeometricGraph& g, const GraphPoint& u, const GraphPoint& v);

// Dijkstra from a single vertex to all vertices.
std::vector<double> vertex_distances(const GeometricGraph& g, int source);
// Dijkstra from a set of seeded vertices (distance offsets allowed).
std::vector<double> multi_source_distances(const GeometricGraph& g,
                                           const std::vector<std::pair<int, double>>& seeds);

struct PackednessReport {
    double c_estimate = 0.0;
    Point witness_center;
    double witness_radius = 0.0;
};

// Total length of graph edges inside the closed ball.
double edge_length_in_ball(const GeometricGraph& g, Point center, double radius);

// Sampled lower bound on the packedness constant c. Candidate balls sit at
// vertices, edge midpoints, and seeded random centers, with radii at
// pairwise-distance critical values. Deterministic given the seed.
PackednessReport estimate_packedness(const GeometricGraph& g, int samples, std::uint64_t seed);

// Perturbed-grid road network: unit spacing, jittered vertices, random
// non-bridge edge deletions while the sampled packedness exceeds target_c,
// then diagonal shortcuts while the budget allows. Deterministic given seed.
GeometricGraph generate_network(int width, int height, double target_c, double jitter,
                                std::uint64_t seed);

// File formats: JSON {"vertices": [[x,y],...], "edges": [[i,j],...]} or CSV
// with "v,x,y" / "e,i,j" rows. Decimal output uses 17 significant digits so
// coordinates round-trip bit-exactly.
GeometricGraph load_graph(const std::string& path, bool split_components = false);
void save_graph(const GeometricGraph& g, const std::string& path);
Polyline load_trajectory(const std::string& path);
void save_trajectory(const Polyline& q, const std::string& path);

// Largest connected component as a standalone graph (--split-components).
GeometricGraph largest_component(const std::vector<Point>& vertices,
                                 const std::vector<std::pair<int, int>>& edges);

// Copy of g with the given points inserted as vertices (used to align path
// spaces when comparing against mid-edge matching).
GeometricGraph subdivide_at(const GeometricGraph& g, const std::vector<GraphPoint>& points);

}  // namespace mapmatch

#endif

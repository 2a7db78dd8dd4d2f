#ifndef MAPMATCH_SSPD_HPP
#define MAPMATCH_SSPD_HPP

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "mapmatch/graph.hpp"

namespace mapmatch {

// Semi-separated pair decomposition over the graph vertices, built from a
// fair split tree. Every unordered vertex pair is covered by exactly one
// emitted pair, and each pair satisfies min(diam A, diam B) <= s * d(A, B).
// The build checks the predicate on bounding boxes (diameter overestimated,
// set distance underestimated), so emitted pairs satisfy the exact predicate.
class SspdIndex {
  public:
    struct Node {
        int left = -1;
        int right = -1;
        int parent = -1;
        int begin = 0;  // range of vertex_order_
        int end = 0;
        int depth = 0;
        Point bmin, bmax;
    };

    struct PairRec {
        int node_a;
        int node_b;
    };

    double separation() const { return separation_; }
    int pair_count() const { return static_cast<int>(pairs_.size()); }
    const PairRec& pair(int id) const { return pairs_[id]; }
    std::span<const int> node_vertices(int node) const {
        return {vertex_order_.data() + nodes_[node].begin,
                static_cast<std::size_t>(nodes_[node].end - nodes_[node].begin)};
    }
    std::size_t total_weight() const { return total_weight_; }
    const std::vector<Node>& nodes() const { return nodes_; }

    // The unique pair covering (u, v); sides oriented so u is in side_a.
    struct Lookup {
        int pair_id;
        std::span<const int> side_a;
        std::span<const int> side_b;
    };
    Lookup lookup_pair(int u, int v) const;

    friend SspdIndex build_sspd(const GeometricGraph& g, double s);

  private:
    double separation_ = 0.5;
    std::vector<int> vertex_order_;
    std::vector<int> position_;  // vertex -> index in vertex_order_
    std::vector<int> leaf_of_;   // vertex -> leaf node
    std::vector<Node> nodes_;
    std::vector<PairRec> pairs_;
    std::unordered_map<std::uint64_t, int> pair_of_;
    std::size_t total_weight_ = 0;

    bool separated(int a, int b) const;
    bool contains(int node, int vertex) const {
        int p = position_[vertex];
        return nodes_[node].begin <= p && p < nodes_[node].end;
    }
};

SspdIndex build_sspd(const GeometricGraph& g, double s = 0.5);

}  // namespace mapmatch

#endif

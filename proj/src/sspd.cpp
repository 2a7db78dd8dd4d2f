#include "mapmatch/sspd.hpp"

#include <algorithm>
#include <cmath>

#include "mapmatch/common.hpp"

namespace mapmatch {

namespace {

std::uint64_t pair_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double bbox_diag(const SspdIndex::Node& n) { return dist(n.bmin, n.bmax); }

double bbox_distance(const SspdIndex::Node& a, const SspdIndex::Node& b) {
    double dx = std::max({0.0, a.bmin.x - b.bmax.x, b.bmin.x - a.bmax.x});
    double dy = std::max({0.0, a.bmin.y - b.bmax.y, b.bmin.y - a.bmax.y});
    return std::hypot(dx, dy);
}

}  // namespace

bool SspdIndex::separated(int a, int b) const {
    double da = bbox_diag(nodes_[a]);
    double db = bbox_diag(nodes_[b]);
    return std::min(da, db) <= separation_ * bbox_distance(nodes_[a], nodes_[b]);
}

SspdIndex build_sspd(const GeometricGraph& g, double s) {
    if (!(s > 0)) throw input_error("separation constant must be positive");
    if (g.vertex_count() < 2) throw input_error("SSPD needs at least 2 vertices");

    SspdIndex idx;
    idx.separation_ = s;
    const int n = g.vertex_count();
    idx.vertex_order_.resize(n);
    for (int v = 0; v < n; ++v) idx.vertex_order_[v] = v;
    idx.position_.resize(n);
    idx.leaf_of_.assign(n, -1);

    auto& nodes = idx.nodes_;
    auto& order = idx.vertex_order_;

    auto make_node = [&](int begin, int end, int parent, int depth) {
        SspdIndex::Node node;
        node.begin = begin;
        node.end = end;
        node.parent = parent;
        node.depth = depth;
        node.bmin = node.bmax = g.vertex(order[begin]);
        for (int i = begin; i < end; ++i) {
            const Point& p = g.vertex(order[i]);
            node.bmin.x = std::min(node.bmin.x, p.x);
            node.bmin.y = std::min(node.bmin.y, p.y);
            node.bmax.x = std::max(node.bmax.x, p.x);
            node.bmax.y = std::max(node.bmax.y, p.y);
        }
        nodes.push_back(node);
        return static_cast<int>(nodes.size()) - 1;
    };

    // Fair split: cut the longest bounding-box side at its midpoint, falling
    // back to a balanced split when all points land on one side.
    std::vector<std::pair<int, int>> todo;
    int root = make_node(0, n, -1, 0);
    todo.push_back({root, 0});
    while (!todo.empty()) {
        auto [id, depth] = todo.back();
        todo.pop_back();
        int begin = nodes[id].begin, end = nodes[id].end;
        if (end - begin == 1) {
            idx.leaf_of_[order[begin]] = id;
            continue;
        }
        bool split_x = (nodes[id].bmax.x - nodes[id].bmin.x) >=
                       (nodes[id].bmax.y - nodes[id].bmin.y);
        auto coord = [&](int v) { return split_x ? g.vertex(v).x : g.vertex(v).y; };
        std::sort(order.begin() + begin, order.begin() + end, [&](int a, int b) {
            double ca = coord(a), cb = coord(b);
            if (ca != cb) return ca < cb;
            double oa = split_x ? g.vertex(a).y : g.vertex(a).x;
            double ob = split_x ? g.vertex(b).y : g.vertex(b).x;
            if (oa != ob) return oa < ob;
            return a < b;
        });
        double mid = split_x ? 0.5 * (nodes[id].bmin.x + nodes[id].bmax.x)
                             : 0.5 * (nodes[id].bmin.y + nodes[id].bmax.y);
        int cut = begin;
        while (cut < end && coord(order[cut]) <= mid) ++cut;
        if (cut == begin || cut == end) cut = begin + (end - begin) / 2;
        int left = make_node(begin, cut, id, depth + 1);
        int right = make_node(cut, end, id, depth + 1);
        nodes[id].left = left;
        nodes[id].right = right;
        todo.push_back({left, depth + 1});
        todo.push_back({right, depth + 1});
    }
    for (int i = 0; i < n; ++i) idx.position_[order[i]] = i;

    // WSPD-style pairing: emit when semi-separated, otherwise recurse on the
    // side with the larger bounding-box diameter.
    idx.total_weight_ = 0;
    std::vector<std::pair<int, int>> stack;
    auto find_pairs = [&](int a0, int b0) {
        stack.push_back({a0, b0});
        while (!stack.empty()) {
            auto [a, b] = stack.back();
            stack.pop_back();
            if (idx.separated(a, b)) {
                idx.pair_of_.emplace(pair_key(a, b), static_cast<int>(idx.pairs_.size()));
                idx.pairs_.push_back({a, b});
                idx.total_weight_ += (nodes[a].end - nodes[a].begin);
                idx.total_weight_ += (nodes[b].end - nodes[b].begin);
                continue;
            }
            bool split_a = bbox_diag(nodes[a]) >= bbox_diag(nodes[b]);
            if (split_a && nodes[a].left < 0) split_a = false;
            if (!split_a && nodes[b].left < 0) split_a = true;
            if (split_a) {
                stack.push_back({nodes[a].left, b});
                stack.push_back({nodes[a].right, b});
            } else {
                stack.push_back({a, nodes[b].left});
                stack.push_back({a, nodes[b].right});
            }
        }
    };
    for (int id = 0; id < static_cast<int>(nodes.size()); ++id) {
        if (nodes[id].left >= 0) find_pairs(nodes[id].left, nodes[id].right);
    }
    return idx;
}

SspdIndex::Lookup SspdIndex::lookup_pair(int u, int v) const {
    if (u == v) throw input_error("lookup_pair requires distinct vertices");
    // Walk to the lowest common ancestor, then replay the build's recursion;
    // the predicate and split rule match the build exactly.
    int a = leaf_of_[u], b = leaf_of_[v];
    while (a != b) {
        if (nodes_[a].depth >= nodes_[b].depth) {
            a = nodes_[a].parent;
        } else {
            b = nodes_[b].parent;
        }
    }
    int x = nodes_[a].left;
    int y = nodes_[a].right;
    while (!separated(x, y)) {
        bool split_x = bbox_diag(nodes_[x]) >= bbox_diag(nodes_[y]);
        if (split_x && nodes_[x].left < 0) split_x = false;
        if (!split_x && nodes_[y].left < 0) split_x = true;
        if (split_x) {
            int l = nodes_[x].left, r = nodes_[x].right;
            x = (contains(l, u) || contains(l, v)) ? l : r;
        } else {
            int l = nodes_[y].left, r = nodes_[y].right;
            y = (contains(l, u) || contains(l, v)) ? l : r;
        }
    }
    auto it = pair_of_.find(pair_key(x, y));
    if (it == pair_of_.end()) throw invariant_error("SSPD lookup missed the covering pair");
    Lookup res;
    res.pair_id = it->second;
    const PairRec& rec = pairs_[it->second];
    if (contains(rec.node_a, u)) {
        res.side_a = node_vertices(rec.node_a);
        res.side_b = node_vertices(rec.node_b);
    } else {
        res.side_a = node_vertices(rec.node_b);
        res.side_b = node_vertices(rec.node_a);
    }
    return res;
}

}  // namespace mapmatch

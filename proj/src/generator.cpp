#include <algorithm>
#include <numeric>
#include <random>

#include "mapmatch/common.hpp"
#include "mapmatch/graph.hpp"

namespace mapmatch {

namespace {

double quick_estimate(const std::vector<Point>& verts,
                      const std::vector<std::pair<int, int>>& edges, std::uint64_t seed) {
    GeometricGraph g(verts, edges);
    return estimate_packedness(g, 16, seed).c_estimate;
}

}  // namespace

GeometricGraph generate_network(int width, int height, double target_c, double jitter,
                                std::uint64_t seed) {
    if (width < 2 || height < 2) throw input_error("grid must be at least 2x2");
    if (!(jitter >= 0.0 && jitter < 0.4)) throw input_error("jitter must lie in [0, 0.4)");
    if (!(target_c >= 2.0)) throw input_error("target_c below 2 is infeasible");

    std::mt19937_64 rng(split_seed(seed, 0x9e11));
    std::uniform_real_distribution<double> jit(-jitter, jitter);

    auto vid = [&](int i, int j) { return j * width + i; };
    const int n = width * height;
    std::vector<Point> verts(static_cast<std::size_t>(n));
    for (int j = 0; j < height; ++j) {
        for (int i = 0; i < width; ++i) {
            double jx = jitter > 0 ? jit(rng) : 0.0;
            double jy = jitter > 0 ? jit(rng) : 0.0;
            verts[vid(i, j)] = {i + jx, j + jy};
        }
    }
    std::vector<std::pair<int, int>> edges;
    for (int j = 0; j < height; ++j) {
        for (int i = 0; i < width; ++i) {
            if (i + 1 < width) edges.push_back({vid(i, j), vid(i + 1, j)});
            if (j + 1 < height) edges.push_back({vid(i, j), vid(i, j + 1)});
        }
    }
    const int m = static_cast<int>(edges.size());
    std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, edge id)
    for (int e = 0; e < m; ++e) {
        adj[edges[e].first].push_back({edges[e].second, e});
        adj[edges[e].second].push_back({edges[e].first, e});
    }
    std::vector<char> removed(m, 0);
    std::vector<char> seen(n);
    auto connected_skipping = [&](int skip) {
        std::fill(seen.begin(), seen.end(), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (auto [w, e] : adj[v]) {
                if (e == skip || removed[e] || seen[w]) continue;
                seen[w] = 1;
                ++count;
                stack.push_back(w);
            }
        }
        return count == n;
    };
    auto kept_edges = [&]() {
        std::vector<std::pair<int, int>> kept;
        for (int e = 0; e < m; ++e) {
            if (!removed[e]) kept.push_back(edges[e]);
        }
        return kept;
    };

    // Thin the grid while the sampled packedness exceeds the target. The
    // spanning-tree floor may still exceed a small target on large grids; the
    // generator then stops at the best it can do.
    double c_est = quick_estimate(verts, edges, seed);
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const int reestimate_every = std::max(4, m / 16);
    int deleted_since_estimate = 0;
    for (int idx : order) {
        if (c_est <= target_c) break;
        if (!connected_skipping(idx)) continue;
        removed[idx] = 1;
        if (++deleted_since_estimate >= reestimate_every) {
            deleted_since_estimate = 0;
            c_est = quick_estimate(verts, kept_edges(), seed);
        }
    }
    auto kept = kept_edges();
    c_est = quick_estimate(verts, kept, seed);

    // Diagonal shortcuts while the sampled packedness budget allows.
    std::vector<std::pair<int, int>> diags;
    for (int j = 0; j + 1 < height; ++j) {
        for (int i = 0; i + 1 < width; ++i) {
            diags.push_back({vid(i, j), vid(i + 1, j + 1)});
            diags.push_back({vid(i + 1, j), vid(i, j + 1)});
        }
    }
    std::shuffle(diags.begin(), diags.end(), rng);
    int attempts = std::max(1, width * height / 4);
    for (const auto& d : diags) {
        if (attempts-- <= 0) break;
        if (c_est > target_c) break;
        Segment cand{verts[d.first], verts[d.second]};
        bool crosses = false;
        for (const auto& [u, v] : kept) {
            if (segments_cross(cand, Segment{verts[u], verts[v]})) {
                crosses = true;
                break;
            }
        }
        if (crosses) continue;
        kept.push_back(d);
        double with_c = quick_estimate(verts, kept, seed);
        if (with_c > target_c) {
            kept.pop_back();
        } else {
            c_est = with_c;
        }
    }

    return GeometricGraph(std::move(verts), std::move(kept));
}

}  // namespace mapmatch

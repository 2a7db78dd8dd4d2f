// Compares the OpenMP preprocessing kernels against their serial reference
// implementations and reports indexed-vs-exact query times on one instance.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "mapmatch/bench.hpp"
#include "mapmatch/common.hpp"
#include "mapmatch/freespace.hpp"
#include "mapmatch/parallel.hpp"
#include "mapmatch/transit.hpp"

using namespace mapmatch;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

int main(int argc, char** argv) {
    int w = argc > 1 ? std::atoi(argv[1]) : 16;
    int h = argc > 2 ? std::atoi(argv[2]) : 16;
    std::uint64_t seed = 77;
    std::printf("threads available: %d\n", hardware_threads());

    GeometricGraph g = generate_network(w, h, 16.0, 0.25, seed);
    std::printf("graph: %d vertices, %d edges (p=%d)\n", g.vertex_count(), g.edge_count(),
                g.complexity());

    SspdIndex sspd = build_sspd(g);
    std::vector<TransitSet> ts;
    for (int p = 0; p < sspd.pair_count(); ++p) {
        ts.push_back(compute_transit_vertices(g, sspd, p));
    }
    std::printf("sspd: %d pairs, weight %zu\n", sspd.pair_count(), sspd.total_weight());

    auto t0 = std::chrono::steady_clock::now();
    TransitDistanceTable serial = precompute_transit_distances(g, sspd, ts, 1e-9, false);
    double serial_ms = ms_since(t0);
    t0 = std::chrono::steady_clock::now();
    TransitDistanceTable parallel = precompute_transit_distances(g, sspd, ts, 1e-9, true);
    double parallel_ms = ms_since(t0);
    bool identical = serial.entries.size() == parallel.entries.size();
    for (const auto& [k, v] : serial.entries) {
        auto it = parallel.entries.find(k);
        identical = identical && it != parallel.entries.end() && it->second == v;
    }
    std::printf("transit table (%zu entries): serial %.1f ms, openmp %.1f ms, speedup %.2fx, %s\n",
                serial.entries.size(), serial_ms, parallel_ms, serial_ms / parallel_ms,
                identical ? "bit-identical" : "MISMATCH");

    t0 = std::chrono::steady_clock::now();
    PackednessReport rep = estimate_packedness(g, 256, seed);
    double pack_ms = ms_since(t0);
    std::printf("packedness estimate %.3f in %.1f ms\n", rep.c_estimate, pack_ms);

    BuildOptions opts;
    opts.eps = 0.25;
    opts.seed = seed;
    t0 = std::chrono::steady_clock::now();
    IndexBundle bundle = IndexBundle::build(g, opts);
    std::printf("full build: %.1f ms\n", ms_since(t0));

    for (int qi = 0; qi < 3; ++qi) {
        Polyline Q = random_walk_trajectory(g, 10, split_seed(seed, 1000 + qi), 0.3);
        t0 = std::chrono::steady_clock::now();
        double ans = bundle.stage3().map_match_query(Q, 1e-6);
        double indexed_ms = ms_since(t0);
        t0 = std::chrono::steady_clock::now();
        double exact = match_exact(g, Q, 1e-6);
        double exact_ms = ms_since(t0);
        std::printf("query %d: indexed %.6f (%.1f ms) vs exact %.6f (%.1f ms)\n", qi, ans,
                    indexed_ms, exact, exact_ms);
    }
    return identical ? 0 : 1;
}

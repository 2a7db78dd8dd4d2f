#ifndef MAPMATCH_BENCH_HPP
#define MAPMATCH_BENCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mapmatch/bundle.hpp"

namespace mapmatch {

// Noisy random-walk trajectory over the graph; deterministic given the seed.
// stride > 1 records every stride-th walk vertex, spreading the trajectory
// across the network while keeping its complexity fixed.
Polyline random_walk_trajectory(const GeometricGraph& g, int vertices, std::uint64_t seed,
                                double noise, int stride = 1);

// Evenly spaced pings along the bounding-box diagonal; a cross-network
// trajectory whose character stays comparable across graph sizes.
Polyline diagonal_trajectory(const GeometricGraph& g, int vertices, std::uint64_t seed,
                             double noise);

struct BenchConfig {
    std::vector<std::pair<int, int>> sizes;  // grid dimensions per instance
    std::vector<std::uint64_t> seeds;
    std::vector<double> eps_values;
    int traj_vertices = 10;
    int traj_stride = 1;
    std::string traj_kind = "walk";  // walk | diagonal
    int queries_per_instance = 3;
    double target_c = 16.0;
    double jitter = 0.25;
    double rel_tol = 1e-6;
    std::size_t exact_cap = 2'000'000;  // skip the exact baseline above p*q
    bool timing = true;                 // false zeroes the ms columns
};

BenchConfig load_bench_config(const std::string& path);

struct BenchRecord {
    std::string instance;
    int p = 0;
    int q = 0;
    double c_estimate = 0.0;
    double eps = 0.0;
    double build_ms = 0.0;
    double query_ms = 0.0;
    double exact_ms = 0.0;
    double answer = 0.0;
    double exact_answer = 0.0;
    double ratio = 0.0;
};

std::vector<BenchRecord> run_bench(const BenchConfig& cfg);
std::string bench_csv(const std::vector<BenchRecord>& records);

}  // namespace mapmatch

#endif

#include "mapmatch/bench.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "mapmatch/common.hpp"
#include "mapmatch/freespace.hpp"

namespace mapmatch {

Polyline random_walk_trajectory(const GeometricGraph& g, int vertices, std::uint64_t seed,
                                double noise, int stride) {
    if (vertices < 1) throw input_error("trajectory needs at least one vertex");
    if (stride < 1) stride = 1;
    std::mt19937_64 rng(split_seed(seed, 0xbe9c));
    std::uniform_real_distribution<double> jitter(-noise, noise);
    int v = static_cast<int>(rng() % g.vertex_count());
    std::vector<Point> pts;
    pts.reserve(vertices);
    for (int i = 0; i < vertices; ++i) {
        Point p = g.vertex(v);
        if (noise > 0) p = {p.x + jitter(rng), p.y + jitter(rng)};
        pts.push_back(p);
        for (int s = 0; s < stride; ++s) {
            const auto& nbrs = g.neighbors(v);
            if (!nbrs.empty()) v = nbrs[rng() % nbrs.size()].to;
        }
    }
    return Polyline(std::move(pts));
}

Polyline diagonal_trajectory(const GeometricGraph& g, int vertices, std::uint64_t seed,
                             double noise) {
    if (vertices < 1) throw input_error("trajectory needs at least one vertex");
    std::mt19937_64 rng(split_seed(seed, 0xd1a6));
    std::uniform_real_distribution<double> jitter(-noise, noise);
    Point lo = g.bbox_min(), hi = g.bbox_max();
    std::vector<Point> pts;
    for (int i = 0; i < vertices; ++i) {
        double t = vertices == 1 ? 0.5 : static_cast<double>(i) / (vertices - 1);
        Point p{lo.x + t * (hi.x - lo.x), lo.y + t * (hi.y - lo.y)};
        if (noise > 0) p = {p.x + jitter(rng), p.y + jitter(rng)};
        pts.push_back(p);
    }
    return Polyline(std::move(pts));
}

BenchConfig load_bench_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw input_error(path + ": " + e.what());
    }
    BenchConfig cfg;
    for (const auto& s : j.value("sizes", nlohmann::json::array())) {
        cfg.sizes.push_back({s[0].get<int>(), s[1].get<int>()});
    }
    for (const auto& s : j.value("seeds", nlohmann::json::array())) {
        cfg.seeds.push_back(s.get<std::uint64_t>());
    }
    for (const auto& e : j.value("eps", nlohmann::json::array())) {
        cfg.eps_values.push_back(e.get<double>());
    }
    cfg.traj_vertices = j.value("trajectory_vertices", cfg.traj_vertices);
    cfg.traj_stride = j.value("trajectory_stride", cfg.traj_stride);
    cfg.queries_per_instance = j.value("queries", cfg.queries_per_instance);
    cfg.target_c = j.value("target_c", cfg.target_c);
    cfg.jitter = j.value("jitter", cfg.jitter);
    cfg.rel_tol = j.value("rel_tol", cfg.rel_tol);
    cfg.exact_cap = j.value("exact_cap", cfg.exact_cap);
    cfg.timing = j.value("timing", cfg.timing);
    return cfg;
}

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

std::vector<BenchRecord> run_bench(const BenchConfig& cfg) {
    std::vector<BenchRecord> out;
    for (auto [w, h] : cfg.sizes) {
        for (std::uint64_t seed : cfg.seeds) {
            GeometricGraph g = generate_network(w, h, cfg.target_c, cfg.jitter, seed);
            for (double eps : cfg.eps_values) {
                BuildOptions opts;
                opts.eps = eps;
                opts.seed = seed;
                opts.rel_tol = 1e-9;
                auto t0 = std::chrono::steady_clock::now();
                IndexBundle bundle = IndexBundle::build(g, opts);
                double build_ms = ms_since(t0);
                for (int qi = 0; qi < cfg.queries_per_instance; ++qi) {
                    Polyline Q =
                        cfg.traj_kind == "diagonal"
                            ? diagonal_trajectory(g, cfg.traj_vertices,
                                                  split_seed(seed, 1000 + qi), 0.2)
                            : random_walk_trajectory(g, cfg.traj_vertices,
                                                     split_seed(seed, 1000 + qi), 0.3,
                                                     cfg.traj_stride);
                    BenchRecord rec;
                    std::ostringstream id;
                    id << w << 'x' << h << "-s" << seed << "-e" << eps << "-q" << qi;
                    rec.instance = id.str();
                    rec.p = g.complexity();
                    rec.q = static_cast<int>(Q.size());
                    rec.c_estimate = bundle.stage1().c_estimate;
                    rec.eps = eps;
                    rec.build_ms = cfg.timing ? build_ms : 0.0;
                    // Median of three repetitions; the first fills the lazy
                    // grid store, the median reflects the index's
                    // steady-state lookup cost.
                    MatchDiagnostics diag;
                    std::vector<double> reps(3);
                    for (int rep = 0; rep < 3; ++rep) {
                        t0 = std::chrono::steady_clock::now();
                        rec.answer = bundle.stage3().map_match_query(Q, cfg.rel_tol, &diag);
                        reps[rep] = ms_since(t0);
                    }
                    std::sort(reps.begin(), reps.end());
                    rec.query_ms = cfg.timing ? reps[1] : 0.0;
                    std::size_t work = static_cast<std::size_t>(rec.p) * rec.q;
                    if (work <= cfg.exact_cap) {
                        // Baseline timing: the from-scratch matcher on the
                        // original graph.
                        t0 = std::chrono::steady_clock::now();
                        double baseline = match_exact(g, Q, cfg.rel_tol);
                        rec.exact_ms = cfg.timing ? ms_since(t0) : 0.0;
                        // Ratio alignment: mid-edge endpoints need the graph
                        // subdivided at the certified decision's candidates.
                        std::vector<GraphPoint> cuts;
                        for (const auto& layer : diag.layers) {
                            for (const auto& cp : layer) cuts.push_back(cp.gp);
                        }
                        GeometricGraph sub = subdivide_at(g, cuts);
                        rec.exact_answer = std::min(baseline, match_exact(sub, Q, cfg.rel_tol));
                        rec.ratio = rec.exact_answer > 0 ? rec.answer / rec.exact_answer : 1.0;
                    }
                    out.push_back(std::move(rec));
                }
            }
        }
    }
    return out;
}

std::string bench_csv(const std::vector<BenchRecord>& records) {
    std::ostringstream out;
    out << "instance,p,q,c_estimate,eps,build_ms,query_ms,exact_ms,answer,exact_answer,ratio\n";
    for (const auto& r : records) {
        out << r.instance << ',' << r.p << ',' << r.q << ',' << format_double(r.c_estimate) << ','
            << format_double(r.eps) << ',' << format_double(r.build_ms) << ','
            << format_double(r.query_ms) << ',' << format_double(r.exact_ms) << ','
            << format_double(r.answer) << ',' << format_double(r.exact_answer) << ','
            << format_double(r.ratio) << '\n';
    }
    return out.str();
}

}  // namespace mapmatch

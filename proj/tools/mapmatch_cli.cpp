#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mapmatch/bench.hpp"
#include "mapmatch/bundle.hpp"
#include "mapmatch/common.hpp"
#include "mapmatch/freespace.hpp"
#include "mapmatch/gadgets.hpp"

namespace {

using namespace mapmatch;

int g_log_level = 1;  // 0 error, 1 info, 2 debug

void log_info(const std::string& msg) {
    if (g_log_level >= 1) std::cerr << "[info] " << msg << '\n';
}

void emit_geojson(const std::string& path, const Polyline& Q, const MatchDiagnostics& diag) {
    nlohmann::json features = nlohmann::json::array();
    {
        nlohmann::json coords = nlohmann::json::array();
        for (const Point& p : Q.vertices()) coords.push_back({p.x, p.y});
        features.push_back({{"type", "Feature"},
                            {"properties", {{"role", "query"}}},
                            {"geometry", {{"type", "LineString"}, {"coordinates", coords}}}});
    }
    for (std::size_t i = 0; i < diag.layers.size(); ++i) {
        for (const auto& cp : diag.layers[i]) {
            features.push_back(
                {{"type", "Feature"},
                 {"properties",
                  {{"role", "candidate"},
                   {"layer", i},
                   {"kind", cp.from_vertex ? "vertex" : "edge-sample"}}},
                 {"geometry", {{"type", "Point"}, {"coordinates", {cp.pos.x, cp.pos.y}}}}});
        }
    }
    if (!diag.witness.empty()) {
        nlohmann::json coords = nlohmann::json::array();
        for (std::size_t i = 0; i < diag.witness.size(); ++i) {
            const auto& cp = diag.layers[i][diag.witness[i]];
            coords.push_back({cp.pos.x, cp.pos.y});
        }
        features.push_back({{"type", "Feature"},
                            {"properties", {{"role", "witness"}, {"value", diag.value}}},
                            {"geometry", {{"type", "LineString"}, {"coordinates", coords}}}});
    }
    nlohmann::json root = {{"type", "FeatureCollection"}, {"features", features}};
    std::ofstream out(path);
    if (!out) throw input_error("cannot write " + path);
    out << root.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"map matching queries on c-packed graphs"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 0;
    double rel_tol = 1e-9;
    std::string log_level = "info";
    app.add_option("--seed", seed, "global random seed");
    app.add_option("--rel-tol", rel_tol, "relative tolerance for bisection minimizers");
    app.add_option("--log-level", log_level, "error|info|debug");

    // build
    auto* cmd_build = app.add_subcommand("build", "preprocess a graph into an index bundle");
    std::string graph_file, out_file, traj_file, bundle_file;
    double eps = 0.25;
    bool split_components = false, serial = false;
    cmd_build->add_option("graph", graph_file, "graph file (json or csv)")->required();
    cmd_build->add_option("-o,--out", out_file, "output bundle path")->required();
    cmd_build->add_option("--eps", eps, "approximation parameter, fixed at build time");
    cmd_build->add_flag("--split-components", split_components,
                        "keep the largest component of a disconnected graph");
    cmd_build->add_flag("--serial", serial, "disable OpenMP in preprocessing");

    // query
    auto* cmd_query = app.add_subcommand("query", "map-matching query against a bundle");
    std::string geojson_file;
    bool self_check = false;
    cmd_query->add_option("bundle", bundle_file, "index bundle")->required();
    cmd_query->add_option("trajectory", traj_file, "trajectory file (json or csv)")->required();
    cmd_query->add_option("--emit-geojson", geojson_file,
                          "dump candidate sets and the witness path");
    cmd_query->add_flag("--self-check", self_check,
                        "verify the sandwich against the exact matcher");

    // segment-query
    auto* cmd_seg = app.add_subcommand("segment-query", "map matching for a single segment");
    std::vector<double> seg_coords;
    cmd_seg->add_option("bundle", bundle_file, "index bundle")->required();
    cmd_seg->add_option("--segment", seg_coords, "ax ay bx by")->expected(4)->required();

    // exact
    auto* cmd_exact = app.add_subcommand("exact", "from-scratch exact matcher (baseline)");
    cmd_exact->add_option("graph", graph_file, "graph file")->required();
    cmd_exact->add_option("trajectory", traj_file, "trajectory file")->required();
    cmd_exact->add_flag("--split-components", split_components,
                        "keep the largest component of a disconnected graph");

    // gen
    auto* cmd_gen = app.add_subcommand("gen", "generate a c-packed test network");
    int width = 8, height = 8;
    double target_c = 16.0, jitter = 0.25;
    cmd_gen->add_option("-o,--out", out_file, "output graph path")->required();
    cmd_gen->add_option("--width", width, "grid width");
    cmd_gen->add_option("--height", height, "grid height");
    cmd_gen->add_option("--target-c", target_c, "packedness budget");
    cmd_gen->add_option("--jitter", jitter, "vertex jitter in [0, 0.4)");

    // gen-hard
    auto* cmd_hard = app.add_subcommand("gen-hard", "generate an OV lower-bound instance");
    int ov_n = 2, ov_m = 2, ov_d = 2;
    bool force_yes = false, force_no = false;
    std::string out_graph, out_traj, out_meta;
    cmd_hard->add_option("--n", ov_n, "vectors in A");
    cmd_hard->add_option("--m", ov_m, "vectors in B");
    cmd_hard->add_option("--d", ov_d, "vector dimension");
    cmd_hard->add_flag("--force-yes", force_yes, "plant an orthogonal pair");
    cmd_hard->add_flag("--force-no", force_no, "forbid orthogonal pairs");
    cmd_hard->add_option("--out-graph", out_graph, "gadget graph path")->required();
    cmd_hard->add_option("--out-trajectory", out_traj, "gadget trajectory path")->required();
    cmd_hard->add_option("--out-meta", out_meta, "sidecar with ground truth")->required();

    // verify-gap
    auto* cmd_gap = app.add_subcommand("verify-gap", "check the 1.001 vs 3 gap empirically");
    std::string meta_file;
    std::size_t cap = 4'000'000;
    cmd_gap->add_option("graph", graph_file, "gadget graph")->required();
    cmd_gap->add_option("trajectory", traj_file, "gadget trajectory")->required();
    cmd_gap->add_option("meta", meta_file, "sidecar json")->required();
    cmd_gap->add_option("--cap", cap, "exact-matcher complexity cap (p*q)");

    // bench
    auto* cmd_bench = app.add_subcommand("bench", "indexed-vs-exact benchmark harness");
    std::string config_file, csv_file;
    cmd_bench->add_option("config", config_file, "bench config json")->required();
    cmd_bench->add_option("-o,--out", csv_file, "output CSV path")->required();

    CLI11_PARSE(app, argc, argv);
    g_log_level = log_level == "debug" ? 2 : log_level == "error" ? 0 : 1;

    try {
        if (*cmd_build) {
            GeometricGraph g = load_graph(graph_file, split_components);
            BuildOptions opts;
            opts.eps = eps;
            opts.rel_tol = rel_tol;
            opts.seed = seed;
            opts.parallel = !serial;
            IndexBundle bundle = IndexBundle::build(std::move(g), opts);
            bundle.save(out_file);
            log_info("built bundle: p=" + std::to_string(bundle.graph().complexity()) +
                     " sspd_pairs=" + std::to_string(bundle.stage1().sspd.pair_count()) +
                     " transit_entries=" + std::to_string(bundle.stage1().table.entries.size()) +
                     " c_estimate=" + format_double(bundle.stage1().c_estimate));
        } else if (*cmd_query) {
            IndexBundle bundle = IndexBundle::load(bundle_file);
            Polyline Q = load_trajectory(traj_file);
            MatchDiagnostics diag;
            double ans = bundle.stage3().map_match_query(Q, rel_tol, &diag);
            if (!geojson_file.empty()) emit_geojson(geojson_file, Q, diag);
            if (self_check) {
                std::vector<GraphPoint> cuts;
                for (const auto& layer : diag.layers) {
                    for (const auto& cp : layer) cuts.push_back(cp.gp);
                }
                GeometricGraph sub = subdivide_at(bundle.graph(), cuts);
                double opt = match_exact(sub, Q, rel_tol);
                double upper = opt * (1.0 + bundle.eps()) * (1.0 + rel_tol) * (1.0 + 1e-9);
                if (ans < opt * (1.0 - 1e-9) || ans > upper) {
                    throw invariant_error("sandwich breach: answer=" + format_double(ans) +
                                          " exact=" + format_double(opt));
                }
                log_info("self-check passed: exact=" + format_double(opt));
            }
            std::cout << format_double(ans) << '\n';
        } else if (*cmd_seg) {
            IndexBundle bundle = IndexBundle::load(bundle_file);
            Segment ab{{seg_coords[0], seg_coords[1]}, {seg_coords[2], seg_coords[3]}};
            std::cout << format_double(bundle.stage2().segment_query(ab, rel_tol)) << '\n';
        } else if (*cmd_exact) {
            GeometricGraph g = load_graph(graph_file, split_components);
            Polyline Q = load_trajectory(traj_file);
            std::cout << format_double(match_exact(g, Q, rel_tol)) << '\n';
        } else if (*cmd_gen) {
            GeometricGraph g = generate_network(width, height, target_c, jitter, seed);
            save_graph(g, out_file);
            PackednessReport rep = estimate_packedness(g, 64, seed);
            log_info("generated " + std::to_string(g.vertex_count()) + " vertices, " +
                     std::to_string(g.edge_count()) +
                     " edges, c_estimate=" + format_double(rep.c_estimate));
        } else if (*cmd_hard) {
            if (force_yes && force_no) throw input_error("choose one of --force-yes/--force-no");
            OvInstance ov = random_ov(ov_n, ov_m, ov_d, seed, force_yes ? 1 : force_no ? 2 : 0);
            GadgetInstance gi = build_gadget(ov);
            save_graph(gi.graph, out_graph);
            save_trajectory(gi.trajectory, out_traj);
            nlohmann::json meta = {{"is_yes", gi.is_yes},
                                   {"h", gi.h},
                                   {"n", ov_n},
                                   {"m", ov_m},
                                   {"d", ov_d},
                                   {"seed", seed}};
            std::ofstream out(out_meta);
            if (!out) throw input_error("cannot write " + out_meta);
            out << meta.dump(2) << '\n';
            log_info(std::string("gadget instance is_yes=") + (gi.is_yes ? "true" : "false"));
        } else if (*cmd_gap) {
            GadgetInstance gi{load_graph(graph_file), load_trajectory(traj_file), 0.0, false};
            std::ifstream in(meta_file);
            if (!in) throw input_error("cannot open " + meta_file);
            nlohmann::json meta = nlohmann::json::parse(in);
            gi.is_yes = meta.at("is_yes").get<bool>();
            gi.h = meta.value("h", 0.0);
            GapResult res = verify_gap(gi, rel_tol, cap);
            std::cout << format_double(res.value) << ' ' << (res.gap_ok ? "gap-ok" : "GAP-BROKEN")
                      << '\n';
            if (!res.gap_ok) throw invariant_error("lower-bound gap violated");
        } else if (*cmd_bench) {
            BenchConfig cfg = load_bench_config(config_file);
            auto records = run_bench(cfg);
            std::ofstream out(csv_file);
            if (!out) throw input_error("cannot write " + csv_file);
            out << bench_csv(records);
            log_info("bench complete: " + std::to_string(records.size()) + " rows");
        }
    } catch (const invariant_error& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return 3;
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

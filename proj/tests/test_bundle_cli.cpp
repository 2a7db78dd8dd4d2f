#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "mapmatch/bench.hpp"
#include "mapmatch/bundle.hpp"
#include "mapmatch/common.hpp"

using namespace mapmatch;
namespace fs = std::filesystem;

namespace {

fs::path tmp(const std::string& name) { return fs::temp_directory_path() / name; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("bundle round trip answers bit-identically") {
    GeometricGraph g = generate_network(5, 5, 14.0, 0.25, 404);
    BuildOptions opts;
    opts.eps = 0.25;
    opts.seed = 404;
    IndexBundle built = IndexBundle::build(g, opts);

    std::mt19937_64 rng(split_seed(91, 19));
    std::vector<Polyline> queries;
    for (int i = 0; i < 4; ++i) {
        queries.push_back(random_walk_trajectory(g, 5, split_seed(404, i), 0.3));
    }
    std::vector<double> fresh;
    for (const Polyline& q : queries) fresh.push_back(built.stage3().map_match_query(q, 1e-6));

    fs::path p = tmp("bundle.mmx");
    built.save(p.string());
    IndexBundle loaded = IndexBundle::load(p.string());
    CHECK(loaded.eps() == built.eps());
    CHECK(loaded.stage1().c_estimate == built.stage1().c_estimate);
    CHECK(loaded.stage1().table.entries.size() == built.stage1().table.entries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        CHECK(loaded.stage3().map_match_query(queries[i], 1e-6) == fresh[i]);
    }

    // Saving the same build twice is byte-identical.
    fs::path p2 = tmp("bundle2.mmx");
    IndexBundle::build(g, opts).save(p2.string());
    IndexBundle rebuilt = IndexBundle::load(p2.string());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        CHECK(rebuilt.stage3().map_match_query(queries[i], 1e-6) == fresh[i]);
    }
    fs::remove(p);
    fs::remove(p2);
}

TEST_CASE("bundle load rejects garbage") {
    fs::path p = tmp("garbage.mmx");
    {
        std::ofstream out(p, std::ios::binary);
        out << "this is not a bundle";
    }
    CHECK_THROWS_AS(IndexBundle::load(p.string()), input_error);
    fs::remove(p);
    CHECK_THROWS_AS(IndexBundle::load(tmp("missing.mmx").string()), input_error);
}

TEST_CASE("build rejects bad eps") {
    GeometricGraph g = generate_network(3, 3, 8.0, 0.0, 1);
    BuildOptions opts;
    opts.eps = 1.5;
    CHECK_THROWS_AS(IndexBundle::build(g, opts), input_error);
}

TEST_CASE("bench produces deterministic rows without timing") {
    BenchConfig cfg;
    cfg.sizes = {{4, 4}};
    cfg.seeds = {5, 6};
    cfg.eps_values = {0.25};
    cfg.queries_per_instance = 2;
    cfg.traj_vertices = 4;
    cfg.timing = false;
    auto rows = run_bench(cfg);
    CHECK(rows.size() == 4);  // 1 size x 2 seeds x 1 eps x 2 queries
    std::string csv1 = bench_csv(rows);
    std::string csv2 = bench_csv(run_bench(cfg));
    CHECK(csv1 == csv2);  // bit-identical under identical seeds
    for (const auto& r : rows) {
        if (r.exact_answer > 0) {
            CHECK(r.ratio >= 1.0 / (1 + 1e-6) - 1e-9);
            CHECK(r.ratio <= (1 + r.eps) * (1 + 1e-5) + 1e-9);
        }
    }
    // Header-only CSV for an empty config.
    BenchConfig empty;
    CHECK(bench_csv(run_bench(empty)) ==
          "instance,p,q,c_estimate,eps,build_ms,query_ms,exact_ms,answer,exact_answer,ratio\n");
}

TEST_CASE("cli end to end: gen, build, query, exact, segment, gadgets") {
    fs::path bin = fs::path(CLI_BINARY);
    REQUIRE(fs::exists(bin));
    fs::path graph = tmp("cli_graph.json");
    fs::path bundle = tmp("cli_bundle.mmx");
    fs::path traj = tmp("cli_traj.json");
    auto run = [&](const std::string& args) {
        std::string cmd = bin.string() + " " + args + " 2>/dev/null >" + tmp("cli_out.txt").string();
        return std::system(cmd.c_str()) / 256;
    };
    CHECK(run("gen --width 5 --height 4 --target-c 14 --jitter 0.2 --seed 9 -o " +
              graph.string()) == 0);
    CHECK(run("--seed 9 build " + graph.string() + " --eps 0.25 -o " + bundle.string()) == 0);
    {
        std::ofstream out(traj);
        out << "{\"points\": [[0.1,0.2],[1.1,0.3],[2.0,1.1]]}\n";
    }
    fs::path geo = tmp("cli_out.geojson");
    CHECK(run("query " + bundle.string() + " " + traj.string() + " --self-check --emit-geojson " +
              geo.string()) == 0);
    double indexed = std::stod(slurp(tmp("cli_out.txt")));
    {
        std::string dump = slurp(geo);
        CHECK(dump.find("FeatureCollection") != std::string::npos);
        CHECK(dump.find("witness") != std::string::npos);
        CHECK(dump.find("candidate") != std::string::npos);
    }
    CHECK(run("exact " + graph.string() + " " + traj.string()) == 0);
    double exact = std::stod(slurp(tmp("cli_out.txt")));
    CHECK(indexed >= exact * (1 - 1e-9) - 1e-9);
    CHECK(indexed <= exact * 1.26 + 1e-9);
    CHECK(run("segment-query " + bundle.string() + " --segment 0.1 0.2 1.1 0.3") == 0);

    // Unknown file and malformed input map to exit code 2.
    CHECK(run("exact missing.json " + traj.string()) == 2);
    fs::path bad = tmp("bad_graph.json");
    {
        std::ofstream out(bad);
        out << "{\"vertices\": [[0,0],[1,0]]}";
    }
    CHECK(run("build " + bad.string() + " --eps 0.25 -o " + bundle.string()) == 2);

    // Disconnected graphs are rejected unless --split-components keeps the
    // largest piece.
    fs::path disc = tmp("disc_graph.json");
    {
        std::ofstream out(disc);
        out << "{\"vertices\": [[0,0],[1,0],[2,0],[9,9],[10,9]], "
               "\"edges\": [[0,1],[1,2],[3,4]]}";
    }
    CHECK(run("exact " + disc.string() + " " + traj.string()) == 2);
    CHECK(run("exact --split-components " + disc.string() + " " + traj.string()) == 0);

    // Gadget pipeline.
    fs::path hg = tmp("hard_graph.json"), ht = tmp("hard_traj.json"), hm = tmp("hard_meta.json");
    CHECK(run("--seed 4 gen-hard --n 2 --m 2 --d 2 --force-yes --out-graph " + hg.string() +
              " --out-trajectory " + ht.string() + " --out-meta " + hm.string()) == 0);
    CHECK(run("verify-gap " + hg.string() + " " + ht.string() + " " + hm.string()) == 0);

    for (const fs::path& p :
         {graph, bundle, traj, bad, disc, geo, hg, ht, hm, tmp("cli_out.txt")}) {
        fs::remove(p);
    }
}

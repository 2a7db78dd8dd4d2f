#include "mapmatch/bundle.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "mapmatch/common.hpp"

namespace mapmatch {

namespace {

constexpr char kMagic[8] = {'M', 'M', 'I', 'D', 'X', '0', '0', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_f64(std::ostream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw input_error("truncated index bundle");
    return v;
}

double read_f64(std::istream& in) {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw input_error("truncated index bundle");
    return v;
}

}  // namespace

IndexBundle IndexBundle::build(GeometricGraph g, const BuildOptions& opts) {
    if (!(opts.eps > 0.0 && opts.eps < 1.0)) throw input_error("eps must lie in (0, 1)");
    IndexBundle b;
    b.opts_ = opts;
    b.g_ = std::make_unique<GeometricGraph>(std::move(g));
    b.s1_ = std::make_unique<Stage1Index>(
        build_stage1(*b.g_, opts.rel_tol, opts.seed, opts.parallel, opts.packedness_samples));
    b.s2_ = std::make_unique<SegmentIndex>(*b.g_, *b.s1_, opts.eps);
    b.s3_ = std::make_unique<TrajectoryIndex>(*b.g_, *b.s1_, *b.s2_, opts.eps);
    return b;
}

void IndexBundle::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write " + path);
    out.write(kMagic, sizeof kMagic);

    nlohmann::json header;
    header["version"] = 1;
    header["eps"] = opts_.eps;
    header["rel_tol"] = opts_.rel_tol;
    header["seed"] = opts_.seed;
    header["parallel"] = opts_.parallel;
    header["packedness_samples"] = opts_.packedness_samples;
    header["vertices"] = g_->vertex_count();
    header["edges"] = g_->edge_count();
    header["sspd_pairs"] = s1_->sspd.pair_count();
    header["sspd_weight"] = s1_->sspd.total_weight();
    header["transit_pairs"] = s1_->table.enumerated_pairs;
    header["transit_entries"] = s1_->table.entries.size();
    header["grid_entries"] = s2_->grid_entry_count();
    header["c_estimate"] = s1_->c_estimate;
    std::string htext = header.dump();
    write_u64(out, htext.size());
    out.write(htext.data(), static_cast<std::streamsize>(htext.size()));

    // Graph section.
    write_u64(out, g_->vertex_count());
    for (const Point& p : g_->vertices()) {
        write_f64(out, p.x);
        write_f64(out, p.y);
    }
    write_u64(out, g_->edge_count());
    for (const auto& [u, v] : g_->edges()) {
        write_u64(out, static_cast<std::uint64_t>(u));
        write_u64(out, static_cast<std::uint64_t>(v));
    }

    // Transit distance table (sorted keys for byte-stable output).
    std::vector<std::pair<std::uint64_t, double>> entries(s1_->table.entries.begin(),
                                                          s1_->table.entries.end());
    std::sort(entries.begin(), entries.end());
    write_u64(out, entries.size());
    for (const auto& [k, v] : entries) {
        write_u64(out, k);
        write_f64(out, v);
    }

    // Lazy grid-store entries touched so far.
    auto grid = s2_->export_grid_entries();
    write_u64(out, grid.size());
    for (const auto& e : grid) {
        write_u64(out, e.key_hi);
        write_u64(out, e.key_lo);
        write_f64(out, e.value);
    }
}

IndexBundle IndexBundle::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) {
        throw input_error(path + ": not an index bundle (bad magic)");
    }
    std::uint64_t hlen = read_u64(in);
    std::string htext(hlen, '\0');
    in.read(htext.data(), static_cast<std::streamsize>(hlen));
    if (!in) throw input_error("truncated index bundle header");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(htext);
    } catch (const nlohmann::json::parse_error& e) {
        throw input_error(std::string("bad bundle header: ") + e.what());
    }
    if (header.value("version", 0) != 1) throw input_error("unsupported bundle version");

    BuildOptions opts;
    opts.eps = header["eps"].get<double>();
    opts.rel_tol = header["rel_tol"].get<double>();
    opts.seed = header["seed"].get<std::uint64_t>();
    opts.parallel = header.value("parallel", true);
    opts.packedness_samples = header.value("packedness_samples", 64);

    std::uint64_t nv = read_u64(in);
    std::vector<Point> verts(nv);
    for (auto& p : verts) {
        p.x = read_f64(in);
        p.y = read_f64(in);
    }
    std::uint64_t ne = read_u64(in);
    std::vector<std::pair<int, int>> edges(ne);
    for (auto& [u, v] : edges) {
        u = static_cast<int>(read_u64(in));
        v = static_cast<int>(read_u64(in));
    }

    IndexBundle b;
    b.opts_ = opts;
    b.g_ = std::make_unique<GeometricGraph>(std::move(verts), std::move(edges));

    // Rebuild deterministic structures, then swap in the persisted table so
    // reloaded bundles answer exactly like the originals.
    b.s1_ = std::make_unique<Stage1Index>();
    b.s1_->rel_tol = opts.rel_tol;
    b.s1_->sspd = build_sspd(*b.g_, 0.5);
    for (int p = 0; p < b.s1_->sspd.pair_count(); ++p) {
        b.s1_->transit_sets.push_back(compute_transit_vertices(*b.g_, b.s1_->sspd, p));
    }
    std::uint64_t nentries = read_u64(in);
    std::size_t enumerated = 0;
    for (const TransitSet& ts : b.s1_->transit_sets) {
        const auto& rec = b.s1_->sspd.pair(ts.pair_id);
        std::size_t side = b.s1_->sspd.node_vertices(rec.node_a).size() +
                           b.s1_->sspd.node_vertices(rec.node_b).size();
        enumerated += side * ts.cut_vertices.size();
    }
    b.s1_->table.enumerated_pairs = enumerated;
    b.s1_->table.entries.reserve(nentries * 2);
    for (std::uint64_t i = 0; i < nentries; ++i) {
        std::uint64_t k = read_u64(in);
        double v = read_f64(in);
        b.s1_->table.entries.emplace(k, v);
    }
    PackednessReport rep = estimate_packedness(*b.g_, opts.packedness_samples, opts.seed);
    b.s1_->c_estimate = rep.c_estimate;
    b.s1_->witness_center = rep.witness_center;
    b.s1_->witness_radius = rep.witness_radius;
    for (const TransitSet& ts : b.s1_->transit_sets) {
        if (ts.witness_radius <= 0) continue;
        double ratio =
            edge_length_in_ball(*b.g_, ts.witness_center, ts.witness_radius) / ts.witness_radius;
        if (ratio > b.s1_->c_estimate) {
            b.s1_->c_estimate = ratio;
            b.s1_->witness_center = ts.witness_center;
            b.s1_->witness_radius = ts.witness_radius;
        }
    }

    b.s2_ = std::make_unique<SegmentIndex>(*b.g_, *b.s1_, opts.eps);
    std::uint64_t ngrid = read_u64(in);
    std::vector<SegmentIndex::GridEntry> grid(ngrid);
    for (auto& e : grid) {
        e.key_hi = read_u64(in);
        e.key_lo = read_u64(in);
        e.value = read_f64(in);
    }
    b.s2_->import_grid_entries(grid);
    b.s3_ = std::make_unique<TrajectoryIndex>(*b.g_, *b.s1_, *b.s2_, opts.eps);
    return b;
}

}  // namespace mapmatch

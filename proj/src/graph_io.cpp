#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mapmatch/common.hpp"
#include "mapmatch/graph.hpp"

namespace mapmatch {

namespace {

using nlohmann::json;

bool has_suffix(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw input_error(path + ": " + e.what());
    }
}

double parse_num(const std::string& tok, const std::string& path, int line) {
    try {
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw input_error(path + ":" + std::to_string(line) + ": bad number '" + tok + "'");
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

}  // namespace

GeometricGraph load_graph(const std::string& path, bool split_components) {
    std::vector<Point> verts;
    std::vector<std::pair<int, int>> edges;
    if (has_suffix(path, ".csv")) {
        std::ifstream in(path);
        if (!in) throw input_error("cannot open " + path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            auto tok = split_csv(line);
            if (tok.empty()) continue;
            if (tok[0] == "v" && tok.size() == 3) {
                verts.push_back({parse_num(tok[1], path, lineno), parse_num(tok[2], path, lineno)});
            } else if (tok[0] == "e" && tok.size() == 3) {
                edges.push_back({static_cast<int>(parse_num(tok[1], path, lineno)),
                                 static_cast<int>(parse_num(tok[2], path, lineno))});
            } else {
                throw input_error(path + ":" + std::to_string(lineno) + ": expected v,x,y or e,i,j row");
            }
        }
    } else {
        json j = parse_file(path);
        if (!j.contains("vertices") || !j.contains("edges")) {
            throw input_error(path + ": missing 'vertices' or 'edges'");
        }
        for (const auto& v : j["vertices"]) {
            if (!v.is_array() || v.size() != 2) throw input_error(path + ": vertex must be [x,y]");
            verts.push_back({v[0].get<double>(), v[1].get<double>()});
        }
        for (const auto& e : j["edges"]) {
            if (!e.is_array() || e.size() != 2) throw input_error(path + ": edge must be [i,j]");
            edges.push_back({e[0].get<int>(), e[1].get<int>()});
        }
    }
    if (split_components) return largest_component(verts, edges);
    return GeometricGraph(std::move(verts), std::move(edges));
}

void save_graph(const GeometricGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write " + path);
    if (has_suffix(path, ".csv")) {
        for (const Point& p : g.vertices()) {
            out << "v," << format_double(p.x) << ',' << format_double(p.y) << '\n';
        }
        for (const auto& [u, v] : g.edges()) out << "e," << u << ',' << v << '\n';
        return;
    }
    out << "{\n  \"vertices\": [";
    for (int i = 0; i < g.vertex_count(); ++i) {
        if (i) out << ", ";
        out << '[' << format_double(g.vertex(i).x) << ", " << format_double(g.vertex(i).y) << ']';
    }
    out << "],\n  \"edges\": [";
    for (int e = 0; e < g.edge_count(); ++e) {
        if (e) out << ", ";
        out << '[' << g.edge(e).first << ", " << g.edge(e).second << ']';
    }
    out << "]\n}\n";
}

Polyline load_trajectory(const std::string& path) {
    std::vector<Point> pts;
    if (has_suffix(path, ".csv")) {
        std::ifstream in(path);
        if (!in) throw input_error("cannot open " + path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            auto tok = split_csv(line);
            if (tok.size() != 2) {
                throw input_error(path + ":" + std::to_string(lineno) + ": expected x,y row");
            }
            pts.push_back({parse_num(tok[0], path, lineno), parse_num(tok[1], path, lineno)});
        }
    } else {
        json j = parse_file(path);
        if (!j.contains("points")) throw input_error(path + ": missing 'points'");
        for (const auto& p : j["points"]) {
            if (!p.is_array() || p.size() != 2) throw input_error(path + ": point must be [x,y]");
            pts.push_back({p[0].get<double>(), p[1].get<double>()});
        }
    }
    if (pts.empty()) throw input_error(path + ": empty trajectory");
    return Polyline(std::move(pts));
}

void save_trajectory(const Polyline& q, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write " + path);
    if (has_suffix(path, ".csv")) {
        for (const Point& p : q.vertices()) {
            out << format_double(p.x) << ',' << format_double(p.y) << '\n';
        }
        return;
    }
    out << "{\n  \"points\": [";
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (i) out << ", ";
        out << '[' << format_double(q[i].x) << ", " << format_double(q[i].y) << ']';
    }
    out << "]\n}\n";
}

}  // namespace mapmatch

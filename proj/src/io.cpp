#include "dynsc/io.hpp"

#include <fstream>
#include <sstream>

namespace dynsc {

MultiGraph read_graph(std::istream& in) {
    std::size_t n = 0, m = 0;
    std::string mode;
    if (!(in >> n >> m >> mode)) throw std::runtime_error("bad graph header");
    WeightMode wm;
    if (mode == "weighted")
        wm = WeightMode::Weighted;
    else if (mode == "unweighted")
        wm = WeightMode::Unweighted;
    else
        throw std::runtime_error("graph header mode must be weighted|unweighted");
    MultiGraph g(n, wm);
    for (std::size_t i = 0; i < m; ++i) {
        Vertex u, v;
        double w;
        if (!(in >> u >> v >> w)) throw std::runtime_error("bad edge line");
        g.insert_edge(u, v, w);
    }
    return g;
}

MultiGraph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    return read_graph(in);
}

void write_graph(std::ostream& out, const MultiGraph& g) {
    out << g.vertex_count() << ' ' << g.edge_count() << ' '
        << (g.mode() == WeightMode::Unweighted ? "unweighted" : "weighted") << '\n';
    out.precision(17);
    g.for_edges([&](EdgeId, const EdgeRec& e) { out << e.u << ' ' << e.v << ' ' << e.w << '\n'; });
}

void write_graph_file(const std::string& path, const MultiGraph& g) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    write_graph(out, g);
}

} // namespace dynsc

#pragma once

#include <iosfwd>
#include <string>

#include "dynsc/multigraph.hpp"

namespace dynsc {

// Graph file format: header "n m weighted|unweighted", then m lines "u v w",
// whitespace separated, 0-indexed.
MultiGraph read_graph(std::istream& in);
MultiGraph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const MultiGraph& g);
void write_graph_file(const std::string& path, const MultiGraph& g);

} // namespace dynsc

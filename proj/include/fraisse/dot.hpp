#pragma once

// dot.hpp: deterministic DOT export. Vertices in index order, edges in
// the stored (sorted) order. With styling on, end vertices are boxes,
// ramification vertices are filled, and the root is a double circle.

#include "fraisse/graph.hpp"

#include <sstream>

namespace fraisse {

struct DotOptions {
    bool style = true;
    std::optional<int> root;
    std::string name = "G";
};

inline std::string export_dot(const Graph& g, DotOptions opt = {}) {
    std::ostringstream os;
    os << "graph " << opt.name << " {\n";
    for (int v = 0; v < g.n(); ++v) {
        os << "  v" << v << " [label=\"" << g.label(v) << "\"";
        if (opt.style) {
            if (opt.root && *opt.root == v)
                os << " shape=doublecircle";
            else if (g.order(v) <= 1)
                os << " shape=box";
            else if (g.order(v) >= 3)
                os << " style=filled fillcolor=lightgray";
        }
        os << "];\n";
    }
    for (auto [u, v] : g.edges())
        os << "  v" << u << " -- v" << v << ";\n";
    os << "}\n";
    return os.str();
}

} // namespace fraisse

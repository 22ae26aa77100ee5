#pragma once

// graph.hpp: finite topological graphs.
//
// A graph is a vertex set {0,...,n-1} together with a reflexive and
// symmetric edge relation. Only nondegenerate edges are stored, as
// pairs u < v, sorted lexicographically; the diagonal <v,v> is
// implicitly present everywhere and never materialized. Values are
// immutable after construction and cheap to copy at the sizes this
// library works with.

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fraisse {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct invalid_input : error {
    using error::error;
};
// A checker or construction was handed a map that fails its precondition
// (e.g. asking for monotonicity of a non-epimorphism).
struct precondition_error : error {
    using error::error;
};
struct budget_exceeded : error {
    using error::error;
};
// A certified construction exhausted its choice tree without producing a
// result that passes its own certificate.
struct construction_failed : error {
    using error::error;
};

using Edge = std::pair<int, int>;

class Graph {
  public:
    Graph() : n_(1) { rebuild(); }

    Graph(int n, std::vector<Edge> edges,
          std::optional<std::vector<std::string>> labels = std::nullopt)
        : n_(n), labels_(std::move(labels)) {
        if (n_ < 1)
            throw invalid_input("graph needs at least one vertex");
        for (auto& [u, v] : edges) {
            if (u == v)
                throw invalid_input("degenerate edges are implicit, not stored");
            if (u > v)
                std::swap(u, v);
            if (u < 0 || v >= n_)
                throw invalid_input("edge references vertex outside 0..n-1");
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        edges_ = std::move(edges);
        if (labels_ && static_cast<int>(labels_->size()) != n_)
            throw invalid_input("label list length differs from vertex count");
        rebuild();
    }

    int n() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::optional<std::vector<std::string>>& labels() const { return labels_; }

    bool valid_vertex(int v) const { return v >= 0 && v < n_; }

    // Nondegenerate adjacency.
    bool has_edge(int u, int v) const {
        return u != v && adj_[static_cast<size_t>(u) * n_ + v];
    }
    // The full relation E(G): stored pairs plus the diagonal.
    bool related(int u, int v) const { return u == v || has_edge(u, v); }

    const std::vector<int>& neighbors(int v) const { return nbr_[v]; }

    // Number of nondegenerate edges containing v.
    int order(int v) const { return static_cast<int>(nbr_[v].size()); }

    std::string label(int v) const {
        if (labels_)
            return (*labels_)[v];
        return std::to_string(v);
    }

    Graph with_labels(std::vector<std::string> labels) const {
        return Graph(n_, edges_, std::move(labels));
    }

    bool operator==(const Graph& o) const {
        return n_ == o.n_ && edges_ == o.edges_;
    }

  private:
    void rebuild() {
        adj_.assign(static_cast<size_t>(n_) * n_, false);
        nbr_.assign(n_, {});
        for (auto [u, v] : edges_) {
            adj_[static_cast<size_t>(u) * n_ + v] = true;
            adj_[static_cast<size_t>(v) * n_ + u] = true;
            nbr_[u].push_back(v);
            nbr_[v].push_back(u);
        }
        for (auto& ns : nbr_)
            std::sort(ns.begin(), ns.end());
    }

    int n_;
    std::vector<Edge> edges_;
    std::optional<std::vector<std::string>> labels_;
    std::vector<bool> adj_;
    std::vector<std::vector<int>> nbr_;
};

// A subset of the vertices of some parent graph, by characteristic vector.
struct VertexSet {
    int n = 0;
    std::vector<bool> in;

    VertexSet() = default;
    explicit VertexSet(int n_) : n(n_), in(n_, false) {}

    static VertexSet all(int n) {
        VertexSet s(n);
        std::fill(s.in.begin(), s.in.end(), true);
        return s;
    }
    static VertexSet of(int n, std::initializer_list<int> vs) {
        VertexSet s(n);
        for (int v : vs)
            s.add(v);
        return s;
    }
    static VertexSet of(int n, const std::vector<int>& vs) {
        VertexSet s(n);
        for (int v : vs)
            s.add(v);
        return s;
    }

    void add(int v) {
        if (v < 0 || v >= n)
            throw invalid_input("vertex outside the parent range");
        in[v] = true;
    }
    bool contains(int v) const { return v >= 0 && v < n && in[v]; }
    int count() const { return static_cast<int>(std::count(in.begin(), in.end(), true)); }

    std::vector<int> members() const {
        std::vector<int> out;
        for (int v = 0; v < n; ++v)
            if (in[v])
                out.push_back(v);
        return out;
    }

    bool operator==(const VertexSet& o) const { return n == o.n && in == o.in; }
};

// Partition of a vertex subset into its components; comp[v] = -1 for
// vertices outside the subset, otherwise ids are 0..count-1 in order of
// first (lowest-index) appearance.
struct ComponentPartition {
    std::vector<int> comp;
    int count = 0;

    bool same(int u, int v) const { return comp[u] >= 0 && comp[u] == comp[v]; }

    std::vector<int> component_of(int v) const {
        std::vector<int> out;
        for (int u = 0; u < static_cast<int>(comp.size()); ++u)
            if (comp[u] == comp[v])
                out.push_back(u);
        return out;
    }
};

// Maximal connected pieces of s under the induced subgraph of g
// (nondegenerate edges with both ends in s).
inline ComponentPartition components(const Graph& g, const VertexSet& s) {
    if (s.n != g.n())
        throw invalid_input("vertex set belongs to a different graph");
    ComponentPartition p;
    p.comp.assign(g.n(), -1);
    std::vector<int> stack;
    for (int v = 0; v < g.n(); ++v) {
        if (!s.in[v] || p.comp[v] >= 0)
            continue;
        int id = p.count++;
        p.comp[v] = id;
        stack.push_back(v);
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int w : g.neighbors(u)) {
                if (s.in[w] && p.comp[w] < 0) {
                    p.comp[w] = id;
                    stack.push_back(w);
                }
            }
        }
    }
    return p;
}

// The empty set counts as connected.
inline bool is_connected(const Graph& g, const VertexSet& s) {
    return components(g, s).count <= 1;
}

inline bool is_connected(const Graph& g) { return is_connected(g, VertexSet::all(g.n())); }

// Connected and acyclic; for a connected graph that is exactly
// |stored edges| = n-1.
inline bool is_tree(const Graph& g) {
    return g.edge_count() == g.n() - 1 && is_connected(g);
}

inline int vertex_order(const Graph& g, int v) {
    if (!g.valid_vertex(v))
        throw invalid_input("vertex outside 0..n-1");
    return g.order(v);
}

// Vertices of order <= 1. An isolated vertex counts as an end vertex.
inline VertexSet end_vertices(const Graph& g) {
    VertexSet s(g.n());
    for (int v = 0; v < g.n(); ++v)
        if (g.order(v) <= 1)
            s.in[v] = true;
    return s;
}

inline VertexSet ramification_vertices(const Graph& g) {
    VertexSet s(g.n());
    for (int v = 0; v < g.n(); ++v)
        if (g.order(v) >= 3)
            s.in[v] = true;
    return s;
}

// Finite arcs are exactly the path graphs on >= 2 vertices: connected,
// every vertex of order <= 2, exactly two of order 1. Returns the two
// end vertices, lowest first. The single vertex is not an arc here;
// callers wanting "arc or point" handle the point case themselves.
inline std::optional<Edge> is_arc(const Graph& g) {
    if (g.n() < 2 || !is_connected(g))
        return std::nullopt;
    int a = -1, b = -1;
    for (int v = 0; v < g.n(); ++v) {
        int d = g.order(v);
        if (d > 2 || d == 0)
            return std::nullopt;
        if (d == 1) {
            if (a < 0)
                a = v;
            else if (b < 0)
                b = v;
            else
                return std::nullopt;
        }
    }
    if (b < 0)
        return std::nullopt; // connected with max order 2 and <2 ends: a cycle
    return Edge{a, b};
}

// Induced subgraph on a vertex subset, with the index translation both ways.
struct InducedSubgraph {
    Graph graph;
    std::vector<int> old_of_new;
    std::vector<int> new_of_old; // -1 outside the subset
};

inline InducedSubgraph induced_subgraph(const Graph& g, const VertexSet& s) {
    if (s.n != g.n())
        throw invalid_input("vertex set belongs to a different graph");
    InducedSubgraph out;
    out.new_of_old.assign(g.n(), -1);
    for (int v = 0; v < g.n(); ++v)
        if (s.in[v]) {
            out.new_of_old[v] = static_cast<int>(out.old_of_new.size());
            out.old_of_new.push_back(v);
        }
    if (out.old_of_new.empty())
        throw invalid_input("induced subgraph needs at least one vertex");
    std::vector<Edge> edges;
    for (auto [u, v] : g.edges())
        if (s.in[u] && s.in[v])
            edges.emplace_back(out.new_of_old[u], out.new_of_old[v]);
    std::optional<std::vector<std::string>> labels;
    if (g.labels()) {
        labels.emplace();
        for (int v : out.old_of_new)
            labels->push_back((*g.labels())[v]);
    }
    out.graph = Graph(static_cast<int>(out.old_of_new.size()), std::move(edges), std::move(labels));
    return out;
}

// The unique simple path from a to b in a tree, inclusive.
inline std::vector<int> unique_path(const Graph& g, int a, int b) {
    if (!g.valid_vertex(a) || !g.valid_vertex(b))
        throw invalid_input("vertex outside 0..n-1");
    if (!is_tree(g))
        throw precondition_error("unique_path requires a tree");
    if (a == b)
        return {a};
    std::vector<int> parent(g.n(), -2);
    parent[a] = -1;
    std::vector<int> stack{a};
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        if (u == b)
            break;
        for (int w : g.neighbors(u)) {
            if (parent[w] == -2) {
                parent[w] = u;
                stack.push_back(w);
            }
        }
    }
    std::vector<int> path;
    for (int v = b; v != -1; v = parent[v])
        path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
}

} // namespace fraisse

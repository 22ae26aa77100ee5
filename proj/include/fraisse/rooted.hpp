#pragma once

// rooted.hpp: rooted trees, the root-induced partial order, chains,
// branches and fans.
//
// On a rooted tree, x <= y iff x lies on the unique path from the root
// to y. A chain is a root-anchored, strictly increasing vertex sequence
// whose consecutive elements are adjacent; a branch is a maximal chain.
// A fan only branches at its root.

#include "fraisse/graph.hpp"

namespace fraisse {

struct RootedTree {
    Graph tree;
    int root = 0;

    RootedTree() = default;
    RootedTree(Graph t, int r) : tree(std::move(t)), root(r) {
        if (!tree.valid_vertex(root))
            throw invalid_input("root outside 0..n-1");
        if (!is_tree(tree))
            throw precondition_error("rooted tree needs a tree underneath");
    }
};

// Queryable root order, precomputed as an ancestor matrix.
struct RootOrder {
    int n = 0;
    int root = 0;
    std::vector<int> parent; // -1 at the root
    std::vector<int> depth;
    std::vector<bool> anc; // anc[x*n+y]: x on the root..y path

    bool leq(int x, int y) const { return anc[static_cast<size_t>(x) * n + y]; }
    bool comparable(int x, int y) const { return leq(x, y) || leq(y, x); }
};

inline RootOrder root_order(const Graph& g, int root) {
    if (!g.valid_vertex(root))
        throw invalid_input("root outside 0..n-1");
    if (!is_tree(g))
        throw precondition_error("root order requires a tree");
    RootOrder o;
    o.n = g.n();
    o.root = root;
    o.parent.assign(o.n, -2);
    o.depth.assign(o.n, 0);
    o.anc.assign(static_cast<size_t>(o.n) * o.n, false);
    std::vector<int> stack{root};
    o.parent[root] = -1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        // ancestors of u are the ancestors of its parent, plus u itself
        if (o.parent[u] >= 0) {
            int p = o.parent[u];
            o.depth[u] = o.depth[p] + 1;
            for (int x = 0; x < o.n; ++x)
                o.anc[static_cast<size_t>(x) * o.n + u] =
                    o.anc[static_cast<size_t>(x) * o.n + p];
        }
        o.anc[static_cast<size_t>(u) * o.n + u] = true;
        for (int w : g.neighbors(u))
            if (o.parent[w] == -2) {
                o.parent[w] = u;
                stack.push_back(w);
            }
    }
    return o;
}

inline RootOrder root_order(const RootedTree& t) { return root_order(t.tree, t.root); }

struct Chain {
    std::vector<int> verts;

    int length() const { return static_cast<int>(verts.size()); } // vertex count
    int tip() const { return verts.back(); }
};

// All maximal chains, i.e. root-to-leaf paths, in DFS order with
// ascending neighbor indices. Covers every vertex.
inline std::vector<Chain> branches(const RootedTree& t) {
    std::vector<Chain> out;
    std::vector<int> path;
    auto rec = [&](auto&& self, int v, int parent) -> void {
        path.push_back(v);
        bool leaf = true;
        for (int w : t.tree.neighbors(v))
            if (w != parent) {
                leaf = false;
                self(self, w, v);
            }
        if (leaf)
            out.push_back(Chain{path});
        path.pop_back();
    };
    rec(rec, t.root, -1);
    return out;
}

// Literal check: any vertex adjacent to two incomparable vertices must
// be the root.
inline bool is_fan(const RootedTree& t) {
    RootOrder o = root_order(t);
    for (int p = 0; p < t.tree.n(); ++p) {
        if (p == t.root)
            continue;
        const auto& ns = t.tree.neighbors(p);
        for (size_t i = 0; i < ns.size(); ++i)
            for (size_t j = i + 1; j < ns.size(); ++j)
                if (!o.comparable(ns[i], ns[j]))
                    return false;
    }
    return true;
}

inline bool is_uniform_fan(const RootedTree& t) {
    if (!is_fan(t))
        return false;
    auto br = branches(t);
    for (const auto& b : br)
        if (b.length() != br.front().length())
            return false;
    return true;
}

} // namespace fraisse

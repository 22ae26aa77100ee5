#pragma once

// canonical.hpp: isomorphism-invariant canonical forms and generation of
// trees up to isomorphism.
//
// Trees get the classic bottom-up encoding (sorted child encodings in
// parentheses) rooted at the graph center, taking the smaller of the two
// candidate encodings when the tree is bicentral. Arbitrary graphs fall
// back to the lexicographically smallest adjacency bit matrix over all
// vertex orderings, with branch-and-bound pruning; that is only feasible
// for the small graphs this library manipulates, so it is guarded.
//
// Tree enumeration grows trees one leaf at a time and deduplicates by
// canonical form. Every tree on k+1 vertices arises from a tree on k
// vertices by deleting a leaf, so the growth is exhaustive.

#include "fraisse/graph.hpp"

#include <map>
#include <numeric>
#include <string>

namespace fraisse {

namespace detail {

inline std::string ahu_encoding(const Graph& g, int root, int parent) {
    std::vector<std::string> child;
    for (int w : g.neighbors(root))
        if (w != parent)
            child.push_back(ahu_encoding(g, w, root));
    std::sort(child.begin(), child.end());
    std::string out = "(";
    for (auto& c : child)
        out += c;
    out += ")";
    return out;
}

inline std::vector<int> tree_centers(const Graph& g) {
    int n = g.n();
    if (n == 1)
        return {0};
    std::vector<int> deg(n), layer, next;
    for (int v = 0; v < n; ++v) {
        deg[v] = g.order(v);
        if (deg[v] <= 1)
            layer.push_back(v);
    }
    int remaining = n;
    while (remaining > 2) {
        remaining -= static_cast<int>(layer.size());
        next.clear();
        for (int v : layer)
            for (int w : g.neighbors(v))
                if (--deg[w] == 1)
                    next.push_back(w);
        layer.swap(next);
    }
    std::sort(layer.begin(), layer.end());
    return layer;
}

// Smallest adjacency bit matrix over all orderings. Candidates are
// grouped by degree; positions with a worse prefix than the incumbent
// are cut.
inline std::string min_matrix_form(const Graph& g) {
    int n = g.n();
    if (n > 10)
        throw budget_exceeded("general-graph canonical form guarded at 10 vertices");
    std::vector<int> perm(n, -1);
    std::vector<bool> used(n, false);
    std::string best;
    std::string cur(static_cast<size_t>(n) * (n - 1) / 2, '0');

    // bits for new vertex at position k against positions 0..k-1 start at
    // offset k*(k-1)/2
    auto offset = [](int k) { return k * (k - 1) / 2; };

    std::vector<int> degs(n);
    for (int v = 0; v < n; ++v)
        degs[v] = g.order(v);

    auto rec = [&](auto&& self, int k) -> void {
        if (k == n) {
            if (best.empty() || cur < best)
                best = cur;
            return;
        }
        for (int v = 0; v < n; ++v) {
            if (used[v])
                continue;
            int off = offset(k);
            bool worse = false;
            for (int i = 0; i < k; ++i)
                cur[off + i] = g.has_edge(perm[i], v) ? '1' : '0';
            if (!best.empty()) {
                // compare the prefix written so far
                int upto = off + k;
                int cmp = best.compare(0, upto, cur, 0, upto);
                if (cmp < 0)
                    worse = true;
            }
            if (!worse) {
                used[v] = true;
                perm[k] = v;
                self(self, k + 1);
                used[v] = false;
            }
        }
    };
    rec(rec, 0);
    return best;
}

} // namespace detail

// Equal exactly for isomorphic graphs. Labels and roots are ignored;
// isomorphism is of the underlying edge relation.
inline std::string canonical_form(const Graph& g) {
    if (is_tree(g)) {
        auto centers = detail::tree_centers(g);
        std::string enc = detail::ahu_encoding(g, centers[0], -1);
        if (centers.size() == 2)
            enc = std::min(enc, detail::ahu_encoding(g, centers[1], -1));
        return "T" + std::to_string(g.n()) + ":" + enc;
    }
    std::vector<int> degs(g.n());
    for (int v = 0; v < g.n(); ++v)
        degs[v] = g.order(v);
    std::sort(degs.begin(), degs.end());
    std::string pre = "G" + std::to_string(g.n()) + ":";
    for (int d : degs)
        pre += std::to_string(d) + ",";
    return pre + ":" + detail::min_matrix_form(g);
}

// Rooted-isomorphism invariant for trees with a distinguished vertex.
inline std::string canonical_form_rooted(const Graph& g, int root) {
    if (!g.valid_vertex(root))
        throw invalid_input("root outside 0..n-1");
    if (!is_tree(g))
        throw precondition_error("rooted canonical form requires a tree");
    return "R" + std::to_string(g.n()) + ":" + detail::ahu_encoding(g, root, -1);
}

constexpr int kTreeEnumerationCap = 12;

// One representative per isomorphism class of trees on exactly n
// vertices, sorted by canonical form.
inline std::vector<Graph> enumerate_trees(int n) {
    if (n < 1)
        throw invalid_input("enumerate_trees needs n >= 1");
    if (n > kTreeEnumerationCap)
        throw budget_exceeded("tree enumeration capped at 12 vertices");
    std::vector<Graph> level{Graph(1, {})};
    for (int k = 2; k <= n; ++k) {
        std::map<std::string, Graph> next;
        for (const Graph& t : level) {
            for (int v = 0; v < t.n(); ++v) {
                auto edges = t.edges();
                edges.emplace_back(v, t.n());
                Graph grown(t.n() + 1, std::move(edges));
                next.emplace(canonical_form(grown), std::move(grown));
            }
        }
        level.clear();
        for (auto& [form, t] : next)
            level.push_back(std::move(t));
    }
    return level;
}

// One representative per rooted-isomorphism class, as (tree, root).
inline std::vector<std::pair<Graph, int>> enumerate_rooted_trees(int n) {
    std::vector<std::pair<Graph, int>> out;
    std::map<std::string, std::pair<Graph, int>> seen;
    for (const Graph& t : enumerate_trees(n))
        for (int r = 0; r < t.n(); ++r)
            seen.emplace(canonical_form_rooted(t, r), std::make_pair(t, r));
    for (auto& [form, tr] : seen)
        out.push_back(std::move(tr));
    return out;
}

} // namespace fraisse

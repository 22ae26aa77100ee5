#pragma once

// fans.hpp: the two normalization moves of the end-preserving family.
//
// tree_to_uniform_fan unfolds a rooted tree into a uniform fan with one
// branch per branch of the tree, every branch padded to the maximum
// branch length; the extra tail of a padded branch maps to the source
// leaf. The collapse is an order- and end-preserving epimorphism (not
// monotone or confluent in general: a vertex shared by several tree
// branches gets one preimage per fan branch).
//
// stretch_fan lengthens every branch of a uniform fan to a prescribed
// length, repeating the leaf image on the new top segment; each branch
// maps onto its source branch monotonically.

#include "fraisse/morphism.hpp"
#include "fraisse/rooted.hpp"

namespace fraisse {

struct FanResult {
    RootedTree fan;
    GraphMap onto; // fan -> source tree
};

inline FanResult tree_to_uniform_fan(const RootedTree& t) {
    auto br = branches(t);
    int len = 0;
    for (const auto& b : br)
        len = std::max(len, b.length());
    if (len <= 1) {
        // single vertex
        return FanResult{t, identity_map(t.tree, t.root)};
    }
    int n = 1 + static_cast<int>(br.size()) * (len - 1);
    std::vector<Edge> edges;
    std::vector<int> assign(n, -1);
    assign[0] = t.root;
    int next = 1;
    for (const auto& b : br) {
        int prev = 0;
        for (int j = 1; j < len; ++j) {
            int v = next++;
            edges.emplace_back(prev, v);
            assign[v] = b.verts[std::min(j, b.length() - 1)];
            prev = v;
        }
    }
    Graph fan(n, std::move(edges));
    return FanResult{RootedTree(fan, 0),
                     GraphMap(fan, t.tree, std::move(assign), std::make_pair(0, t.root))};
}

inline FanResult stretch_fan(const RootedTree& f, int target_len) {
    if (!is_uniform_fan(f))
        throw precondition_error("stretch_fan requires a uniform fan");
    auto br = branches(f);
    int cur = br.front().length();
    if (target_len < cur)
        throw invalid_input("stretch_fan: target length below the current one");
    if (target_len == cur)
        return FanResult{f, identity_map(f.tree, f.root)};
    int n = 1 + static_cast<int>(br.size()) * (target_len - 1);
    std::vector<Edge> edges;
    std::vector<int> assign(n, -1);
    assign[0] = f.root;
    int next = 1;
    for (const auto& b : br) {
        int prev = 0;
        for (int j = 1; j < target_len; ++j) {
            int v = next++;
            edges.emplace_back(prev, v);
            assign[v] = b.verts[std::min(j, cur - 1)];
            prev = v;
        }
    }
    Graph fan(n, std::move(edges));
    return FanResult{RootedTree(fan, 0),
                     GraphMap(fan, f.tree, std::move(assign), std::make_pair(0, f.root))};
}

} // namespace fraisse

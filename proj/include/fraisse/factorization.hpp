#pragma once

// factorization.hpp: monotone-light factorization of an epimorphism.
//
// x ~ y iff f(x) = f(y) and x, y lie in the same component of the fiber
// f^-1(f(x)). The middle graph M is the quotient, m the projection
// (monotone), l the induced map (light), and f = l o m. Class ids are
// assigned by smallest contained vertex index so output is
// deterministic. When the input preserves root orders the quotient of a
// tree is again a tree and both parts preserve orders; the middle root
// is the class of the domain root.

#include "fraisse/morphism.hpp"

namespace fraisse {

struct Factorization {
    Graph middle;
    GraphMap m; // dom -> middle, monotone
    GraphMap l; // middle -> cod, light
    std::vector<int> classmap;
};

inline Factorization ml_factorize(const GraphMap& f) {
    detail::require_epi(f, "ml_factorize");
    const Graph& dom = f.dom();
    const int n = dom.n();

    // same image and same fiber component
    std::vector<int> classmap(n, -1);
    {
        std::vector<int> comp_of(n, -1);
        for (int h = 0; h < f.cod().n(); ++h) {
            ComponentPartition parts = components(dom, fiber(f, h));
            for (int v = 0; v < n; ++v)
                if (parts.comp[v] >= 0)
                    comp_of[v] = parts.comp[v] * (f.cod().n() + 1) + h;
        }
        // smallest-vertex-first class ids
        std::vector<int> seen_key;
        for (int v = 0; v < n; ++v) {
            int k = comp_of[v];
            int id = -1;
            for (size_t i = 0; i < seen_key.size(); ++i)
                if (seen_key[i] == k)
                    id = static_cast<int>(i);
            if (id < 0) {
                id = static_cast<int>(seen_key.size());
                seen_key.push_back(k);
            }
            classmap[v] = id;
        }
    }
    int classes = 1 + *std::max_element(classmap.begin(), classmap.end());

    std::vector<Edge> medges;
    for (auto [u, v] : dom.edges())
        if (classmap[u] != classmap[v])
            medges.emplace_back(std::min(classmap[u], classmap[v]),
                                std::max(classmap[u], classmap[v]));
    Graph middle(classes, std::move(medges));

    std::vector<int> lassign(classes, -1);
    for (int v = 0; v < n; ++v)
        lassign[classmap[v]] = f(v);

    std::optional<std::pair<int, int>> mroots, lroots;
    if (f.roots()) {
        int mid_root = classmap[f.roots()->first];
        mroots = std::make_pair(f.roots()->first, mid_root);
        lroots = std::make_pair(mid_root, f.roots()->second);
    }
    GraphMap m(dom, middle, classmap, mroots);
    GraphMap l(middle, f.cod(), std::move(lassign), lroots);
    return Factorization{std::move(middle), std::move(m), std::move(l), classmap};
}

} // namespace fraisse

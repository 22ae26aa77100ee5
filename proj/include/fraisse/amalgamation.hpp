#pragma once

// amalgamation.hpp: the amalgamation constructions.
//
//   pullback                 the standard amalgamation procedure D' with
//                            coordinate projections; light/monotone/
//                            confluent on one leg propagate to the
//                            opposite projection
//   component_amalgamate     one component of D' (confluent inputs over
//                            connected graphs project onto all of B, C)
//   tree_amalgamate          the standard tree amalgamation: vertices are
//                            the root-anchored strictly increasing
//                            adjacent chains of D', edges join a chain to
//                            its one-vertex extensions. Optionally keeps
//                            only prefixes of maximal chains whose tips
//                            project to proper ends on both sides, which
//                            is what makes the construction end-preserving
//   monotone_amalgamate      the inductive leaf-stripping recursion for
//                            monotone maps between trees, run as a
//                            backtracking search threading required
//                            pullback pairs (case 2 needs the recursive
//                            amalgamation to hit the pair (a, p); the
//                            plain induction does not guarantee that)
//   confluent_amalgamate     monotone-light factorization of both legs,
//                            pullback of the light parts (a rooted tree),
//                            pullback of each monotone part against the
//                            opposite projection, and a final rooted
//                            monotone amalgamation
//   end_preserving_amalgamate  unfold both domains to uniform fans of a
//                            common branch length and wedge one aligned
//                            chain per pair of branches with matching
//                            tip images
//   search_amalgamate        exhaustive oracle over candidate trees and
//                            constrained map pairs
//
// Every construction recomputes its certificate; nothing is trusted by
// derivation. Free choices are resolved deterministically (lowest index
// first) so fixtures reproduce bit-exactly.

#include "fraisse/canonical.hpp"
#include "fraisse/factorization.hpp"
#include "fraisse/fans.hpp"
#include "fraisse/morphism.hpp"

#include <map>
#include <set>

namespace fraisse {

struct Certificate {
    bool commutes = false;
    std::vector<std::pair<std::string, bool>> checks;

    bool ok() const {
        if (!commutes)
            return false;
        for (const auto& [name, v] : checks)
            if (!v)
                return false;
        return true;
    }
};

struct AmalgamationResult {
    Graph d;
    std::optional<int> root;
    GraphMap f0; // d -> B
    GraphMap g0; // d -> C
    Certificate certificate;
};

namespace detail {

inline bool square_commutes(const GraphMap& f, const GraphMap& g, const GraphMap& f0,
                            const GraphMap& g0) {
    if (!(f0.cod() == f.dom()) || !(g0.cod() == g.dom()))
        return false;
    return compose(f0, f).assign() == compose(g0, g).assign();
}

inline bool safe_check(const GraphMap& m, MapProperty p) {
    try {
        return check_property(m, p).verdict;
    } catch (const error&) {
        return false;
    }
}

inline void require_common_codomain(const GraphMap& f, const GraphMap& g, const char* who) {
    if (!(f.cod() == g.cod()))
        throw invalid_input(std::string(who) + ": the two maps need a common codomain");
    require_epi(f, who);
    require_epi(g, who);
}

inline void require_verdict(const GraphMap& m, MapProperty p, const char* who) {
    if (!safe_check(m, p))
        throw precondition_error(std::string(who) + ": input map is not " + property_name(p));
}

} // namespace detail

struct OrderedPullback {
    Graph graph;
    std::vector<std::pair<int, int>> pairs; // vertex -> (b, c)
    GraphMap f0;                            // graph -> B
    GraphMap g0;                            // graph -> C
    std::optional<int> root;                // index of (r(B), r(C))
    std::vector<bool> prod;                 // product order, when rooted trees

    bool leq(int i, int j) const {
        return prod[static_cast<size_t>(i) * graph.n() + j];
    }
};

inline OrderedPullback pullback(const GraphMap& f, const GraphMap& g) {
    detail::require_common_codomain(f, g, "pullback");
    const Graph &B = f.dom(), &C = g.dom();

    OrderedPullback P;
    std::vector<std::vector<int>> index(B.n(), std::vector<int>(C.n(), -1));
    std::vector<std::string> labels;
    for (int b = 0; b < B.n(); ++b)
        for (int c = 0; c < C.n(); ++c)
            if (f(b) == g(c)) {
                index[b][c] = static_cast<int>(P.pairs.size());
                P.pairs.emplace_back(b, c);
                labels.push_back("(" + B.label(b) + "," + C.label(c) + ")");
            }
    int n = static_cast<int>(P.pairs.size());
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            auto [b1, c1] = P.pairs[i];
            auto [b2, c2] = P.pairs[j];
            if (B.related(b1, b2) && C.related(c1, c2))
                edges.emplace_back(i, j);
        }
    P.graph = Graph(n, std::move(edges), std::move(labels));

    std::vector<int> fa(n), ga(n);
    for (int i = 0; i < n; ++i) {
        fa[i] = P.pairs[i].first;
        ga[i] = P.pairs[i].second;
    }
    std::optional<std::pair<int, int>> f0roots, g0roots;
    if (f.roots() && g.roots() && f.roots()->second == g.roots()->second) {
        int rb = f.roots()->first, rc = g.roots()->first;
        P.root = index[rb][rc];
        f0roots = std::make_pair(*P.root, rb);
        g0roots = std::make_pair(*P.root, rc);
        if (is_tree(B) && is_tree(C)) {
            RootOrder ob = root_order(B, rb), oc = root_order(C, rc);
            P.prod.assign(static_cast<size_t>(n) * n, false);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    P.prod[static_cast<size_t>(i) * n + j] =
                        ob.leq(P.pairs[i].first, P.pairs[j].first) &&
                        oc.leq(P.pairs[i].second, P.pairs[j].second);
        }
    }
    P.f0 = GraphMap(P.graph, B, std::move(fa), f0roots);
    P.g0 = GraphMap(P.graph, C, std::move(ga), g0roots);
    return P;
}

// One component of the standard amalgamation; for confluent legs over
// connected graphs every component projects onto all of B and C.
inline AmalgamationResult component_amalgamate(const GraphMap& f, const GraphMap& g) {
    detail::require_common_codomain(f, g, "component_amalgamate");
    if (!is_connected(f.cod()) || !is_connected(f.dom()) || !is_connected(g.dom()))
        throw precondition_error("component_amalgamate: inputs must be connected");
    detail::require_verdict(f, MapProperty::confluent, "component_amalgamate");
    detail::require_verdict(g, MapProperty::confluent, "component_amalgamate");

    OrderedPullback P = pullback(f, g);
    ComponentPartition parts = components(P.graph, VertexSet::all(P.graph.n()));
    int want = P.root ? parts.comp[*P.root] : parts.comp[0];
    VertexSet keep(P.graph.n());
    for (int v = 0; v < P.graph.n(); ++v)
        if (parts.comp[v] == want)
            keep.in[v] = true;
    InducedSubgraph sub = induced_subgraph(P.graph, keep);

    std::vector<int> fa, ga;
    for (int v : sub.old_of_new) {
        fa.push_back(P.pairs[v].first);
        ga.push_back(P.pairs[v].second);
    }
    AmalgamationResult res;
    res.d = sub.graph;
    std::optional<std::pair<int, int>> f0roots, g0roots;
    if (P.root) {
        res.root = sub.new_of_old[*P.root];
        f0roots = std::make_pair(*res.root, f.roots()->first);
        g0roots = std::make_pair(*res.root, g.roots()->first);
    }
    res.f0 = GraphMap(res.d, f.dom(), std::move(fa), f0roots);
    res.g0 = GraphMap(res.d, g.dom(), std::move(ga), g0roots);
    res.certificate.commutes = detail::square_commutes(f, g, res.f0, res.g0);
    res.certificate.checks = {
        {"d.connected", is_connected(res.d)},
        {"f0.epimorphism", detail::safe_check(res.f0, MapProperty::epimorphism)},
        {"g0.epimorphism", detail::safe_check(res.g0, MapProperty::epimorphism)},
        {"f0.confluent", detail::safe_check(res.f0, MapProperty::confluent)},
        {"g0.confluent", detail::safe_check(res.g0, MapProperty::confluent)},
        {"f0.covers-B", [&] {
             std::vector<bool> hit(f.dom().n(), false);
             for (int v = 0; v < res.d.n(); ++v)
                 hit[res.f0(v)] = true;
             return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
         }()},
        {"g0.covers-C", [&] {
             std::vector<bool> hit(g.dom().n(), false);
             for (int v = 0; v < res.d.n(); ++v)
                 hit[res.g0(v)] = true;
             return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
         }()},
    };
    return res;
}

struct TreeAmalgamateOptions {
    // keep only prefixes of maximal chains whose tips project to proper
    // ends on both sides
    bool proper_end_tips = false;
    long long chain_budget = 200000;
};

// Standard tree amalgamation: D = proper chains of the ordered pullback,
// rooted at the trivial chain, edges between a chain and its one-vertex
// extensions; projections take the tip coordinates.
inline AmalgamationResult tree_amalgamate(const GraphMap& f, const GraphMap& g,
                                          const TreeAmalgamateOptions& opt = {}) {
    if (!f.roots() || !g.roots())
        throw precondition_error("tree_amalgamate requires rooted maps");
    if (f.roots()->second != g.roots()->second)
        throw invalid_input("tree_amalgamate: codomain roots differ");
    detail::require_verdict(f, MapProperty::order_preserving, "tree_amalgamate");
    detail::require_verdict(g, MapProperty::order_preserving, "tree_amalgamate");

    if (opt.proper_end_tips) {
        detail::require_verdict(f, MapProperty::end_preserving, "tree_amalgamate(filtered)");
        detail::require_verdict(g, MapProperty::end_preserving, "tree_amalgamate(filtered)");
    }

    OrderedPullback P = pullback(f, g);
    const int pn = P.graph.n();

    // extensions ascend strictly in the product order along pullback edges
    auto extensions = [&](int v) {
        std::vector<int> out;
        for (int w : P.graph.neighbors(v))
            if (P.leq(v, w) && v != w)
                out.push_back(w);
        return out;
    };

    std::vector<bool> allowed(pn, true);
    if (opt.proper_end_tips) {
        // a vertex is usable iff some ascending path from it reaches a
        // maximal vertex whose coordinates are proper ends on both sides
        const Graph &B = f.dom(), &C = g.dom();
        int rb = f.roots()->first, rc = g.roots()->first;
        std::vector<int> state(pn, -1); // -1 unknown, 0 bad, 1 good
        auto good = [&](auto&& self, int v) -> bool {
            if (state[v] >= 0)
                return state[v] == 1;
            state[v] = 0;
            auto ext = extensions(v);
            bool ok;
            if (ext.empty()) {
                ok = is_proper_end_vertex(B, P.pairs[v].first, rb) &&
                     is_proper_end_vertex(C, P.pairs[v].second, rc);
            } else {
                ok = false;
                for (int w : ext)
                    if (self(self, w)) {
                        ok = true;
                        break;
                    }
            }
            state[v] = ok ? 1 : 0;
            return ok;
        };
        for (int v = 0; v < pn; ++v)
            allowed[v] = good(good, v);
    }

    if (!P.root || !allowed[*P.root])
        throw construction_failed("tree_amalgamate: no admissible chains from the root");

    // chains discovered by DFS; a chain is its parent chain plus a tip
    std::vector<int> tip{*P.root};
    std::vector<int> parent{-1};
    std::vector<Edge> edges;
    std::vector<std::string> labels{P.graph.label(*P.root)};
    auto grow = [&](auto&& self, int chain) -> void {
        for (int w : extensions(tip[chain])) {
            if (!allowed[w])
                continue;
            int c = static_cast<int>(tip.size());
            if (c >= opt.chain_budget)
                throw budget_exceeded("tree_amalgamate: chain budget exceeded");
            tip.push_back(w);
            parent.push_back(chain);
            labels.push_back(P.graph.label(w));
            edges.emplace_back(chain, c);
            self(self, c);
        }
    };
    grow(grow, 0);

    AmalgamationResult res;
    res.d = Graph(static_cast<int>(tip.size()), std::move(edges), std::move(labels));
    res.root = 0;
    std::vector<int> fa, ga;
    for (int t : tip) {
        fa.push_back(P.pairs[t].first);
        ga.push_back(P.pairs[t].second);
    }
    res.f0 = GraphMap(res.d, f.dom(), std::move(fa), std::make_pair(0, f.roots()->first));
    res.g0 = GraphMap(res.d, g.dom(), std::move(ga), std::make_pair(0, g.roots()->first));

    res.certificate.commutes = detail::square_commutes(f, g, res.f0, res.g0);
    res.certificate.checks = {
        {"d.is_tree", is_tree(res.d)},
        {"f0.epimorphism", detail::safe_check(res.f0, MapProperty::epimorphism)},
        {"g0.epimorphism", detail::safe_check(res.g0, MapProperty::epimorphism)},
        {"f0.order-preserving", detail::safe_check(res.f0, MapProperty::order_preserving)},
        {"g0.order-preserving", detail::safe_check(res.g0, MapProperty::order_preserving)},
    };
    if (opt.proper_end_tips) {
        // the filtered variant is what makes confluence and end-preservation
        // carry over; the unfiltered chain set admits maximal chains whose
        // tips project to interior vertices, breaking both
        bool inputs_confluent = detail::safe_check(f, MapProperty::confluent) &&
                                detail::safe_check(g, MapProperty::confluent);
        if (inputs_confluent) {
            res.certificate.checks.emplace_back(
                "f0.confluent", detail::safe_check(res.f0, MapProperty::confluent));
            res.certificate.checks.emplace_back(
                "g0.confluent", detail::safe_check(res.g0, MapProperty::confluent));
        }
        res.certificate.checks.emplace_back(
            "f0.end-preserving", detail::safe_check(res.f0, MapProperty::end_preserving));
        res.certificate.checks.emplace_back(
            "g0.end-preserving", detail::safe_check(res.g0, MapProperty::end_preserving));
    }
    return res;
}

// ---------------------------------------------------------------------
// Monotone amalgamation.

namespace detail {

struct MonoSolution {
    std::vector<Edge> edges;
    std::vector<int> alpha; // D vertex -> B vertex (original ids)
    std::vector<int> beta;  // D vertex -> C vertex

    int size() const { return static_cast<int>(alpha.size()); }
    int find_pair(int b, int c) const {
        for (int i = 0; i < size(); ++i)
            if (alpha[i] == b && beta[i] == c)
                return i;
        return -1;
    }
};

struct MonoSolver {
    const Graph& B;
    const Graph& C;
    const std::vector<int>& fB;
    const std::vector<int>& fC;
    int pinB = -1; // roots never stripped
    int pinC = -1;

    using Reqs = std::vector<std::pair<int, int>>; // pullback pairs D must hit

    static void add_req(Reqs& rs, std::pair<int, int> p) {
        if (std::find(rs.begin(), rs.end(), p) == rs.end())
            rs.push_back(p);
    }

    std::optional<MonoSolution> solve(std::vector<bool> actB, std::vector<bool> actC,
                                      Reqs reqs) {
        int nb = static_cast<int>(std::count(actB.begin(), actB.end(), true));
        int nc = static_cast<int>(std::count(actC.begin(), actC.end(), true));
        if (nb == 1 && nc == 1) {
            int b0 = static_cast<int>(std::find(actB.begin(), actB.end(), true) - actB.begin());
            int c0 = static_cast<int>(std::find(actC.begin(), actC.end(), true) - actC.begin());
            for (auto [x, y] : reqs)
                if (x != b0 || y != c0)
                    return std::nullopt;
            MonoSolution s;
            s.alpha = {b0};
            s.beta = {c0};
            return s;
        }
        for (int swap = 0; swap < 2; ++swap) {
            const bool cside = swap == 1;
            const Graph& X = cside ? C : B;
            const std::vector<int>& fX = cside ? fC : fB;
            const std::vector<int>& fY = cside ? fB : fC;
            std::vector<bool>& actX = cside ? actC : actB;
            std::vector<bool>& actY = cside ? actB : actC;
            int pin = cside ? pinC : pinB;
            int nx = cside ? nc : nb;
            if (nx < 2)
                continue;

            for (int b = 0; b < X.n(); ++b) {
                if (!actX[b] || b == pin)
                    continue;
                int deg = 0, a = -1;
                for (int w : X.neighbors(b))
                    if (actX[w]) {
                        ++deg;
                        a = w;
                    }
                if (deg != 1)
                    continue; // not a leaf of the induced tree

                auto sol = strip_leaf(cside, b, a, actX, actY, fX, fY, reqs);
                if (sol)
                    return sol;
            }
        }
        return std::nullopt;
    }

  private:
    // whether fX still covers fX[b] after removing b
    static bool still_covered(const std::vector<bool>& act, const std::vector<int>& fX,
                              int b) {
        for (size_t v = 0; v < act.size(); ++v)
            if (act[v] && static_cast<int>(v) != b && fX[v] == fX[b])
                return true;
        return false;
    }

    // req pair oriented as (x in X side, y in Y side)
    static std::pair<int, int> orient(bool cside, std::pair<int, int> bc) {
        return cside ? std::make_pair(bc.second, bc.first) : bc;
    }
    static std::pair<int, int> unorient(bool cside, std::pair<int, int> xy) {
        return cside ? std::make_pair(xy.second, xy.first) : xy;
    }

    std::optional<MonoSolution> strip_leaf(bool cside, int b, int a, std::vector<bool> actX,
                                           std::vector<bool> actY, const std::vector<int>& fX,
                                           const std::vector<int>& fY, const Reqs& reqs) {
        const Graph& Y = cside ? B : C;
        if (still_covered(actX, fX, b)) {
            // restriction still surjective; valid only when f(b) = f(a)
            if (fX[b] != fX[a])
                return std::nullopt;
            Reqs sub;
            int ystar = -1;
            for (auto r : reqs) {
                auto [x, y] = orient(cside, r);
                if (x == b) {
                    if (ystar >= 0 && ystar != y)
                        return std::nullopt; // one leaf can hit only one pair
                    ystar = y;
                    add_req(sub, unorient(cside, {a, y}));
                } else {
                    add_req(sub, r);
                }
            }
            actX[b] = false;
            auto subsol = cside ? solve(actY, actX, sub) : solve(actX, actY, sub);
            if (!subsol)
                return std::nullopt;
            MonoSolution s = std::move(*subsol);
            auto& fromX = cside ? s.beta : s.alpha;
            auto& fromY = cside ? s.alpha : s.beta;
            int attach = -1;
            for (int i = 0; i < s.size(); ++i)
                if (fromX[i] == a && (ystar < 0 || fromY[i] == ystar)) {
                    attach = i;
                    break;
                }
            if (attach < 0)
                return std::nullopt;
            int nv = s.size();
            fromX.push_back(b);
            fromY.push_back(fromY[attach]);
            s.edges.emplace_back(attach, nv);
            return s;
        }

        // the image loses fX[b]: it must be a leaf of the active image tree,
        // the opposite fiber F over it detaches along a unique bridge edge
        int fb = fX[b];
        std::vector<int> F;
        for (int y = 0; y < Y.n(); ++y)
            if (actY[y] && fY[y] == fb)
                F.push_back(y);
        if (F.empty())
            return std::nullopt;
        std::vector<std::pair<int, int>> bridges; // (p outside F, q in F)
        for (int q : F)
            for (int w : Y.neighbors(q))
                if (actY[w] && fY[w] != fb)
                    bridges.emplace_back(w, q);
        if (bridges.size() != 1)
            return std::nullopt;
        auto [p, q] = bridges.front();
        if (fY[p] != fX[a])
            return std::nullopt;
        if (cside ? (pinB >= 0 && fY[pinB] == fb) : (pinC >= 0 && fY[pinC] == fb))
            return std::nullopt; // never strip the pinned root's fiber

        Reqs sub;
        for (auto r : reqs) {
            auto [x, y] = orient(cside, r);
            if (fY[y] == fb) {
                if (x != b)
                    return std::nullopt;
                // hit automatically by the attached copy of F
            } else {
                add_req(sub, r);
            }
        }
        add_req(sub, unorient(cside, {a, p}));

        actX[b] = false;
        std::vector<bool> actY2 = actY;
        for (int y : F)
            actY2[y] = false;
        auto subsol = cside ? solve(actY2, actX, sub) : solve(actX, actY2, sub);
        if (!subsol)
            return std::nullopt;
        MonoSolution s = std::move(*subsol);
        auto& fromX = cside ? s.beta : s.alpha;
        auto& fromY = cside ? s.alpha : s.beta;
        int pprime = -1;
        for (int i = 0; i < s.size(); ++i)
            if (fromX[i] == a && fromY[i] == p) {
                pprime = i;
                break;
            }
        if (pprime < 0)
            return std::nullopt;
        // fresh copy of F glued across the bridge
        std::vector<int> copy_of(Y.n(), -1);
        for (int y : F) {
            copy_of[y] = s.size();
            fromX.push_back(b);
            fromY.push_back(y);
        }
        for (auto [u, v] : Y.edges())
            if (copy_of[u] >= 0 && copy_of[v] >= 0)
                s.edges.emplace_back(copy_of[u], copy_of[v]);
        s.edges.emplace_back(pprime, copy_of[q]);
        return s;
    }
};

} // namespace detail

struct MonotoneOptions {
    // rooted instances can be unsolvable; callers with their own fallback
    // skip the expensive internal search
    bool search_fallback = true;
};

// Inductive monotone amalgamation; rooted when both maps carry roots.
// Falls back to the exhaustive search when the recursion cannot certify.
inline AmalgamationResult monotone_amalgamate(const GraphMap& f, const GraphMap& g,
                                              const MonotoneOptions& opt);

inline std::optional<AmalgamationResult>
search_amalgamate(const GraphMap& f, const GraphMap& g, std::vector<MapProperty> constraints,
                  int max_verts);

inline AmalgamationResult monotone_amalgamate(const GraphMap& f, const GraphMap& g) {
    return monotone_amalgamate(f, g, MonotoneOptions{});
}

inline AmalgamationResult monotone_amalgamate(const GraphMap& f, const GraphMap& g,
                                              const MonotoneOptions& opt) {
    detail::require_common_codomain(f, g, "monotone_amalgamate");
    if (!is_tree(f.dom()) || !is_tree(g.dom()) || !is_tree(f.cod()))
        throw precondition_error("monotone_amalgamate: inputs must be trees");
    detail::require_verdict(f, MapProperty::monotone, "monotone_amalgamate");
    detail::require_verdict(g, MapProperty::monotone, "monotone_amalgamate");

    const bool rooted = f.roots() && g.roots();
    if (rooted && f.roots()->second != g.roots()->second)
        throw invalid_input("monotone_amalgamate: codomain roots differ");

    detail::MonoSolver solver{f.dom(), g.dom(), f.assign(), g.assign(),
                              rooted ? f.roots()->first : -1,
                              rooted ? g.roots()->first : -1};
    detail::MonoSolver::Reqs reqs;
    if (rooted)
        reqs.emplace_back(f.roots()->first, g.roots()->first);
    auto sol = solver.solve(std::vector<bool>(f.dom().n(), true),
                            std::vector<bool>(g.dom().n(), true), reqs);

    auto build = [&](const detail::MonoSolution& s) {
        AmalgamationResult res;
        res.d = Graph(s.size(), s.edges);
        std::optional<std::pair<int, int>> f0roots, g0roots;
        if (rooted) {
            int r = s.find_pair(f.roots()->first, g.roots()->first);
            res.root = r;
            f0roots = std::make_pair(r, f.roots()->first);
            g0roots = std::make_pair(r, g.roots()->first);
        }
        res.f0 = GraphMap(res.d, f.dom(), s.alpha, f0roots);
        res.g0 = GraphMap(res.d, g.dom(), s.beta, g0roots);
        res.certificate.commutes = detail::square_commutes(f, g, res.f0, res.g0);
        res.certificate.checks = {
            {"d.is_tree", is_tree(res.d)},
            {"f0.monotone", detail::safe_check(res.f0, MapProperty::monotone)},
            {"g0.monotone", detail::safe_check(res.g0, MapProperty::monotone)},
        };
        if (rooted) {
            res.certificate.checks.emplace_back(
                "f0.order-preserving",
                detail::safe_check(res.f0, MapProperty::order_preserving));
            res.certificate.checks.emplace_back(
                "g0.order-preserving",
                detail::safe_check(res.g0, MapProperty::order_preserving));
        }
        return res;
    };

    if (sol && (rooted ? sol->find_pair(f.roots()->first, g.roots()->first) >= 0 : true)) {
        AmalgamationResult res = build(*sol);
        if (res.certificate.ok())
            return res;
    }
    if (!opt.search_fallback)
        throw construction_failed("monotone_amalgamate: recursion failed");
    std::vector<MapProperty> cs{MapProperty::monotone};
    if (rooted)
        cs.push_back(MapProperty::order_preserving);
    int cap = std::min(f.dom().n() + g.dom().n(), kTreeEnumerationCap);
    auto found = search_amalgamate(f, g, cs, cap);
    if (!found)
        throw construction_failed("monotone_amalgamate: recursion and search both failed");
    return *found;
}

// Composite route for confluent order-preserving maps of rooted trees.
inline AmalgamationResult confluent_amalgamate(const GraphMap& f, const GraphMap& g) {
    detail::require_common_codomain(f, g, "confluent_amalgamate");
    if (!f.roots() || !g.roots())
        throw precondition_error("confluent_amalgamate requires rooted maps");
    if (f.roots()->second != g.roots()->second)
        throw invalid_input("confluent_amalgamate: codomain roots differ");
    detail::require_verdict(f, MapProperty::order_preserving, "confluent_amalgamate");
    detail::require_verdict(g, MapProperty::order_preserving, "confluent_amalgamate");
    detail::require_verdict(f, MapProperty::confluent, "confluent_amalgamate");
    detail::require_verdict(g, MapProperty::confluent, "confluent_amalgamate");

    Factorization Ff = ml_factorize(f);
    Factorization Fg = ml_factorize(g);

    // light parts pull back to a rooted tree
    OrderedPullback PL = pullback(Ff.l, Fg.l);
    if (!is_tree(PL.graph))
        throw construction_failed("confluent_amalgamate: light pullback is not a tree");

    // each monotone part against the opposite projection
    OrderedPullback XB = pullback(Ff.m, PL.f0); // -> B and -> light pullback
    OrderedPullback XC = pullback(Fg.m, PL.g0);
    if (!is_tree(XB.graph) || !is_tree(XC.graph))
        throw construction_failed("confluent_amalgamate: mixed pullback is not a tree");

    // the final rooted monotone amalgamation can be unsolvable (see the
    // composite's counterexamples); fail fast so callers can fall back
    AmalgamationResult mono = monotone_amalgamate(XB.g0, XC.g0, MonotoneOptions{false});

    AmalgamationResult res;
    res.d = mono.d;
    res.root = mono.root;
    res.f0 = compose(mono.f0, XB.f0);
    res.g0 = compose(mono.g0, XC.f0);
    res.certificate.commutes = detail::square_commutes(f, g, res.f0, res.g0);
    res.certificate.checks = {
        {"d.is_tree", is_tree(res.d)},
        {"f0.confluent", detail::safe_check(res.f0, MapProperty::confluent)},
        {"g0.confluent", detail::safe_check(res.g0, MapProperty::confluent)},
        {"f0.order-preserving", detail::safe_check(res.f0, MapProperty::order_preserving)},
        {"g0.order-preserving", detail::safe_check(res.g0, MapProperty::order_preserving)},
    };
    if (!res.certificate.ok())
        throw construction_failed("confluent_amalgamate: certificate failed");
    return res;
}

// Unfold to uniform fans of a common branch length and wedge one aligned
// chain per pair of branches with matching tip images.
inline AmalgamationResult end_preserving_amalgamate(const GraphMap& f, const GraphMap& g) {
    detail::require_common_codomain(f, g, "end_preserving_amalgamate");
    if (!f.roots() || !g.roots())
        throw precondition_error("end_preserving_amalgamate requires rooted maps");
    if (f.roots()->second != g.roots()->second)
        throw invalid_input("end_preserving_amalgamate: codomain roots differ");
    detail::require_verdict(f, MapProperty::end_preserving, "end_preserving_amalgamate");
    detail::require_verdict(g, MapProperty::end_preserving, "end_preserving_amalgamate");

    RootedTree Bt(f.dom(), f.roots()->first), Ct(g.dom(), g.roots()->first);
    FanResult fanB = tree_to_uniform_fan(Bt), fanC = tree_to_uniform_fan(Ct);
    int LB = branches(fanB.fan).front().length();
    int LC = branches(fanC.fan).front().length();
    int L = std::max(LB, LC);
    FanResult sB = stretch_fan(fanB.fan, L), sC = stretch_fan(fanC.fan, L);

    GraphMap toB = compose(sB.onto, fanB.onto); // stretched fan -> B
    GraphMap toC = compose(sC.onto, fanC.onto);
    GraphMap fb2 = compose(toB, f); // stretched fan -> A
    GraphMap gc2 = compose(toC, g);

    auto brB = branches(sB.fan), brC = branches(sC.fan);

    std::vector<Edge> edges;
    std::vector<int> assignB{sB.fan.root}, assignC{sC.fan.root};
    bool aligned_ok = true;
    RootOrder oa = root_order(f.cod(), f.roots()->second);

    for (const auto& bb : brB) {
        for (const auto& cc : brC) {
            if (fb2(bb.tip()) != gc2(cc.tip()))
                continue;
            // walk both branches keeping the A-images equal
            int i = 0, j = 0, prev = 0;
            while (i < L - 1 || j < L - 1) {
                int cur = fb2(bb.verts[i]);
                if (gc2(cc.verts[j]) != cur) {
                    aligned_ok = false;
                    break;
                }
                int db = i < L - 1 ? oa.depth[fb2(bb.verts[i + 1])] : -1;
                int dc = j < L - 1 ? oa.depth[gc2(cc.verts[j + 1])] : -1;
                if (db >= 0 && db == dc) {
                    ++i;
                    ++j;
                } else if (db >= 0 && (dc < 0 || db < dc)) {
                    ++i;
                } else {
                    ++j;
                }
                int v = static_cast<int>(assignB.size());
                assignB.push_back(bb.verts[i]);
                assignC.push_back(cc.verts[j]);
                edges.emplace_back(prev, v);
                prev = v;
            }
            if (!aligned_ok)
                break;
        }
        if (!aligned_ok)
            break;
    }
    if (!aligned_ok)
        throw construction_failed("end_preserving_amalgamate: branch alignment failed");

    Graph d(static_cast<int>(assignB.size()), std::move(edges));
    GraphMap F0(d, sB.fan.tree, std::move(assignB), std::make_pair(0, sB.fan.root));
    GraphMap G0(d, sC.fan.tree, std::move(assignC), std::make_pair(0, sC.fan.root));

    AmalgamationResult res;
    res.d = d;
    res.root = 0;
    res.f0 = compose(F0, toB);
    res.g0 = compose(G0, toC);
    res.certificate.commutes = detail::square_commutes(f, g, res.f0, res.g0);
    res.certificate.checks = {
        {"d.is_tree", is_tree(res.d)},
        {"f0.order-preserving", detail::safe_check(res.f0, MapProperty::order_preserving)},
        {"g0.order-preserving", detail::safe_check(res.g0, MapProperty::order_preserving)},
        {"f0.end-preserving", detail::safe_check(res.f0, MapProperty::end_preserving)},
        {"g0.end-preserving", detail::safe_check(res.g0, MapProperty::end_preserving)},
    };
    if (!res.certificate.ok())
        throw construction_failed("end_preserving_amalgamate: certificate failed");
    return res;
}

// Exhaustive oracle: all candidate trees up to max_verts, all constrained
// map pairs, first certified result in deterministic order.
inline std::optional<AmalgamationResult>
search_amalgamate(const GraphMap& f, const GraphMap& g, std::vector<MapProperty> constraints,
                  int max_verts) {
    detail::require_common_codomain(f, g, "search_amalgamate");
    if (max_verts > kTreeEnumerationCap)
        throw budget_exceeded("search_amalgamate: candidate size exceeds the tree cap");
    auto wants = [&](MapProperty p) {
        return std::find(constraints.begin(), constraints.end(), p) != constraints.end();
    };
    const bool rooted_mode = wants(MapProperty::order_preserving) ||
                             wants(MapProperty::end_preserving);
    if (rooted_mode && (!f.roots() || !g.roots()))
        throw precondition_error("search_amalgamate: order constraints need rooted maps");

    for (int n = 1; n <= max_verts; ++n) {
        for (const Graph& d : enumerate_trees(n)) {
            std::vector<int> droots;
            if (rooted_mode) {
                std::set<std::string> seen;
                for (int r = 0; r < n; ++r)
                    if (seen.insert(canonical_form_rooted(d, r)).second)
                        droots.push_back(r);
            } else {
                droots.push_back(-1);
            }
            for (int rd : droots) {
                EnumOptions eo;
                eo.guard = std::max(10, max_verts);
                std::optional<std::pair<int, int>> fr, gr;
                if (rd >= 0) {
                    fr = std::make_pair(rd, f.roots()->first);
                    gr = std::make_pair(rd, g.roots()->first);
                }
                for (const GraphMap& f0 : enumerate_epis(d, f.dom(), constraints, fr, eo)) {
                    // commuting partners are pinned pointwise by f o f0
                    EnumOptions ego = eo;
                    ego.max_results = 1;
                    ego.allowed.assign(n, {});
                    for (int v = 0; v < n; ++v)
                        for (int c = 0; c < g.dom().n(); ++c)
                            if (g(c) == f(f0(v)))
                                ego.allowed[v].push_back(c);
                    auto gs = enumerate_epis(d, g.dom(), constraints, gr, ego);
                    if (gs.empty())
                        continue;
                    const GraphMap& g0 = gs.front();
                    AmalgamationResult res;
                    res.d = d;
                    if (rd >= 0)
                        res.root = rd;
                    res.f0 = f0;
                    res.g0 = g0;
                    res.certificate.commutes = detail::square_commutes(f, g, res.f0, res.g0);
                    res.certificate.checks = {{"d.is_tree", is_tree(res.d)}};
                    for (MapProperty p : constraints)
                        for (const char* side : {"f0", "g0"})
                            res.certificate.checks.emplace_back(
                                std::string(side) + "." + property_name(p),
                                detail::safe_check(side == std::string("f0") ? res.f0 : res.g0,
                                                   p));
                    if (res.certificate.ok())
                        return res;
                }
            }
        }
    }
    return std::nullopt;
}

} // namespace fraisse

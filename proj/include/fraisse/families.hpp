#pragma once

// families.hpp: the named amalgamation families as data, their
// membership predicates, the surgery moves their limit arguments use,
// and exhaustive desk-scale verification suites.
//
//   TM   trees, monotone epimorphisms
//   TM3  TM members with every order <= 3 and no adjacent order-3 pair
//   TC   rooted trees, confluent order-preserving epimorphisms
//   TCE  TC with end-preserving epimorphisms
//   TE   rooted trees, order- and end-preserving epimorphisms
//   FE   uniform fans inside TE
//
// Each family names its amalgamation strategy; the wrapper recomputes
// the certificate and falls back to the exhaustive search before giving
// up, so family_amalgamate either returns a certified result or throws.

#include "fraisse/amalgamation.hpp"

#include <functional>
#include <sstream>

namespace fraisse {

enum class FamilyId { TM, TM3, TC, TCE, TE, FE };

struct FamilySpec {
    FamilyId id;
    std::string name;
    bool rooted;
    std::vector<MapProperty> map_constraints;
    std::string amalgamator;
    std::vector<std::string> surgery_moves;
};

inline const FamilySpec& family(FamilyId id) {
    static const std::vector<FamilySpec> registry = {
        {FamilyId::TM, "TM", false, {MapProperty::monotone}, "monotone",
         {"subdivide-edge", "attach-triod", "attach-leaf"}},
        {FamilyId::TM3, "TM3", false, {MapProperty::monotone}, "monotone",
         {"subdivide-edge"}},
        {FamilyId::TC, "TC", true,
         {MapProperty::confluent, MapProperty::order_preserving}, "confluent",
         {"subdivide-edge", "attach-leaf", "stretch-leaf"}},
        {FamilyId::TCE, "TCE", true,
         {MapProperty::confluent, MapProperty::order_preserving, MapProperty::end_preserving},
         "tree", {"subdivide-edge", "stretch-leaf"}},
        {FamilyId::TE, "TE", true,
         {MapProperty::order_preserving, MapProperty::end_preserving}, "endpreserving",
         {"subdivide-edge", "stretch-leaf", "double-tree"}},
        {FamilyId::FE, "FE", true,
         {MapProperty::order_preserving, MapProperty::end_preserving}, "endpreserving",
         {"stretch-leaf"}},
    };
    return registry[static_cast<int>(id)];
}

inline std::optional<FamilyId> family_from_name(const std::string& s) {
    for (FamilyId id : {FamilyId::TM, FamilyId::TM3, FamilyId::TC, FamilyId::TCE,
                        FamilyId::TE, FamilyId::FE})
        if (family(id).name == s)
            return id;
    return std::nullopt;
}

// Structural membership of a (possibly rooted) tree.
inline bool member(const FamilySpec& spec, const Graph& t,
                   std::optional<int> root = std::nullopt) {
    if (!is_tree(t))
        return false;
    if (spec.rooted && !root)
        return false;
    if (spec.id == FamilyId::TM3) {
        for (int v = 0; v < t.n(); ++v)
            if (t.order(v) > 3)
                return false;
        for (auto [u, v] : t.edges())
            if (t.order(u) == 3 && t.order(v) == 3)
                return false;
    }
    if (spec.id == FamilyId::FE)
        return is_uniform_fan(RootedTree(t, *root));
    return true;
}

// Map membership: both graphs in the family and every constraint passes.
inline bool map_in_family(const FamilySpec& spec, const GraphMap& f) {
    std::optional<int> rd, rc;
    if (f.roots()) {
        rd = f.roots()->first;
        rc = f.roots()->second;
    }
    if (spec.rooted && !f.roots())
        return false;
    if (!member(spec, f.dom(), rd) || !member(spec, f.cod(), rc))
        return false;
    if (!detail::safe_check(f, MapProperty::epimorphism))
        return false;
    for (MapProperty p : spec.map_constraints)
        if (!detail::safe_check(f, p))
            return false;
    return true;
}

// The family's amalgamation strategy with certificate enforcement and a
// search fallback sized |B|+|C|.
inline AmalgamationResult family_amalgamate(const FamilySpec& spec, const GraphMap& f,
                                            const GraphMap& g) {
    auto attempt = [&]() -> std::optional<AmalgamationResult> {
        try {
            if (spec.amalgamator == "monotone")
                return monotone_amalgamate(f, g);
            if (spec.amalgamator == "confluent")
                return confluent_amalgamate(f, g);
            if (spec.amalgamator == "tree") {
                if (f.cod().n() == 1) {
                    // over a point the fan wedge aligns branches in
                    // lockstep, which keeps the projections confluent and
                    // stays near |B|+|C| in size; the chain construction
                    // explodes on the full product
                    try {
                        AmalgamationResult res = end_preserving_amalgamate(f, g);
                        res.certificate.checks.emplace_back(
                            "f0.confluent",
                            detail::safe_check(res.f0, MapProperty::confluent));
                        res.certificate.checks.emplace_back(
                            "g0.confluent",
                            detail::safe_check(res.g0, MapProperty::confluent));
                        if (res.certificate.ok())
                            return res;
                    } catch (const construction_failed&) {
                    }
                }
                TreeAmalgamateOptions opt;
                opt.proper_end_tips = true;
                return tree_amalgamate(f, g, opt);
            }
            if (spec.amalgamator == "endpreserving") {
                AmalgamationResult res = end_preserving_amalgamate(f, g);
                if (spec.id == FamilyId::FE) {
                    // keep the result inside the uniform-fan family
                    RootedTree dt(res.d, *res.root);
                    auto br = branches(dt);
                    int len = 0;
                    for (const auto& b : br)
                        len = std::max(len, b.length());
                    FanResult to_fan = tree_to_uniform_fan(dt);
                    FanResult st = stretch_fan(to_fan.fan, len);
                    GraphMap down = compose(st.onto, to_fan.onto);
                    res.f0 = compose(down, res.f0);
                    res.g0 = compose(down, res.g0);
                    res.d = st.fan.tree;
                    res.root = st.fan.root;
                    res.certificate.commutes = detail::square_commutes(f, g, res.f0, res.g0);
                    for (auto& [name, v] : res.certificate.checks) {
                        if (name == "d.is_tree")
                            v = is_tree(res.d);
                        else if (name.substr(0, 2) == "f0")
                            v = detail::safe_check(res.f0,
                                                   *property_from_name(name.substr(3)));
                        else
                            v = detail::safe_check(res.g0,
                                                   *property_from_name(name.substr(3)));
                    }
                }
                return res;
            }
            throw invalid_input("unknown amalgamation strategy " + spec.amalgamator);
        } catch (const construction_failed&) {
            return std::nullopt;
        }
    };
    auto res = attempt();
    if (res && res->certificate.ok())
        return *res;
    int cap = std::min(f.dom().n() + g.dom().n(), kTreeEnumerationCap);
    auto found = search_amalgamate(f, g, spec.map_constraints, cap);
    if (!found)
        throw construction_failed("family_amalgamate(" + spec.name +
                                  "): construction and search both failed");
    return *found;
}

// ---------------------------------------------------------------------
// Surgery moves. Each returns the enlarged tree plus the collapsing
// epimorphism onto the input.

struct SurgeryResult {
    Graph enlarged;
    std::optional<int> root;
    GraphMap onto;
};

namespace detail {

inline GraphMap surgery_map(const Graph& big, const Graph& small, std::vector<int> assign,
                            std::optional<int> root) {
    std::optional<std::pair<int, int>> roots;
    if (root)
        roots = std::make_pair(*root, *root);
    return GraphMap(big, small, std::move(assign), roots);
}

} // namespace detail

// Replace <a,b> by the bridge a - a' - b' - b; a', b' collapse onto a, b.
inline SurgeryResult subdivide_edge(const Graph& t, Edge e,
                                    std::optional<int> root = std::nullopt) {
    auto [a, b] = e;
    if (!t.has_edge(a, b))
        throw invalid_input("subdivide_edge: edge not present");
    std::vector<Edge> edges;
    for (auto [u, v] : t.edges())
        if (!((u == std::min(a, b)) && (v == std::max(a, b))))
            edges.emplace_back(u, v);
    int ap = t.n(), bp = t.n() + 1;
    edges.emplace_back(a, ap);
    edges.emplace_back(ap, bp);
    edges.emplace_back(bp, b);
    Graph big(t.n() + 2, std::move(edges));
    std::vector<int> assign(big.n());
    for (int v = 0; v < t.n(); ++v)
        assign[v] = v;
    assign[ap] = a;
    assign[bp] = b;
    return SurgeryResult{big, root, detail::surgery_map(big, t, std::move(assign), root)};
}

// Subdivide every edge at once; kills every separated adjacent triple.
inline SurgeryResult full_subdivision(const Graph& t, std::optional<int> root = std::nullopt) {
    std::vector<Edge> edges;
    std::vector<int> assign(t.n() + 2 * t.edge_count());
    for (int v = 0; v < t.n(); ++v)
        assign[v] = v;
    int next = t.n();
    for (auto [u, v] : t.edges()) {
        int up = next++, vp = next++;
        edges.emplace_back(u, up);
        edges.emplace_back(up, vp);
        edges.emplace_back(vp, v);
        assign[up] = u;
        assign[vp] = v;
    }
    Graph big(t.n() + 2 * t.edge_count(), std::move(edges));
    return SurgeryResult{big, root, detail::surgery_map(big, t, std::move(assign), root)};
}

inline SurgeryResult attach_leaf(const Graph& t, int v, std::optional<int> root = std::nullopt) {
    if (!t.valid_vertex(v))
        throw invalid_input("attach_leaf: bad anchor");
    auto edges = t.edges();
    edges.emplace_back(v, t.n());
    Graph big(t.n() + 1, std::move(edges));
    std::vector<int> assign(big.n());
    for (int u = 0; u < t.n(); ++u)
        assign[u] = u;
    assign[t.n()] = v;
    return SurgeryResult{big, root, detail::surgery_map(big, t, std::move(assign), root)};
}

// New triod b - {c, d} hanging at v; the whole triod collapses to v.
inline SurgeryResult attach_triod(const Graph& t, int v, std::optional<int> root = std::nullopt) {
    if (!t.valid_vertex(v))
        throw invalid_input("attach_triod: bad anchor");
    auto edges = t.edges();
    int b = t.n(), c = t.n() + 1, d = t.n() + 2;
    edges.emplace_back(v, b);
    edges.emplace_back(b, c);
    edges.emplace_back(b, d);
    Graph big(t.n() + 3, std::move(edges));
    std::vector<int> assign(big.n());
    for (int u = 0; u < t.n(); ++u)
        assign[u] = u;
    assign[b] = assign[c] = assign[d] = v;
    return SurgeryResult{big, root, detail::surgery_map(big, t, std::move(assign), root)};
}

// One-point union of two copies at the root; the collapse identifies the
// copies.
inline SurgeryResult double_tree(const RootedTree& t) {
    int n = t.tree.n();
    std::vector<int> clone(n, -1);
    std::vector<int> assign;
    for (int v = 0; v < n; ++v)
        assign.push_back(v);
    int next = n;
    for (int v = 0; v < n; ++v)
        if (v != t.root) {
            clone[v] = next++;
            assign.push_back(v);
        }
    clone[t.root] = t.root;
    auto edges = t.tree.edges();
    for (auto [u, v] : t.tree.edges())
        edges.emplace_back(std::min(clone[u], clone[v]), std::max(clone[u], clone[v]));
    Graph big(next, std::move(edges));
    return SurgeryResult{big, t.root,
                         detail::surgery_map(big, t.tree, std::move(assign), t.root)};
}

// Subdivide the leaf edge <a,e> into a - e - r with both new tail
// vertices collapsing to e; witnesses the duplicated-end hypothesis.
inline SurgeryResult stretch_leaf(const Graph& t, Edge leaf_edge,
                                  std::optional<int> root = std::nullopt) {
    auto [a, e] = leaf_edge;
    if (!t.has_edge(a, e))
        throw invalid_input("stretch_leaf: edge not present");
    if (t.order(e) != 1)
        std::swap(a, e);
    if (t.order(e) != 1)
        throw invalid_input("stretch_leaf: not a leaf edge");
    if (root && e == *root)
        throw invalid_input("stretch_leaf: cannot stretch the root");
    auto edges = t.edges();
    edges.emplace_back(e, t.n());
    Graph big(t.n() + 1, std::move(edges));
    std::vector<int> assign(big.n());
    for (int u = 0; u < t.n(); ++u)
        assign[u] = u;
    assign[t.n()] = e;
    return SurgeryResult{big, root, detail::surgery_map(big, t, std::move(assign), root)};
}

// Replace every vertex of order >= 4 by a chain of order-3 hubs with
// order-2 spacers, then subdivide any remaining edge joining two order-3
// vertices. The collapse shrinks each cluster to its source vertex.
inline SurgeryResult split_ramification(const Graph& t) {
    if (!is_tree(t))
        throw precondition_error("split_ramification requires a tree");

    std::vector<int> repr_base(t.n(), -1); // first new id per original vertex
    std::vector<std::vector<int>> hub_for(t.n()); // per neighbor position
    int next = 0;
    for (int v = 0; v < t.n(); ++v) {
        int k = t.order(v);
        repr_base[v] = next;
        if (k <= 3) {
            next += 1;
            continue;
        }
        int hubs = k - 2;
        // hub_i at next + 2*i, spacer_i at next + 2*i + 1
        hub_for[v].resize(k);
        for (int slot = 0; slot < k; ++slot) {
            int hub;
            if (slot <= 1)
                hub = 0;
            else if (slot >= k - 2)
                hub = hubs - 1;
            else
                hub = slot - 1;
            hub_for[v][slot] = next + 2 * hub;
        }
        next += 2 * hubs - 1;
    }
    std::vector<Edge> edges;
    std::vector<int> assign(next);
    for (int v = 0; v < t.n(); ++v) {
        int k = t.order(v);
        if (k <= 3) {
            assign[repr_base[v]] = v;
        } else {
            int hubs = k - 2;
            for (int i = 0; i < 2 * hubs - 1; ++i)
                assign[repr_base[v] + i] = v;
            for (int i = 0; i + 1 < hubs; ++i) {
                edges.emplace_back(repr_base[v] + 2 * i, repr_base[v] + 2 * i + 1);
                edges.emplace_back(repr_base[v] + 2 * i + 1, repr_base[v] + 2 * i + 2);
            }
        }
    }
    auto slot_of = [&](int v, int nbr) {
        const auto& ns = t.neighbors(v);
        return static_cast<int>(std::find(ns.begin(), ns.end(), nbr) - ns.begin());
    };
    auto repr = [&](int v, int nbr) {
        if (t.order(v) <= 3)
            return repr_base[v];
        return hub_for[v][slot_of(v, nbr)];
    };
    for (auto [u, v] : t.edges())
        edges.emplace_back(std::min(repr(u, v), repr(v, u)), std::max(repr(u, v), repr(v, u)));

    Graph mid(next, edges);
    // spacer pass: no two order-3 vertices may stay adjacent
    std::vector<Edge> final_edges;
    std::vector<int> final_assign = assign;
    int fnext = next;
    for (auto [u, v] : mid.edges()) {
        if (mid.order(u) == 3 && mid.order(v) == 3) {
            final_edges.emplace_back(u, fnext);
            final_edges.emplace_back(fnext, v);
            final_assign.push_back(assign[std::min(u, v)]);
            ++fnext;
        } else {
            final_edges.emplace_back(u, v);
        }
    }
    Graph big(fnext, std::move(final_edges));
    return SurgeryResult{big, std::nullopt,
                         detail::surgery_map(big, t, std::move(final_assign), std::nullopt)};
}

// ---------------------------------------------------------------------
// Hypothesis scans and exhaustive family suites.

struct SuiteReport {
    std::string family;
    std::string suite;
    int cap = 0;
    long long instances = 0;
    long long failures = 0;
    std::vector<std::string> counterexamples = {};

    bool passed() const { return instances > 0 && failures == 0; }

    void fail(const std::string& what) {
        ++failures;
        if (counterexamples.size() < 20)
            counterexamples.push_back(what);
    }
};

namespace detail {

inline std::vector<std::pair<Graph, int>> family_members(const FamilySpec& spec, int n) {
    std::vector<std::pair<Graph, int>> out;
    if (spec.rooted) {
        for (auto& [t, r] : enumerate_rooted_trees(n))
            if (member(spec, t, r))
                out.emplace_back(t, r);
    } else {
        for (auto& t : enumerate_trees(n))
            if (member(spec, t))
                out.emplace_back(t, -1);
    }
    return out;
}

inline std::vector<GraphMap> family_epis(const FamilySpec& spec, const Graph& dom,
                                         int dom_root, const Graph& cod, int cod_root) {
    std::optional<std::pair<int, int>> roots;
    if (spec.rooted)
        roots = std::make_pair(dom_root, cod_root);
    EnumOptions eo;
    eo.guard = std::max(10, dom.n());
    return enumerate_epis(dom, cod, spec.map_constraints, roots, eo);
}

inline std::string describe_instance(const FamilySpec& spec, const GraphMap& f,
                                     const GraphMap& g) {
    std::ostringstream os;
    os << spec.name << " A=" << canonical_form(f.cod()) << " f=[";
    for (int v : f.assign())
        os << v << " ";
    os << "] g=[";
    for (int v : g.assign())
        os << v << " ";
    os << "]";
    return os.str();
}

} // namespace detail

// The projective amalgamation property at desk scale: every constraint-
// passing pair over every family codomain up to the cap amalgamates with
// a passing certificate.
inline SuiteReport suite_amalgamation(FamilyId id, int cap) {
    const FamilySpec& spec = family(id);
    SuiteReport rep{spec.name, "amalgamation", cap};
    for (int na = 1; na <= cap; ++na) {
        for (auto& [A, ra] : detail::family_members(spec, na)) {
            for (int nb = na; nb <= cap; ++nb) {
                for (auto& [B, rb] : detail::family_members(spec, nb)) {
                    auto fs = detail::family_epis(spec, B, rb, A, ra);
                    if (fs.empty())
                        continue;
                    for (int nc = na; nc <= cap; ++nc) {
                        for (auto& [C, rc] : detail::family_members(spec, nc)) {
                            auto gs = detail::family_epis(spec, C, rc, A, ra);
                            for (const GraphMap& f : fs) {
                                for (const GraphMap& g : gs) {
                                    ++rep.instances;
                                    try {
                                        AmalgamationResult res =
                                            family_amalgamate(spec, f, g);
                                        if (!res.certificate.ok())
                                            rep.fail(detail::describe_instance(spec, f, g));
                                    } catch (const error& e) {
                                        rep.fail(detail::describe_instance(spec, f, g) +
                                                 " : " + e.what());
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    return rep;
}

// Theorem-"transitive" hypothesis: subdividing the first edge of any
// adjacent triple separates it through an in-family epimorphism.
inline SuiteReport suite_transitive(FamilyId id, int cap) {
    const FamilySpec& spec = family(id);
    SuiteReport rep{spec.name, "transitive", cap};
    for (int n = 1; n <= cap; ++n) {
        for (auto& [T, r] : detail::family_members(spec, n)) {
            std::optional<int> root = spec.rooted ? std::optional<int>(r) : std::nullopt;
            for (int b = 0; b < T.n(); ++b)
                for (int a : T.neighbors(b))
                    for (int c : T.neighbors(b)) {
                        if (a == c)
                            continue;
                        ++rep.instances;
                        SurgeryResult s = subdivide_edge(T, {a, b}, root);
                        bool ok = map_in_family(spec, s.onto);
                        for (int p = 0; p < s.enlarged.n() && ok; ++p)
                            for (int q = 0; q < s.enlarged.n() && ok; ++q)
                                for (int rr = 0; rr < s.enlarged.n() && ok; ++rr) {
                                    if (s.onto(p) != a || s.onto(q) != b || s.onto(rr) != c)
                                        continue;
                                    if (s.enlarged.has_edge(p, q) &&
                                        s.enlarged.has_edge(q, rr))
                                        ok = false;
                                }
                        if (!ok) {
                            std::ostringstream os;
                            os << spec.name << " tree=" << canonical_form(T) << " triple("
                               << a << "," << b << "," << c << ")";
                            rep.fail(os.str());
                        }
                    }
        }
    }
    return rep;
}

// Theorem-"rooted-end" hypothesis: stretching any (non-root) leaf edge
// duplicates the end above every preimage of its anchor.
inline SuiteReport suite_ends(FamilyId id, int cap) {
    const FamilySpec& spec = family(id);
    SuiteReport rep{spec.name, "ends", cap};
    for (int n = 2; n <= cap; ++n) {
        for (auto& [T, r] : detail::family_members(spec, n)) {
            std::optional<int> root = spec.rooted ? std::optional<int>(r) : std::nullopt;
            for (int e = 0; e < T.n(); ++e) {
                if (T.order(e) != 1)
                    continue;
                if (root && e == *root)
                    continue;
                int a = T.neighbors(e).front();
                ++rep.instances;
                SurgeryResult s = stretch_leaf(T, {a, e}, root);
                bool ok = map_in_family(spec, s.onto);
                if (ok) {
                    int q = e, rr = T.n(); // the two vertices collapsing to e
                    std::optional<RootOrder> ord;
                    if (root)
                        ord = root_order(s.enlarged, *root);
                    for (int p = 0; p < s.enlarged.n() && ok; ++p) {
                        if (s.onto(p) != a)
                            continue;
                        if (ord)
                            ok = ord->leq(p, q) && ord->leq(q, rr) && q != rr &&
                                 s.onto(q) == e && s.onto(rr) == e;
                        else
                            ok = s.enlarged.has_edge(p, q) && s.enlarged.has_edge(q, rr) &&
                                 q != rr && s.onto(q) == e && s.onto(rr) == e;
                    }
                }
                if (!ok) {
                    std::ostringstream os;
                    os << spec.name << " tree=" << canonical_form(T) << " leaf " << e;
                    rep.fail(os.str());
                }
            }
        }
    }
    return rep;
}

inline bool hypothesis_transitive(FamilyId id, int cap) {
    return suite_transitive(id, cap).passed();
}

inline bool hypothesis_no_isolated_ends(FamilyId id, int cap) {
    return suite_ends(id, cap).passed();
}

inline SuiteReport run_family_suite(FamilyId id, const std::string& suite, int cap) {
    if (suite == "amalgamation")
        return suite_amalgamation(id, cap);
    if (suite == "transitive")
        return suite_transitive(id, cap);
    if (suite == "ends")
        return suite_ends(id, cap);
    throw invalid_input("unknown suite " + suite);
}

} // namespace fraisse

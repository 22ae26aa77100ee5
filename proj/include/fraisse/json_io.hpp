#pragma once

// json_io.hpp: JSON schemas for every value the CLI reads or writes.
//
// Graph        {"n": int, "edges": [[u,v],...], "labels": [...]?, "root": int?}
//              edge pairs with u < v, sorted lexicographically, so saved
//              fixtures diff stably; save(load(x)) is byte-identical for
//              canonically ordered input
// Map          {"dom": Graph, "cod": Graph, "assign": [int,...], "roots": [d,c]?}
// Report       {"property", "verdict", "witness"?}
// Amalgamation {"d": Graph, "f0": Map, "g0": Map, "certificate": {...}}
// Factorization{"middle", "m", "l", "classmap"}
// Sequence     {"family", "stages", "bonds", "log"}
//
// Schema violations throw schema_error carrying the path to the field.

#include "fraisse/amalgamation.hpp"
#include "fraisse/factorization.hpp"
#include "fraisse/limits.hpp"

#include <json.hpp>

namespace fraisse {

using json = nlohmann::ordered_json;

struct schema_error : error {
    explicit schema_error(const std::string& path, const std::string& what)
        : error("schema error at " + path + ": " + what) {}
};

namespace detail {

inline const json& field(const json& j, const char* key, const std::string& path) {
    if (!j.is_object())
        throw schema_error(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end())
        throw schema_error(path + "." + key, "missing");
    return *it;
}

inline int int_field(const json& j, const char* key, const std::string& path) {
    const json& f = field(j, key, path);
    if (!f.is_number_integer())
        throw schema_error(path + "." + key, "expected an integer");
    return f.get<int>();
}

} // namespace detail

inline json save_graph(const Graph& g, std::optional<int> root = std::nullopt) {
    json j;
    j["n"] = g.n();
    json edges = json::array();
    for (auto [u, v] : g.edges())
        edges.push_back(json::array({u, v}));
    j["edges"] = std::move(edges);
    if (g.labels())
        j["labels"] = *g.labels();
    if (root)
        j["root"] = *root;
    return j;
}

struct LoadedGraph {
    Graph graph;
    std::optional<int> root;
};

inline LoadedGraph load_graph(const json& j, const std::string& path = "graph") {
    int n = detail::int_field(j, "n", path);
    if (n < 1)
        throw schema_error(path + ".n", "need at least one vertex");
    const json& ejs = detail::field(j, "edges", path);
    if (!ejs.is_array())
        throw schema_error(path + ".edges", "expected an array");
    std::vector<Edge> edges;
    for (size_t i = 0; i < ejs.size(); ++i) {
        const json& e = ejs[i];
        std::string epath = path + ".edges[" + std::to_string(i) + "]";
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
            !e[1].is_number_integer())
            throw schema_error(epath, "expected a pair of integers");
        int u = e[0].get<int>(), v = e[1].get<int>();
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw schema_error(epath, "vertex outside 0..n-1");
        if (u == v)
            throw schema_error(epath, "degenerate edges are implicit");
        edges.emplace_back(u, v);
    }
    std::optional<std::vector<std::string>> labels;
    if (j.contains("labels")) {
        if (!j["labels"].is_array() || j["labels"].size() != static_cast<size_t>(n))
            throw schema_error(path + ".labels", "expected n strings");
        labels.emplace();
        for (const auto& l : j["labels"])
            labels->push_back(l.get<std::string>());
    }
    LoadedGraph out{Graph(n, std::move(edges), std::move(labels)), std::nullopt};
    if (j.contains("root")) {
        int r = detail::int_field(j, "root", path);
        if (r < 0 || r >= n)
            throw schema_error(path + ".root", "vertex outside 0..n-1");
        out.root = r;
    }
    return out;
}

inline json save_map(const GraphMap& f) {
    json j;
    j["dom"] = save_graph(f.dom(), f.roots() ? std::optional<int>(f.roots()->first)
                                             : std::nullopt);
    j["cod"] = save_graph(f.cod(), f.roots() ? std::optional<int>(f.roots()->second)
                                             : std::nullopt);
    j["assign"] = f.assign();
    if (f.roots())
        j["roots"] = json::array({f.roots()->first, f.roots()->second});
    return j;
}

inline GraphMap load_map(const json& j, const std::string& path = "map") {
    LoadedGraph dom = load_graph(detail::field(j, "dom", path), path + ".dom");
    LoadedGraph cod = load_graph(detail::field(j, "cod", path), path + ".cod");
    const json& as = detail::field(j, "assign", path);
    if (!as.is_array() || as.size() != static_cast<size_t>(dom.graph.n()))
        throw schema_error(path + ".assign", "expected one value per domain vertex");
    std::vector<int> assign;
    for (size_t i = 0; i < as.size(); ++i) {
        if (!as[i].is_number_integer())
            throw schema_error(path + ".assign[" + std::to_string(i) + "]",
                               "expected an integer");
        int c = as[i].get<int>();
        if (c < 0 || c >= cod.graph.n())
            throw schema_error(path + ".assign[" + std::to_string(i) + "]",
                               "vertex outside the codomain");
        assign.push_back(c);
    }
    std::optional<std::pair<int, int>> roots;
    if (j.contains("roots")) {
        const json& r = j["roots"];
        if (!r.is_array() || r.size() != 2)
            throw schema_error(path + ".roots", "expected [domRoot, codRoot]");
        roots = std::make_pair(r[0].get<int>(), r[1].get<int>());
    } else if (dom.root && cod.root) {
        roots = std::make_pair(*dom.root, *cod.root);
    }
    if (roots && (!dom.graph.valid_vertex(roots->first) ||
                  !cod.graph.valid_vertex(roots->second)))
        throw schema_error(path + ".roots", "root outside its graph");
    return GraphMap(std::move(dom.graph), std::move(cod.graph), std::move(assign), roots);
}

inline json save_report(const PropertyReport& r) {
    json j;
    j["property"] = r.property;
    j["verdict"] = r.verdict;
    if (r.witness) {
        json w;
        w["kind"] = r.witness->kind;
        w["vertices"] = r.witness->vertices;
        if (r.witness->edge)
            w["edge"] = json::array({r.witness->edge->first, r.witness->edge->second});
        w["detail"] = r.witness->detail;
        j["witness"] = std::move(w);
    }
    return j;
}

inline json save_certificate(const Certificate& c) {
    json j;
    j["commutes"] = c.commutes;
    json checks;
    for (const auto& [name, v] : c.checks)
        checks[name] = v;
    j["checks"] = std::move(checks);
    j["ok"] = c.ok();
    return j;
}

inline json save_amalgamation(const AmalgamationResult& r) {
    json j;
    j["d"] = save_graph(r.d, r.root);
    j["f0"] = save_map(r.f0);
    j["g0"] = save_map(r.g0);
    j["certificate"] = save_certificate(r.certificate);
    return j;
}

inline json save_factorization(const Factorization& f) {
    json j;
    j["middle"] = save_graph(f.middle, f.m.roots() ? std::optional<int>(f.m.roots()->second)
                                                   : std::nullopt);
    j["m"] = save_map(f.m);
    j["l"] = save_map(f.l);
    j["classmap"] = f.classmap;
    return j;
}

inline json save_sequence(const InverseSequence& seq) {
    json j;
    j["family"] = family(seq.family_id).name;
    json stages = json::array();
    for (int i = 1; i <= seq.depth(); ++i)
        stages.push_back(save_graph(seq.stage(i), seq.root(i) >= 0
                                                      ? std::optional<int>(seq.root(i))
                                                      : std::nullopt));
    j["stages"] = std::move(stages);
    json bonds = json::array();
    for (const auto& b : seq.bonds)
        bonds.push_back(save_map(b));
    j["bonds"] = std::move(bonds);
    json log = json::array();
    for (const auto& e : seq.log) {
        json l;
        l["kind"] = e.kind;
        l["created_stage"] = e.created_stage;
        l["processed_stage"] = e.processed_stage;
        l["source_stage"] = e.source_stage;
        l["G"] = save_graph(e.G, e.Groot >= 0 ? std::optional<int>(e.Groot) : std::nullopt);
        l["H"] = save_graph(e.H, e.Hroot >= 0 ? std::optional<int>(e.Hroot) : std::nullopt);
        l["f"] = e.f_assign;
        l["g"] = e.g_assign;
        l["h"] = e.h_assign;
        log.push_back(std::move(l));
    }
    j["log"] = std::move(log);
    return j;
}

inline InverseSequence load_sequence(const json& j, const std::string& path = "sequence") {
    InverseSequence seq;
    const json& fam = detail::field(j, "family", path);
    auto id = family_from_name(fam.get<std::string>());
    if (!id)
        throw schema_error(path + ".family", "unknown family " + fam.get<std::string>());
    seq.family_id = *id;
    const json& stages = detail::field(j, "stages", path);
    for (size_t i = 0; i < stages.size(); ++i) {
        LoadedGraph g = load_graph(stages[i], path + ".stages[" + std::to_string(i) + "]");
        seq.stages.push_back(g.graph);
        seq.roots.push_back(g.root ? *g.root : -1);
    }
    if (seq.stages.empty())
        throw schema_error(path + ".stages", "need at least one stage");
    const json& bonds = detail::field(j, "bonds", path);
    for (size_t i = 0; i < bonds.size(); ++i)
        seq.bonds.push_back(load_map(bonds[i], path + ".bonds[" + std::to_string(i) + "]"));
    if (seq.bonds.size() + 1 != seq.stages.size())
        throw schema_error(path + ".bonds", "need one bond per consecutive stage pair");
    for (size_t i = 0; i < seq.bonds.size(); ++i)
        if (!(seq.bonds[i].dom() == seq.stages[i + 1]) ||
            !(seq.bonds[i].cod() == seq.stages[i]))
            throw schema_error(path + ".bonds[" + std::to_string(i) + "]",
                               "bond endpoints disagree with the stages");
    if (j.contains("log")) {
        for (const auto& l : j["log"]) {
            TaskLog e;
            e.kind = l.value("kind", "factor");
            e.created_stage = l.value("created_stage", 1);
            e.processed_stage = l.value("processed_stage", 1);
            e.source_stage = l.value("source_stage", 1);
            LoadedGraph G = load_graph(l.at("G"), path + ".log.G");
            LoadedGraph H = load_graph(l.at("H"), path + ".log.H");
            e.G = G.graph;
            e.Groot = G.root ? *G.root : -1;
            e.H = H.graph;
            e.Hroot = H.root ? *H.root : -1;
            e.f_assign = l.at("f").get<std::vector<int>>();
            e.g_assign = l.at("g").get<std::vector<int>>();
            e.h_assign = l.at("h").get<std::vector<int>>();
            seq.log.push_back(std::move(e));
        }
    }
    return seq;
}

inline json save_suite_report(const SuiteReport& r) {
    json j;
    j["family"] = r.family;
    j["suite"] = r.suite;
    j["cap"] = r.cap;
    j["instances"] = r.instances;
    j["failures"] = r.failures;
    j["passed"] = r.passed();
    j["counterexamples"] = r.counterexamples;
    return j;
}

inline json save_approximant_report(const ApproximantReport& r) {
    json j;
    j["stage"] = r.stage;
    j["vertices"] = r.vertices;
    j["stored_edges"] = r.stored_edges;
    j["end_count"] = r.end_count;
    j["ramification_count"] = r.ramification_count;
    json hist;
    for (auto [ord, cnt] : r.order_histogram)
        hist[std::to_string(ord)] = cnt;
    j["order_histogram"] = std::move(hist);
    j["fiber_diameter"] = r.fiber_diameter;
    j["transitivity_violations"] = r.transitivity_violations;
    j["separated_violations"] = r.separated_violations;
    j["ramification_proximity"] = r.ramification_proximity;
    return j;
}

inline std::string dumps(const json& j) { return j.dump(2) + "\n"; }

} // namespace fraisse

// fraisse: command-line surface over the library.
//
// Exit codes: 0 success, 1 the tool ran but the property/search failed
// (a report is still emitted), 2 usage or input errors.

#include "fraisse/dot.hpp"
#include "fraisse/json_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace fraisse;

namespace {

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw schema_error(path, "cannot open file");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw schema_error(path, std::string("invalid JSON: ") + e.what());
    }
    return j;
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << dumps(j);
    } else {
        std::ofstream out(out_path);
        if (!out)
            throw schema_error(out_path, "cannot open for writing");
        out << dumps(j);
    }
}

std::vector<MapProperty> parse_constraints(const std::string& csv) {
    std::vector<MapProperty> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        auto p = property_from_name(item);
        if (!p)
            throw CLI::ValidationError("unknown property " + item);
        out.push_back(*p);
    }
    return out;
}

int epi_guard_from_env() {
    if (const char* v = std::getenv("FRAISSE_EPI_GUARD"))
        return std::max(1, std::atoi(v));
    return 10;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite combinatorics of projective amalgamation over trees"};
    app.require_subcommand(1);

    std::string map_path, f_path, g_path, out_path, seq_path, graph_path;
    std::string property, strategy, family_name, suite = "amalgamation", format = "dot";
    std::string constraints_csv, seed_order = "coverage-first";
    int max_verts = 8, depth = 5, cap = 3, stage = 1, trees_n = 0, stage_budget = 800;

    auto* check = app.add_subcommand("check", "verify one map property");
    check->add_option("--map", map_path, "map JSON file")->required();
    check->add_option("--property", property, "property name")->required();
    check->add_option("--out", out_path, "write the report here");

    auto* amal = app.add_subcommand("amalgamate", "amalgamate two maps over a common codomain");
    amal->add_option("--strategy", strategy,
                     "pullback|component|tree|monotone|confluent|endpreserving|search")
        ->required();
    amal->add_option("-f,--first", f_path, "map JSON file f: B -> A")->required();
    amal->add_option("-g,--second", g_path, "map JSON file g: C -> A")->required();
    amal->add_option("--max-verts", max_verts, "search bound on |D|");
    amal->add_option("--constraints", constraints_csv, "search constraints (csv)");
    amal->add_option("--out", out_path, "write the result here");

    auto* fact = app.add_subcommand("factorize", "monotone-light factorization");
    fact->add_option("--map", map_path, "map JSON file")->required();
    fact->add_option("--out", out_path, "write the factorization here");

    auto* enu = app.add_subcommand("enumerate", "enumerate trees or epimorphisms");
    enu->add_option("--trees", trees_n, "trees on exactly N vertices, one per class");
    enu->add_option("--dom", f_path, "domain graph JSON");
    enu->add_option("--cod", g_path, "codomain graph JSON");
    enu->add_option("--constraints", constraints_csv, "properties (csv)");
    enu->add_option("--out", out_path, "write the list here");

    auto* build = app.add_subcommand("build-limit", "build a fundamental sequence");
    build->add_option("--family", family_name, "TM|TM3|TC|TCE|TE|FE")->required();
    build->add_option("--depth", depth, "number of stages");
    build->add_option("--cap", cap, "coverage cap on family-tree size");
    build->add_option("--stage-budget", stage_budget, "defer tasks beyond this stage size");
    build->add_option("--seed-order", seed_order, "coverage-first|interleaved");
    build->add_option("--out", out_path, "write the sequence here");

    auto* rep = app.add_subcommand("report", "approximant statistics for one stage");
    rep->add_option("--seq", seq_path, "sequence JSON file")->required();
    rep->add_option("--stage", stage, "stage index, 1-based")->required();
    rep->add_option("--out", out_path, "write the report here");

    auto* verify = app.add_subcommand("verify", "exhaustive family suites");
    verify->add_option("--family", family_name, "TM|TM3|TC|TCE|TE|FE")->required();
    verify->add_option("--suite", suite, "amalgamation|transitive|ends");
    verify->add_option("--cap", cap, "tree-size cap");
    verify->add_option("--out", out_path, "write the report here");

    auto* exp = app.add_subcommand("export", "DOT export of a graph or stage");
    exp->add_option("--seq", seq_path, "sequence JSON file");
    exp->add_option("--stage", stage, "stage index, 1-based");
    exp->add_option("--graph", graph_path, "graph JSON file");
    exp->add_option("--format", format, "dot");
    exp->add_flag("--plain", "no styling");
    exp->add_option("--out", out_path, "write the DOT here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*check) {
            GraphMap f = load_map(read_json_file(map_path));
            auto p = property_from_name(property);
            if (!p) {
                std::cerr << "unknown property " << property << "\n";
                return 2;
            }
            PropertyReport r;
            try {
                r = check_property(f, *p);
            } catch (const precondition_error& e) {
                json j;
                j["property"] = property;
                j["verdict"] = false;
                j["error"] = e.what();
                emit(j, out_path);
                return 1;
            }
            emit(save_report(r), out_path);
            return r.verdict ? 0 : 1;
        }

        if (*amal) {
            GraphMap f = load_map(read_json_file(f_path), "f");
            GraphMap g = load_map(read_json_file(g_path), "g");
            if (strategy == "pullback") {
                OrderedPullback P = pullback(f, g);
                AmalgamationResult res;
                res.d = P.graph;
                res.root = P.root;
                res.f0 = P.f0;
                res.g0 = P.g0;
                res.certificate.commutes =
                    compose(P.f0, f).assign() == compose(P.g0, g).assign();
                res.certificate.checks = {
                    {"f0.epimorphism", detail::safe_check(P.f0, MapProperty::epimorphism)},
                    {"g0.epimorphism", detail::safe_check(P.g0, MapProperty::epimorphism)},
                };
                emit(save_amalgamation(res), out_path);
                return res.certificate.ok() ? 0 : 1;
            }
            std::optional<AmalgamationResult> res;
            if (strategy == "component")
                res = component_amalgamate(f, g);
            else if (strategy == "tree")
                res = tree_amalgamate(f, g);
            else if (strategy == "monotone")
                res = monotone_amalgamate(f, g);
            else if (strategy == "confluent")
                res = confluent_amalgamate(f, g);
            else if (strategy == "endpreserving")
                res = end_preserving_amalgamate(f, g);
            else if (strategy == "search") {
                auto cs = parse_constraints(constraints_csv);
                res = search_amalgamate(f, g, cs, max_verts);
                if (!res) {
                    json j;
                    j["found"] = false;
                    j["max_verts"] = max_verts;
                    emit(j, out_path);
                    return 1;
                }
            } else {
                std::cerr << "unknown strategy " << strategy << "\n";
                return 2;
            }
            emit(save_amalgamation(*res), out_path);
            return res->certificate.ok() ? 0 : 1;
        }

        if (*fact) {
            GraphMap f = load_map(read_json_file(map_path));
            emit(save_factorization(ml_factorize(f)), out_path);
            return 0;
        }

        if (*enu) {
            json j;
            if (trees_n > 0) {
                json list = json::array();
                for (const Graph& t : enumerate_trees(trees_n))
                    list.push_back(save_graph(t));
                j["count"] = list.size();
                j["trees"] = std::move(list);
            } else {
                if (f_path.empty() || g_path.empty()) {
                    std::cerr << "enumerate needs --trees or --dom/--cod\n";
                    return 2;
                }
                LoadedGraph dom = load_graph(read_json_file(f_path), "dom");
                LoadedGraph cod = load_graph(read_json_file(g_path), "cod");
                std::optional<std::pair<int, int>> roots;
                if (dom.root && cod.root)
                    roots = std::make_pair(*dom.root, *cod.root);
                EnumOptions eo;
                eo.guard = epi_guard_from_env();
                auto maps = enumerate_epis(dom.graph, cod.graph,
                                           parse_constraints(constraints_csv), roots, eo);
                json list = json::array();
                for (const GraphMap& m : maps)
                    list.push_back(save_map(m));
                j["count"] = list.size();
                j["maps"] = std::move(list);
            }
            emit(j, out_path);
            return 0;
        }

        if (*build) {
            auto id = family_from_name(family_name);
            if (!id) {
                std::cerr << "unknown family " << family_name << "\n";
                return 2;
            }
            BuildOptions bo;
            bo.stage_budget = stage_budget;
            bo.seed_order = seed_order;
            InverseSequence seq = build_sequence(*id, depth, cap, bo);
            emit(save_sequence(seq), out_path);
            return 0;
        }

        if (*rep) {
            InverseSequence seq = load_sequence(read_json_file(seq_path));
            emit(save_approximant_report(approximant_report(seq, stage)), out_path);
            return 0;
        }

        if (*verify) {
            auto id = family_from_name(family_name);
            if (!id) {
                std::cerr << "unknown family " << family_name << "\n";
                return 2;
            }
            SuiteReport r = run_family_suite(*id, suite, cap);
            emit(save_suite_report(r), out_path);
            return r.passed() ? 0 : 1;
        }

        if (*exp) {
            if (format != "dot") {
                std::cerr << "unknown format " << format << "\n";
                return 2;
            }
            DotOptions dopt;
            dopt.style = exp->count("--plain") == 0;
            Graph g(1, {});
            if (!graph_path.empty()) {
                LoadedGraph lg = load_graph(read_json_file(graph_path));
                g = lg.graph;
                dopt.root = lg.root;
            } else if (!seq_path.empty()) {
                InverseSequence seq = load_sequence(read_json_file(seq_path));
                g = seq.stage(stage);
                if (seq.root(stage) >= 0)
                    dopt.root = seq.root(stage);
            } else {
                std::cerr << "export needs --graph or --seq\n";
                return 2;
            }
            std::string dot = export_dot(g, dopt);
            if (out_path.empty()) {
                std::cout << dot;
            } else {
                std::ofstream out(out_path);
                out << dot;
            }
            return 0;
        }
    } catch (const schema_error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const invalid_input& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const construction_failed& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 2;
}

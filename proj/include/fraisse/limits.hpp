#pragma once

// limits.hpp: fundamental sequences by dovetailed amalgamation, finite
// approximants, and the thread metric.
//
// The builder starts from the single-vertex tree and processes one task
// per stage. Coverage tasks amalgamate the constant maps F_n -> * <- G
// for every family tree G up to the cap (realizing condition (1) at the
// cap); refinement tasks amalgamate the current stage against its full
// subdivision (realizing the hypothesis of the edge-transitivity theorem
// at finite depth); factorization tasks amalgamate a recorded pair
// (f: F_n -> G, g: H -> G) composed up to the current top stage
// (condition (2), with the H-side projection recorded as the witness h).
// Tasks whose amalgamation would exceed the stage budget are deferred to
// the back of the queue, never dropped.

#include "fraisse/families.hpp"

#include <cmath>
#include <deque>
#include <random>

namespace fraisse {

struct TaskLog {
    std::string kind; // coverage | refine | factor
    int created_stage = 1;
    int processed_stage = 1; // the stage m such that F_{m+1} was built
    int source_stage = 1;    // n of the task's f: F_n -> G
    Graph G;
    int Groot = -1;
    Graph H;
    int Hroot = -1;
    std::vector<int> f_assign; // f: F_n -> G as created
    std::vector<int> g_assign; // g: H -> G
    std::vector<int> h_assign; // recorded witness h: F_{m+1} -> H
};

struct InverseSequence {
    FamilyId family_id = FamilyId::TM;
    std::vector<Graph> stages; // stages[i] is F_{i+1}
    std::vector<int> roots;    // -1 for unrooted families
    std::vector<GraphMap> bonds; // bonds[i]: F_{i+2} -> F_{i+1}
    std::vector<TaskLog> log;

    int depth() const { return static_cast<int>(stages.size()); }

    const Graph& stage(int n) const { return stages.at(n - 1); } // 1-indexed
    int root(int n) const { return roots.at(n - 1); }

    // alpha_n^m : F_m -> F_n for m >= n, 1-indexed
    GraphMap projection(int m, int n) const {
        std::optional<int> r;
        if (root(m) >= 0)
            r = root(m);
        GraphMap acc = identity_map(stage(m), r);
        for (int k = m - 1; k >= n; --k)
            acc = compose(acc, bonds.at(k - 1));
        return acc;
    }
};

struct BuildOptions {
    int stage_budget = 800;
    long long chain_budget = 400000;
    std::string seed_order = "coverage-first"; // or "interleaved"
};

namespace detail {

struct BuildTask {
    int kind = 0; // 0 coverage, 1 refine, 2 factor
    int created = 1;
    std::string key; // canonical form tiebreak
    // coverage payload
    Graph H;
    int Hroot = -1;
    // refine/factor payload
    int n = 1;
    Graph G;
    int Groot = -1;
    std::vector<int> f_assign, g_assign;
};

inline GraphMap constant_map(const Graph& dom, std::optional<int> dom_root) {
    Graph pt(1, {});
    std::vector<int> assign(dom.n(), 0);
    std::optional<std::pair<int, int>> roots;
    if (dom_root)
        roots = std::make_pair(*dom_root, 0);
    return GraphMap(dom, pt, std::move(assign), roots);
}

} // namespace detail

inline InverseSequence build_sequence(FamilyId fam, int depth, int cap,
                                      BuildOptions opt = {}) {
    const FamilySpec& spec = family(fam);
    InverseSequence seq;
    seq.family_id = fam;
    seq.stages.push_back(Graph(1, {}));
    seq.roots.push_back(spec.rooted ? 0 : -1);
    if (depth <= 0)
        return seq;

    std::deque<detail::BuildTask> queue;
    for (int n = 2; n <= cap; ++n)
        for (auto& [H, r] : detail::family_members(spec, n)) {
            detail::BuildTask t;
            t.kind = 0;
            t.created = 1;
            t.key = spec.rooted ? canonical_form_rooted(H, r) : canonical_form(H);
            t.H = H;
            t.Hroot = r;
            queue.push_back(std::move(t));
        }

    int last_kind = -1;
    size_t consecutive_deferrals = 0;
    while (seq.depth() < depth) {
        int m = seq.depth();
        // enqueue the refinement of the newly created stage
        if (seq.stage(m).edge_count() > 0) {
            detail::BuildTask t;
            t.kind = 1;
            t.created = m;
            t.key = "refine-" + std::to_string(m);
            t.n = m;
            queue.push_back(std::move(t));
        }
        if (queue.empty())
            break;

        // deterministic pick: (created, kind, key); interleaved ordering
        // prefers a kind different from the one just processed
        size_t pick = 0;
        for (size_t i = 1; i < queue.size(); ++i) {
            auto better = [&](const detail::BuildTask& x, const detail::BuildTask& y) {
                if (opt.seed_order == "interleaved") {
                    bool xd = x.kind != last_kind, yd = y.kind != last_kind;
                    if (xd != yd)
                        return xd;
                }
                return std::tie(x.created, x.kind, x.key) <
                       std::tie(y.created, y.kind, y.key);
            };
            if (better(queue[i], queue[pick]))
                pick = i;
        }
        detail::BuildTask task = queue[pick];
        queue.erase(queue.begin() + pick);

        std::optional<int> top_root;
        if (seq.root(m) >= 0)
            top_root = seq.root(m);

        GraphMap f, g;
        TaskLog log;
        log.created_stage = task.created;
        log.processed_stage = m;
        if (task.kind == 0) {
            log.kind = "coverage";
            log.source_stage = m;
            log.G = Graph(1, {});
            log.Groot = spec.rooted ? 0 : -1;
            log.H = task.H;
            log.Hroot = task.Hroot;
            f = detail::constant_map(seq.stage(m), top_root);
            g = detail::constant_map(task.H,
                                     spec.rooted ? std::optional<int>(task.Hroot)
                                                 : std::nullopt);
        } else {
            if (task.kind == 1) {
                log.kind = "refine";
                const Graph& Fn = seq.stage(task.n);
                std::optional<int> nroot;
                if (seq.root(task.n) >= 0)
                    nroot = seq.root(task.n);
                SurgeryResult s = full_subdivision(Fn, nroot);
                task.G = Fn;
                task.Groot = nroot ? *nroot : -1;
                task.H = s.enlarged;
                task.Hroot = s.root ? *s.root : -1;
                task.f_assign = identity_map(Fn).assign();
                task.g_assign = s.onto.assign();
            } else {
                log.kind = "factor";
            }
            log.source_stage = task.n;
            log.G = task.G;
            log.Groot = task.Groot;
            log.H = task.H;
            log.Hroot = task.Hroot;
            log.f_assign = task.f_assign;
            log.g_assign = task.g_assign;
            std::optional<std::pair<int, int>> froots, groots;
            if (spec.rooted) {
                froots = std::make_pair(seq.root(task.n), task.Groot);
                groots = std::make_pair(task.Hroot, task.Groot);
            }
            GraphMap f_orig(seq.stage(task.n), task.G, task.f_assign, froots);
            f = compose(seq.projection(m, task.n), f_orig);
            g = GraphMap(task.H, task.G, task.g_assign, groots);
        }
        if (log.kind == "coverage") {
            log.f_assign = f.assign();
            log.g_assign = g.assign();
        }

        try {
            AmalgamationResult res = family_amalgamate(spec, f, g);
            if (res.d.n() > opt.stage_budget)
                throw budget_exceeded("stage budget");
            log.h_assign = res.g0.assign();
            seq.stages.push_back(res.d);
            seq.roots.push_back(res.root ? *res.root : -1);
            seq.bonds.push_back(res.f0);
            seq.log.push_back(std::move(log));
            last_kind = task.kind;
            consecutive_deferrals = 0;
        } catch (const budget_exceeded&) {
            task.created = m + 1; // deferred, not dropped
            queue.push_back(std::move(task));
            if (++consecutive_deferrals >= queue.size())
                break; // every remaining task is over budget at this stage
        }
    }
    return seq;
}

// Condition (1) at the cap: every family tree up to the cap receives an
// epimorphism (with the family constraints) from some stage.
inline bool coverage_ok(const InverseSequence& seq, int cap, std::string* missing = nullptr) {
    const FamilySpec& spec = family(seq.family_id);
    for (int n = 1; n <= cap; ++n) {
        for (auto& [G, r] : detail::family_members(spec, n)) {
            bool covered = false;
            for (int s = 1; s <= seq.depth() && !covered; ++s) {
                std::optional<std::pair<int, int>> roots;
                if (spec.rooted)
                    roots = std::make_pair(seq.root(s), r);
                EnumOptions eo;
                eo.guard = seq.stage(s).n();
                eo.max_results = 1;
                if (!enumerate_epis(seq.stage(s), G, spec.map_constraints, roots, eo)
                         .empty())
                    covered = true;
            }
            if (!covered) {
                if (missing)
                    *missing = spec.rooted ? canonical_form_rooted(G, r) : canonical_form(G);
                return false;
            }
        }
    }
    return true;
}

inline bool bonds_pass_family(const InverseSequence& seq) {
    const FamilySpec& spec = family(seq.family_id);
    for (const GraphMap& b : seq.bonds) {
        if (!detail::safe_check(b, MapProperty::epimorphism))
            return false;
        for (MapProperty p : spec.map_constraints)
            if (!detail::safe_check(b, p))
                return false;
    }
    return true;
}

// Re-runs the logged amalgamation square: g o h = f o alpha_n^{m+1}.
inline bool log_entry_commutes(const InverseSequence& seq, const TaskLog& entry) {
    const FamilySpec& spec = family(seq.family_id);
    int m1 = entry.processed_stage + 1;
    std::optional<std::pair<int, int>> froots, groots, hroots;
    if (spec.rooted) {
        froots = std::make_pair(seq.root(entry.source_stage), std::max(entry.Groot, 0));
        groots = std::make_pair(std::max(entry.Hroot, 0), std::max(entry.Groot, 0));
        hroots = std::make_pair(seq.root(m1), std::max(entry.Hroot, 0));
    }
    GraphMap f(seq.stage(entry.source_stage), entry.G, entry.f_assign, froots);
    GraphMap g(entry.H, entry.G, entry.g_assign, groots);
    GraphMap h(seq.stage(m1), entry.H, entry.h_assign, hroots);
    GraphMap lhs = compose(h, g);
    GraphMap rhs = compose(seq.projection(m1, entry.source_stage), f);
    return lhs.assign() == rhs.assign();
}

// Condition (2) sampled as side-runs: random tasks (f: F_n -> G, g: H -> G)
// are processed exactly as the builder would at the top stage, and the
// resulting h must close the square pointwise.
struct Condition2Sample {
    int n = 1;
    bool commutes = false;
};

inline std::vector<Condition2Sample> sample_condition2(const InverseSequence& seq, int cap,
                                                       int count, unsigned rng_seed = 17) {
    const FamilySpec& spec = family(seq.family_id);
    std::mt19937 rng(rng_seed);
    std::vector<Condition2Sample> out;
    int top = seq.depth();

    // candidate (n, G, f) triples from stages small enough to enumerate
    std::vector<std::tuple<int, Graph, int, std::vector<int>>> fs;
    for (int n = 1; n <= top; ++n) {
        if (seq.stage(n).n() > 12)
            continue;
        for (int k = 1; k <= cap; ++k)
            for (auto& [G, r] : detail::family_members(spec, k)) {
                std::optional<std::pair<int, int>> roots;
                if (spec.rooted)
                    roots = std::make_pair(seq.root(n), r);
                EnumOptions eo;
                eo.guard = seq.stage(n).n();
                eo.max_results = 40;
                for (auto& f : enumerate_epis(seq.stage(n), G, spec.map_constraints, roots, eo))
                    fs.emplace_back(n, G, r, f.assign());
            }
    }
    if (fs.empty())
        return out;

    for (int i = 0; i < count; ++i) {
        auto& [n, G, Gr, f_assign] = fs[rng() % fs.size()];
        // random H and g
        std::vector<std::tuple<Graph, int, std::vector<int>>> gs;
        for (int k = 1; k <= cap; ++k)
            for (auto& [H, hr] : detail::family_members(spec, k)) {
                std::optional<std::pair<int, int>> roots;
                if (spec.rooted)
                    roots = std::make_pair(hr, Gr);
                EnumOptions eo;
                eo.max_results = 40;
                for (auto& g : enumerate_epis(H, G, spec.map_constraints, roots, eo))
                    gs.emplace_back(H, hr, g.assign());
            }
        if (gs.empty())
            continue;
        auto& [H, Hr, g_assign] = gs[rng() % gs.size()];

        std::optional<std::pair<int, int>> froots, groots;
        if (spec.rooted) {
            froots = std::make_pair(seq.root(n), Gr);
            groots = std::make_pair(Hr, Gr);
        }
        GraphMap f_orig(seq.stage(n), G, f_assign, froots);
        GraphMap f_cur = compose(seq.projection(top, n), f_orig);
        GraphMap g(H, G, g_assign, groots);
        Condition2Sample s;
        s.n = n;
        try {
            AmalgamationResult res = family_amalgamate(spec, f_cur, g);
            GraphMap lhs = compose(res.g0, g);             // g o h
            GraphMap alpha = compose(res.f0, seq.projection(top, n));
            GraphMap rhs = compose(alpha, f_orig);         // f o alpha_n^{m+1}
            s.commutes = lhs.assign() == rhs.assign();
        } catch (const error&) {
            s.commutes = false;
        }
        out.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------------
// Threads and the metric on the inverse limit, truncated at a stage.

struct Thread {
    std::vector<int> verts; // verts[i] lives in stage i+1
};

inline Thread thread_of(const InverseSequence& seq, int depth, int vertex_at_depth) {
    Thread t;
    t.verts.assign(depth, -1);
    t.verts[depth - 1] = vertex_at_depth;
    for (int k = depth - 1; k >= 1; --k)
        t.verts[k - 1] = seq.bonds.at(k - 1)(t.verts[k]);
    return t;
}

// 2^-k where k is the first differing stage (1-indexed); 0 when equal.
// Exact in double precision.
inline double thread_metric(const InverseSequence& seq, const Thread& a, const Thread& b) {
    (void)seq;
    if (a.verts.size() != b.verts.size())
        throw invalid_input("thread_metric: depth mismatch");
    for (size_t i = 0; i < a.verts.size(); ++i)
        if (a.verts[i] != b.verts[i])
            return std::ldexp(1.0, -static_cast<int>(i + 1));
    return 0.0;
}

struct ApproximantReport {
    int stage = 1;
    int vertices = 0;
    int stored_edges = 0;
    int end_count = 0;
    int ramification_count = 0;
    std::map<int, int> order_histogram;
    // per earlier stage m (1-indexed): max thread-metric diameter of the
    // fibers of alpha_m^stage; a refinement diagnostic, reported only
    std::vector<double> fiber_diameter;
    long long transitivity_violations = 0;
    // violations among triples separated by the stage-m projection
    std::vector<long long> separated_violations;
    double ramification_proximity = 0.0;
};

inline long long count_transitivity_violations(const Graph& g) {
    long long count = 0;
    for (int y = 0; y < g.n(); ++y)
        for (int x : g.neighbors(y))
            for (int z : g.neighbors(y))
                if (x < z && !g.has_edge(x, z))
                    ++count;
    return count;
}

inline ApproximantReport approximant_report(const InverseSequence& seq, int stage) {
    if (stage < 1 || stage > seq.depth())
        throw invalid_input("approximant_report: stage out of range");
    const Graph& F = seq.stage(stage);
    ApproximantReport rep;
    rep.stage = stage;
    rep.vertices = F.n();
    rep.stored_edges = F.edge_count();
    for (int v = 0; v < F.n(); ++v) {
        ++rep.order_histogram[F.order(v)];
        if (F.order(v) <= 1)
            ++rep.end_count;
        if (F.order(v) >= 3)
            ++rep.ramification_count;
    }
    rep.transitivity_violations = count_transitivity_violations(F);

    std::vector<Thread> threads;
    threads.reserve(F.n());
    for (int v = 0; v < F.n(); ++v)
        threads.push_back(thread_of(seq, stage, v));
    for (int m = 1; m <= stage; ++m) {
        GraphMap proj = seq.projection(stage, m);
        double diam = 0.0;
        for (int x = 0; x < seq.stage(m).n(); ++x)
            for (int u = 0; u < F.n(); ++u)
                for (int w = u + 1; w < F.n(); ++w)
                    if (proj(u) == x && proj(w) == x)
                        diam = std::max(diam, thread_metric(seq, threads[u], threads[w]));
        rep.fiber_diameter.push_back(diam);

        long long viol = 0;
        for (int y = 0; y < F.n(); ++y)
            for (int x : F.neighbors(y))
                for (int z : F.neighbors(y))
                    if (x < z && !F.has_edge(x, z) && proj(x) != proj(y) &&
                        proj(y) != proj(z) && proj(x) != proj(z))
                        ++viol;
        rep.separated_violations.push_back(viol);
    }

    // fraction of vertices within graph distance 2 of a ramification vertex
    int close = 0;
    for (int v = 0; v < F.n(); ++v) {
        bool near = false;
        for (int u = 0; u < F.n() && !near; ++u) {
            if (F.order(u) < 3)
                continue;
            if (u == v || F.has_edge(u, v))
                near = true;
            else
                for (int w : F.neighbors(v))
                    if (F.has_edge(u, w)) {
                        near = true;
                        break;
                    }
        }
        if (near)
            ++close;
    }
    rep.ramification_proximity = F.n() ? static_cast<double>(close) / F.n() : 0.0;
    return rep;
}

} // namespace fraisse

#include "cfl/benchgen.hpp"

#include <algorithm>
#include <queue>
#include <random>

#include "cfl/errors.hpp"
#include "cfl/transform.hpp"

namespace cfl {

namespace {

// Bounded draw from the raw engine; keeps instance generation
// reproducible independent of distribution implementations.
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) {
    return bound == 0 ? 0 : rng() % bound;
}

template <typename T>
void shuffle_vec(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[draw(rng, i)]);
}

}  // namespace

int BenchGraph::out_degree(int v) const {
    int d = 0;
    for (const auto& [from, to] : edges)
        if (from == v) ++d;
    return d;
}

int BenchGraph::in_degree(int v) const {
    int d = 0;
    for (const auto& [from, to] : edges)
        if (to == v) ++d;
    return d;
}

Digraph BenchGraph::to_digraph() const {
    Digraph g;
    for (const auto& name : vertex_names) g.add_vertex(Atom::intern(name));
    for (const auto& [from, to] : edges)
        g.add_edge(Atom::intern(vertex_names[from]), Atom::intern(vertex_names[to]));
    return g;
}

BenchGraph generate_dag(int n, int k, std::uint64_t seed) {
    if (n < 2 || k < 1) throw validation_error("generate_dag requires n >= 2 and k >= 1");

    BenchGraph bg;
    bg.n = n;
    bg.k = k;
    bg.seed = seed;
    bg.vertex_names.push_back("s");
    for (int i = 1; i < n; ++i) bg.vertex_names.push_back("v" + std::to_string(i));
    for (int i = 1; i <= k; ++i) bg.vertex_names.push_back("u" + std::to_string(i));
    bg.vertex_names.push_back("g");

    std::mt19937_64 rng(seed);

    // Uniform random labeled tree via a Pruefer sequence.
    std::vector<std::pair<int, int>> tree_edges;
    if (n == 2) {
        tree_edges.emplace_back(0, 1);
    } else {
        std::vector<int> pruefer(n - 2);
        for (auto& x : pruefer) x = static_cast<int>(draw(rng, n));
        std::vector<int> degree(n, 1);
        for (int x : pruefer) ++degree[x];
        std::priority_queue<int, std::vector<int>, std::greater<int>> leaves;
        for (int v = 0; v < n; ++v)
            if (degree[v] == 1) leaves.push(v);
        for (int x : pruefer) {
            int leaf = leaves.top();
            leaves.pop();
            tree_edges.emplace_back(leaf, x);
            if (--degree[x] == 1) leaves.push(x);
        }
        int a = leaves.top();
        leaves.pop();
        int b = leaves.top();
        tree_edges.emplace_back(a, b);
    }

    // Orient away from the root s = 0.
    std::vector<std::vector<int>> undirected(n);
    for (const auto& [a, b] : tree_edges) {
        undirected[a].push_back(b);
        undirected[b].push_back(a);
    }
    std::vector<int> order{0};
    std::vector<char> seen(n, 0);
    seen[0] = 1;
    for (std::size_t i = 0; i < order.size(); ++i) {
        int u = order[i];
        for (int v : undirected[u])
            if (!seen[v]) {
                seen[v] = 1;
                bg.edges.emplace_back(u, v);
                order.push_back(v);
            }
    }

    // Dense layer: each u_i receives arcs from 2..min(5,n) distinct tree nodes.
    int hi = std::min(5, n);
    for (int i = 0; i < k; ++i) {
        int m = 2 + static_cast<int>(draw(rng, static_cast<std::uint64_t>(hi - 2 + 1)));
        std::vector<int> pool(n);
        for (int v = 0; v < n; ++v) pool[v] = v;
        shuffle_vec(pool, rng);
        std::vector<int> chosen(pool.begin(), pool.begin() + m);
        std::sort(chosen.begin(), chosen.end());
        for (int v : chosen) bg.edges.emplace_back(v, n + i);
    }
    for (int i = 0; i < k; ++i) bg.edges.emplace_back(n + i, bg.g_index());
    return bg;
}

Atom bench_r(const std::string& vertex) { return Atom::intern("r(" + vertex + ")"); }
Atom bench_trap(const std::string& vertex) { return Atom::intern("trap(" + vertex + ")"); }
Atom bench_p(const std::string& from, const std::string& to) {
    return Atom::intern("p(" + from + "," + to + ")");
}

Program emit_program(const BenchGraph& bg) {
    const int vcount = static_cast<int>(bg.vertex_names.size());
    std::vector<std::vector<int>> out(vcount);
    std::vector<int> indeg(vcount, 0);
    for (const auto& [from, to] : bg.edges) {
        out[from].push_back(to);
        ++indeg[to];
    }
    for (auto& targets : out) std::sort(targets.begin(), targets.end());

    // Topological emission order keeps the fact layout aligned with the
    // traversal frontier, which the circuit backend's decision order
    // benefits from.
    std::vector<int> topo;
    {
        std::vector<int> deg = indeg;
        std::vector<int> queue{};
        for (int v = 0; v < vcount; ++v)
            if (deg[v] == 0) queue.push_back(v);
        for (std::size_t i = 0; i < queue.size(); ++i) {
            int u = queue[i];
            topo.push_back(u);
            for (int v : out[u])
                if (--deg[v] == 0) queue.push_back(v);
        }
        if (topo.size() != static_cast<std::size_t>(vcount))
            throw validation_error("benchmark graph is cyclic");
    }

    AtomSet used;
    for (const auto& name : bg.vertex_names) {
        used.insert(bench_r(name));
        used.insert(bench_trap(name));
    }
    for (const auto& [from, to] : bg.edges)
        used.insert(bench_p(bg.vertex_names[from], bg.vertex_names[to]));

    Program p;
    p.push_fact(bench_r(bg.vertex_names[bg.s_index()]), Prob::one());
    // Sources other than the goal depart through a trap guard that
    // nothing defines; declare it explicitly false.
    for (int v : topo)
        if (indeg[v] == 0 && !out[v].empty()) p.push_fact(bench_trap(bg.vertex_names[v]), Prob::zero());

    std::size_t ad_counter = 0;
    for (int x : topo) {
        const std::string& xn = bg.vertex_names[x];
        int d = static_cast<int>(out[x].size());
        if (d >= 1) {
            LPADClause ad;
            for (int y : out[x]) ad.heads.push_back({bench_p(xn, bg.vertex_names[y]),
                                                     Prob::from_ratio(1, d)});
            ad.body = {pos(bench_r(xn)), neg(bench_trap(xn))};
            append_desugared_ad(p, ad, ad_counter++, used);
        }
        for (int y : out[x]) {
            const std::string& yn = bg.vertex_names[y];
            LPADClause trap_clause;
            trap_clause.heads.push_back({bench_trap(yn), Prob::from_ratio(1, 10)});
            trap_clause.body = {pos(bench_p(xn, yn))};
            append_desugared_ad(p, trap_clause, ad_counter++, used);
            p.push_clause(bench_r(yn), {pos(bench_p(xn, yn))});
        }
    }
    p.validate();
    return p;
}

QuerySpec sample_query(const BenchGraph& bg, int n_ev, int n_int, std::uint64_t seed,
                       bool swip_safe) {
    if (n_ev < 0 || n_ev > 5 || n_int < 0 || n_int > 5)
        throw validation_error("evidence/intervention counts must be in [0,5]");

    QuerySpec spec;
    spec.seed = seed;
    spec.query = Formula::atom_true(bench_r(bg.vertex_names[bg.g_index()]));
    std::mt19937_64 rng(seed ^ (bg.seed * 0x9e3779b97f4a7c15ull));

    // Internal vertices: everything but s and g.
    std::vector<int> internal;
    for (int v = 1; v < bg.g_index(); ++v) internal.push_back(v);

    std::vector<int> pool = internal;
    shuffle_vec(pool, rng);
    if (static_cast<int>(pool.size()) < n_int)
        throw validation_error("not enough eligible vertices for the requested interventions");
    std::vector<int> intervened(pool.begin(), pool.begin() + n_int);
    for (int v : intervened)
        spec.interventions.emplace_back(bench_r(bg.vertex_names[v]), false);

    // Evidence pool: internal vertices disjoint from the intervened set,
    // restricted to non-descendants when the query must stay SWIP-safe.
    std::vector<char> excluded(bg.vertex_names.size(), 0);
    for (int v : intervened) excluded[v] = 1;
    if (swip_safe && !intervened.empty()) {
        std::vector<std::vector<int>> out(bg.vertex_names.size());
        for (const auto& [from, to] : bg.edges) out[from].push_back(to);
        std::vector<int> stack = intervened;
        std::vector<char> reach(bg.vertex_names.size(), 0);
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : out[u])
                if (!reach[v]) {
                    reach[v] = 1;
                    stack.push_back(v);
                }
        }
        for (std::size_t v = 0; v < reach.size(); ++v)
            if (reach[v]) excluded[v] = 1;
    }
    std::vector<int> ev_pool;
    for (int v : internal)
        if (!excluded[v]) ev_pool.push_back(v);
    shuffle_vec(ev_pool, rng);
    if (static_cast<int>(ev_pool.size()) < n_ev)
        throw validation_error("not enough eligible vertices for the requested evidence");
    for (int i = 0; i < n_ev; ++i)
        spec.evidence.emplace_back(bench_r(bg.vertex_names[ev_pool[i]]), false);
    return spec;
}

}  // namespace cfl

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfl/graph.hpp"
#include "cfl/program.hpp"

namespace cfl {

// Random reachability instance: a uniform random tree of size n rooted
// at s (edges oriented away from the root), a dense layer of k nodes
// each fed by incoming arcs from 2..min(5,n) distinct tree nodes, and a
// goal vertex fed by every layer node. Vertex count is n + k + 1.
struct BenchGraph {
    int n = 0;
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> vertex_names;   // 0..n-1 tree (0 = "s"), n..n+k-1 layer, n+k = "g"
    std::vector<std::pair<int, int>> edges;  // (from, to), acyclic by construction

    int s_index() const { return 0; }
    int g_index() const { return n + k; }
    int out_degree(int v) const;
    int in_degree(int v) const;

    Digraph to_digraph() const;  // vertices as interned atoms named by vertex_names
};

BenchGraph generate_dag(int n, int k, std::uint64_t seed);

// Ground reachability program over the graph:
//   1.0::r(s).
//   per non-goal vertex x of out-degree d: an annotated disjunction
//     1/d::p(x,y_1); ...; 1/d::p(x,y_d) :- r(x), \+ trap(x).
//   per edge (x,y): 0.1::trap(y) :- p(x,y).   (probabilistic clause)
//   per edge (x,y): r(y) :- p(x,y).
// Annotated disjunctions are desugared; vertices with no incoming edge
// get an explicit 0.0::trap(x) so every body atom is declared.
Program emit_program(const BenchGraph& bg);

// Atom helpers matching the emission schema.
Atom bench_r(const std::string& vertex);
Atom bench_trap(const std::string& vertex);
Atom bench_p(const std::string& from, const std::string& to);

struct QuerySpec {
    std::vector<std::pair<Atom, bool>> evidence;       // negative r(v) observations
    std::vector<std::pair<Atom, bool>> interventions;  // negative r(v') fixes
    Formula query;                                     // r(g)
    std::uint64_t seed = 0;
};

// Samples a counterfactual query: query r(g), up to five negative
// interventions on distinct internal vertices, up to five negative
// evidence atoms on distinct vertices disjoint from the intervened ones
// (and, when swip_safe, not reachable from any of them).
QuerySpec sample_query(const BenchGraph& bg, int n_ev, int n_int, std::uint64_t seed,
                       bool swip_safe);

}  // namespace cfl

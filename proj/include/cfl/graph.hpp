#pragma once

#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "cfl/program.hpp"

namespace cfl {

struct Intervention;  // transform.hpp

// Directed graph over atoms. Edges carry the sign of the body literal
// that induced them; sign is ignored by reachability and separation
// queries (dependence structure is sign-blind).
class Digraph {
public:
    int add_vertex(Atom a);
    void add_edge(Atom from, Atom to, bool positive = true);

    bool has_vertex(Atom a) const { return index_.count(a) != 0; }
    std::size_t vertex_count() const { return verts_.size(); }
    std::size_t edge_count() const;
    const std::vector<Atom>& vertices() const { return verts_; }

    std::vector<Atom> parents(Atom a) const;
    std::vector<Atom> children(Atom a) const;
    bool has_edge(Atom from, Atom to) const;

    // Topological order; nullopt if cyclic.
    std::optional<std::vector<Atom>> topological_order() const;
    // Some directed cycle as [a0, a1, ..., a0]; nullopt if acyclic.
    std::optional<std::vector<Atom>> find_cycle() const;

    std::string to_dot() const;

    // Isomorphism is not attempted: equality is by vertex/edge sets.
    bool same_structure(const Digraph& o) const;

private:
    friend AtomSet descendants(const Digraph&, const AtomSet&);
    friend bool d_separated(const Digraph&, Atom, Atom, const AtomSet&, const AtomSet&);
    friend class UGraph;

    std::vector<Atom> verts_;
    std::unordered_map<Atom, int, AtomHash> index_;
    std::vector<std::vector<std::pair<int, bool>>> out_;
    std::vector<std::vector<std::pair<int, bool>>> in_;
};

// Undirected simple graph over atoms (no self-loops).
class UGraph {
public:
    int add_vertex(Atom a);
    void add_edge(Atom a, Atom b);  // ignores self-loops

    bool has_vertex(Atom a) const { return index_.count(a) != 0; }
    bool has_edge(Atom a, Atom b) const;
    std::size_t vertex_count() const { return verts_.size(); }
    std::size_t edge_count() const;
    const std::vector<Atom>& vertices() const { return verts_; }
    std::vector<Atom> neighbors(Atom a) const;

    std::vector<std::vector<Atom>> connected_components() const;  // deterministic order
    std::string to_dot() const;

private:
    friend int treewidth_estimate(const UGraph&);
    friend int treewidth_exact_small(const UGraph&);

    std::vector<Atom> verts_;
    std::unordered_map<Atom, int, AtomHash> index_;
    std::vector<std::set<int>> adj_;
};

// Nodes = all program atoms; one signed edge atom(b) -> head per body
// literal. Fact atoms are sources.
Digraph dependency_graph(const Program& p);

struct AcyclicityReport {
    bool ok = true;
    std::vector<Atom> cycle;  // witness [a0,...,a0] when !ok
};

AcyclicityReport check_acyclic(const Program& p);

// All atoms reachable from the seeds, excluding the seeds themselves.
AtomSet descendants(const Digraph& g, const AtomSet& seeds);

// Classic d-separation via ancestral moralization. Vertices listed in
// `constants` are degenerate (carry no randomness) and block every path
// through them; conditioning on them is a no-op.
bool d_separated(const Digraph& g, Atom x, Atom y, const AtomSet& z,
                 const AtomSet& constants = {});

// Vertices = clause-head atoms; each clause induces a clique over its
// head and endogenous body atoms. Fact atoms are excluded.
UGraph primal_graph(const Program& p);

// Undirected skeleton plus co-parent edges.
UGraph moralize(const Digraph& g);

// Min-fill elimination upper bound, ties broken by vertex name; connected
// components are processed independently and the max is returned.
int treewidth_estimate(const UGraph& g);

// Exact treewidth by dynamic programming over vertex subsets. Guarded at
// 15 vertices per component.
int treewidth_exact_small(const UGraph& g);

// Single-world intervention graph: each intervened node splits into a
// factual half keeping the in-edges and a fixed half carrying the
// intervened value and the out-edges.
struct SwigGraph {
    enum class Half { plain, factual, fixed };
    struct NodeRef {
        Atom atom;
        Half half = Half::plain;
        bool operator==(const NodeRef& o) const { return atom == o.atom && half == o.half; }
    };
    struct SplitNode {
        Atom atom;
        bool fixed_value;
    };

    std::vector<Atom> plain_nodes;
    std::vector<SplitNode> split_nodes;
    std::vector<std::pair<NodeRef, NodeRef>> edges;

    // Digraph view: factual halves keep the atom name, fixed halves map
    // to fixed__name. fixed_vertices() lists the degenerate constants.
    Digraph to_digraph() const;
    AtomSet fixed_vertices() const;
    std::string to_dot() const;
};

SwigGraph swig(const Program& p, const Intervention& fix);

// True when the SWIP structurally identifies y as independent of x under
// the intervention: d-separation on the dependency graph of the
// simplified SWIFT output.
bool screening_independence(const Program& p, const Intervention& fix, Atom x, Atom y);

}  // namespace cfl

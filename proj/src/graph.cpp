#include "cfl/graph.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <queue>
#include <sstream>

#include "cfl/errors.hpp"
#include "cfl/naming.hpp"
#include "cfl/transform.hpp"

namespace cfl {

namespace {

bool needs_quoting(const std::string& name) {
    for (char c : name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return true;
    return name.empty() || !std::islower(static_cast<unsigned char>(name[0]));
}

std::string dot_id(const std::string& name) {
    if (!needs_quoting(name)) return name;
    std::string out = "\"";
    for (char c : name) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Digraph

int Digraph::add_vertex(Atom a) {
    auto it = index_.find(a);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(verts_.size());
    verts_.push_back(a);
    index_.emplace(a, id);
    out_.emplace_back();
    in_.emplace_back();
    return id;
}

void Digraph::add_edge(Atom from, Atom to, bool positive) {
    int u = add_vertex(from);
    int v = add_vertex(to);
    for (const auto& [t, s] : out_[u])
        if (t == v && s == positive) return;
    out_[u].emplace_back(v, positive);
    in_[v].emplace_back(u, positive);
}

std::size_t Digraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& adj : out_) n += adj.size();
    return n;
}

std::vector<Atom> Digraph::parents(Atom a) const {
    auto it = index_.find(a);
    if (it == index_.end()) throw validation_error("unknown vertex '" + a.name() + "'");
    std::vector<Atom> out;
    AtomSet seen;
    for (const auto& [u, s] : in_[it->second])
        if (seen.insert(verts_[u]).second) out.push_back(verts_[u]);
    return out;
}

std::vector<Atom> Digraph::children(Atom a) const {
    auto it = index_.find(a);
    if (it == index_.end()) throw validation_error("unknown vertex '" + a.name() + "'");
    std::vector<Atom> out;
    AtomSet seen;
    for (const auto& [v, s] : out_[it->second])
        if (seen.insert(verts_[v]).second) out.push_back(verts_[v]);
    return out;
}

bool Digraph::has_edge(Atom from, Atom to) const {
    auto it = index_.find(from);
    auto jt = index_.find(to);
    if (it == index_.end() || jt == index_.end()) return false;
    for (const auto& [v, s] : out_[it->second])
        if (v == jt->second) return true;
    return false;
}

std::optional<std::vector<Atom>> Digraph::topological_order() const {
    std::vector<int> indeg(verts_.size(), 0);
    for (std::size_t u = 0; u < verts_.size(); ++u) {
        AtomSet seen;
        for (const auto& [v, s] : out_[u])
            if (seen.insert(verts_[v]).second) ++indeg[v];
    }
    std::vector<int> queue;
    for (std::size_t v = 0; v < verts_.size(); ++v)
        if (indeg[v] == 0) queue.push_back(static_cast<int>(v));
    std::vector<Atom> order;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        int u = queue[qi];
        order.push_back(verts_[u]);
        AtomSet seen;
        for (const auto& [v, s] : out_[u])
            if (seen.insert(verts_[v]).second && --indeg[v] == 0) queue.push_back(v);
    }
    if (order.size() != verts_.size()) return std::nullopt;
    return order;
}

std::optional<std::vector<Atom>> Digraph::find_cycle() const {
    enum { unseen, active, done };
    std::vector<int> state(verts_.size(), unseen);
    std::vector<int> stack, iter(verts_.size(), 0);
    for (std::size_t root = 0; root < verts_.size(); ++root) {
        if (state[root] != unseen) continue;
        stack.push_back(static_cast<int>(root));
        state[root] = active;
        while (!stack.empty()) {
            int u = stack.back();
            if (iter[u] < static_cast<int>(out_[u].size())) {
                int v = out_[u][iter[u]++].first;
                if (state[v] == active) {
                    std::vector<Atom> cycle;
                    auto pos = std::find(stack.begin(), stack.end(), v);
                    for (auto it = pos; it != stack.end(); ++it) cycle.push_back(verts_[*it]);
                    cycle.push_back(verts_[v]);
                    return cycle;
                }
                if (state[v] == unseen) {
                    state[v] = active;
                    stack.push_back(v);
                }
            } else {
                state[u] = done;
                stack.pop_back();
            }
        }
    }
    return std::nullopt;
}

std::string Digraph::to_dot() const {
    std::ostringstream os;
    os << "digraph g {\n";
    for (Atom a : verts_) os << "  " << dot_id(a.name()) << ";\n";
    for (std::size_t u = 0; u < verts_.size(); ++u)
        for (const auto& [v, s] : out_[u]) {
            os << "  " << dot_id(verts_[u].name()) << " -> " << dot_id(verts_[v].name());
            if (!s) os << " [style=dashed]";
            os << ";\n";
        }
    os << "}\n";
    return os.str();
}

bool Digraph::same_structure(const Digraph& o) const {
    if (verts_.size() != o.verts_.size()) return false;
    for (Atom a : verts_)
        if (!o.has_vertex(a)) return false;
    auto edge_set = [](const Digraph& g) {
        std::set<std::pair<std::uint32_t, std::uint32_t>> es;
        for (std::size_t u = 0; u < g.verts_.size(); ++u)
            for (const auto& [v, s] : g.out_[u])
                es.emplace(g.verts_[u].id(), g.verts_[v].id());
        return es;
    };
    return edge_set(*this) == edge_set(o);
}

// ---------------------------------------------------------------------------
// UGraph

int UGraph::add_vertex(Atom a) {
    auto it = index_.find(a);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(verts_.size());
    verts_.push_back(a);
    index_.emplace(a, id);
    adj_.emplace_back();
    return id;
}

void UGraph::add_edge(Atom a, Atom b) {
    int u = add_vertex(a);
    int v = add_vertex(b);
    if (u == v) return;
    adj_[u].insert(v);
    adj_[v].insert(u);
}

bool UGraph::has_edge(Atom a, Atom b) const {
    auto it = index_.find(a);
    auto jt = index_.find(b);
    if (it == index_.end() || jt == index_.end()) return false;
    return adj_[it->second].count(jt->second) != 0;
}

std::size_t UGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& s : adj_) n += s.size();
    return n / 2;
}

std::vector<Atom> UGraph::neighbors(Atom a) const {
    auto it = index_.find(a);
    if (it == index_.end()) throw validation_error("unknown vertex '" + a.name() + "'");
    std::vector<Atom> out;
    for (int v : adj_[it->second]) out.push_back(verts_[v]);
    return out;
}

std::vector<std::vector<Atom>> UGraph::connected_components() const {
    std::vector<int> comp(verts_.size(), -1);
    std::vector<std::vector<Atom>> out;
    for (std::size_t root = 0; root < verts_.size(); ++root) {
        if (comp[root] != -1) continue;
        int id = static_cast<int>(out.size());
        out.emplace_back();
        std::vector<int> stack{static_cast<int>(root)};
        comp[root] = id;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            out[id].push_back(verts_[u]);
            for (int v : adj_[u])
                if (comp[v] == -1) {
                    comp[v] = id;
                    stack.push_back(v);
                }
        }
    }
    return out;
}

std::string UGraph::to_dot() const {
    std::ostringstream os;
    os << "graph g {\n";
    for (Atom a : verts_) os << "  " << dot_id(a.name()) << ";\n";
    for (std::size_t u = 0; u < verts_.size(); ++u)
        for (int v : adj_[u])
            if (static_cast<int>(u) < v)
                os << "  " << dot_id(verts_[u].name()) << " -- " << dot_id(verts_[v].name())
                   << ";\n";
    os << "}\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Program graphs

Digraph dependency_graph(const Program& p) {
    Digraph g;
    for (const auto& f : p.facts) g.add_vertex(f.atom);
    for (const auto& c : p.clauses) {
        g.add_vertex(c.head);
        for (const auto& l : c.body) g.add_edge(l.atom, c.head, l.positive);
    }
    return g;
}

AcyclicityReport check_acyclic(const Program& p) {
    AcyclicityReport r;
    auto cycle = dependency_graph(p).find_cycle();
    if (cycle) {
        r.ok = false;
        r.cycle = std::move(*cycle);
    }
    return r;
}

AtomSet descendants(const Digraph& g, const AtomSet& seeds) {
    std::vector<int> stack;
    std::vector<char> seen(g.verts_.size(), 0);
    for (Atom a : seeds) {
        auto it = g.index_.find(a);
        if (it == g.index_.end()) continue;
        stack.push_back(it->second);
    }
    AtomSet out;
    std::vector<char> visited(g.verts_.size(), 0);
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (const auto& [v, s] : g.out_[u]) {
            if (visited[v]) continue;
            visited[v] = 1;
            if (!seeds.count(g.verts_[v])) out.insert(g.verts_[v]);
            stack.push_back(v);
        }
    }
    return out;
}

bool d_separated(const Digraph& g, Atom x, Atom y, const AtomSet& z, const AtomSet& constants) {
    for (Atom a : {x, y})
        if (!g.has_vertex(a)) throw validation_error("unknown vertex '" + a.name() + "'");
    for (Atom a : z)
        if (!g.has_vertex(a)) throw validation_error("unknown vertex '" + a.name() + "'");
    if (z.count(x) || z.count(y))
        throw validation_error("query vertices may not appear in the conditioning set");

    // Constants transmit nothing: separated outright if x or y is one,
    // and removed from the graph otherwise (blocked in every role).
    if (constants.count(x) || constants.count(y)) return true;

    int xi = g.index_.at(x), yi = g.index_.at(y);

    // Ancestral vertex set of {x, y} ∪ z.
    std::vector<char> anc(g.verts_.size(), 0);
    std::vector<int> stack;
    auto seed = [&](Atom a) {
        int i = g.index_.at(a);
        if (!anc[i]) {
            anc[i] = 1;
            stack.push_back(i);
        }
    };
    seed(x);
    seed(y);
    for (Atom a : z) seed(a);
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (const auto& [v, s] : g.in_[u])
            if (!anc[v]) {
                anc[v] = 1;
                stack.push_back(v);
            }
    }

    auto blocked = [&](int v) {
        return constants.count(g.verts_[v]) != 0;
    };

    // Moralized ancestral graph, omitting constant vertices entirely.
    std::vector<std::set<int>> adj(g.verts_.size());
    auto connect = [&](int u, int v) {
        if (u == v || blocked(u) || blocked(v)) return;
        adj[u].insert(v);
        adj[v].insert(u);
    };
    for (std::size_t v = 0; v < g.verts_.size(); ++v) {
        if (!anc[v]) continue;
        std::vector<int> ps;
        for (const auto& [u, s] : g.in_[v])
            if (anc[u]) ps.push_back(u);
        std::sort(ps.begin(), ps.end());
        ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
        for (int u : ps) connect(u, static_cast<int>(v));
        for (std::size_t i = 0; i < ps.size(); ++i)
            for (std::size_t j = i + 1; j < ps.size(); ++j) connect(ps[i], ps[j]);
    }

    // Delete conditioned vertices, then test connectivity.
    std::vector<char> removed(g.verts_.size(), 0);
    for (Atom a : z) removed[g.index_.at(a)] = 1;

    std::vector<char> seen(g.verts_.size(), 0);
    stack.assign(1, xi);
    seen[xi] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        if (u == yi) return false;
        for (int v : adj[u]) {
            if (seen[v] || removed[v]) continue;
            seen[v] = 1;
            stack.push_back(v);
        }
    }
    return true;
}

UGraph primal_graph(const Program& p) {
    AtomSet heads = p.head_atoms();
    UGraph g;
    for (const auto& c : p.clauses) g.add_vertex(c.head);
    for (const auto& c : p.clauses) {
        std::vector<Atom> clique{c.head};
        for (const auto& l : c.body)
            if (heads.count(l.atom)) clique.push_back(l.atom);
        for (std::size_t i = 0; i < clique.size(); ++i)
            for (std::size_t j = i + 1; j < clique.size(); ++j)
                g.add_edge(clique[i], clique[j]);
    }
    return g;
}

UGraph moralize(const Digraph& g) {
    UGraph out;
    for (Atom a : g.vertices()) out.add_vertex(a);
    for (Atom v : g.vertices()) {
        auto ps = g.parents(v);
        for (Atom u : ps) out.add_edge(u, v);
        for (std::size_t i = 0; i < ps.size(); ++i)
            for (std::size_t j = i + 1; j < ps.size(); ++j) out.add_edge(ps[i], ps[j]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Treewidth

namespace {

// Min-fill on one component given as local adjacency sets. Vertex names
// are carried only for tie-breaking.
int min_fill_width(std::vector<std::set<int>> adj, const std::vector<Atom>& names) {
    int n = static_cast<int>(adj.size());
    std::vector<char> gone(n, 0);
    int width = 0;
    for (int step = 0; step < n; ++step) {
        int best = -1;
        long best_fill = -1;
        for (int v = 0; v < n; ++v) {
            if (gone[v]) continue;
            long fill = 0;
            std::vector<int> nb(adj[v].begin(), adj[v].end());
            for (std::size_t i = 0; i < nb.size(); ++i)
                for (std::size_t j = i + 1; j < nb.size(); ++j)
                    if (!adj[nb[i]].count(nb[j])) ++fill;
            if (best == -1 || fill < best_fill ||
                (fill == best_fill && names[v].name() < names[best].name())) {
                best = v;
                best_fill = fill;
            }
        }
        width = std::max(width, static_cast<int>(adj[best].size()));
        std::vector<int> nb(adj[best].begin(), adj[best].end());
        for (std::size_t i = 0; i < nb.size(); ++i)
            for (std::size_t j = i + 1; j < nb.size(); ++j) {
                adj[nb[i]].insert(nb[j]);
                adj[nb[j]].insert(nb[i]);
            }
        for (int u : nb) adj[u].erase(best);
        adj[best].clear();
        gone[best] = 1;
    }
    return width;
}

// Exact treewidth of one component: DP over subsets of eliminated
// vertices. f(S) = min over v in S of max(f(S-v), |reach(v, S-v)|).
int exact_width(const std::vector<std::set<int>>& adj) {
    int n = static_cast<int>(adj.size());
    if (n <= 1) return 0;
    if (n > 15) throw resource_error("treewidth_exact_small limited to 15 vertices");
    std::uint32_t full = (1u << n) - 1;
    std::vector<std::uint8_t> f(full + 1, 0);

    // reach(v, S): neighbors of v in V-S-{v} via paths through S.
    auto reach_count = [&](int v, std::uint32_t s) {
        std::uint32_t visited = s | (1u << v);
        std::vector<int> stack{v};
        int count = 0;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int w : adj[u]) {
                if (visited & (1u << w)) continue;
                visited |= 1u << w;
                if (s & (1u << w)) {
                    stack.push_back(w);  // keep walking through eliminated vertices
                } else {
                    ++count;
                }
            }
        }
        return count;
    };

    for (std::uint32_t s = 1; s <= full; ++s) {
        int best = n;
        for (int v = 0; v < n; ++v) {
            if (!(s & (1u << v))) continue;
            std::uint32_t rest = s & ~(1u << v);
            int cand = std::max<int>(f[rest], reach_count(v, rest));
            best = std::min(best, cand);
        }
        f[s] = static_cast<std::uint8_t>(best);
    }
    return f[full];
}

std::vector<std::set<int>> component_adjacency(const UGraph& g, const std::vector<Atom>& comp,
                                               std::vector<Atom>* names) {
    std::unordered_map<Atom, int, AtomHash> local;
    for (Atom a : comp) {
        local.emplace(a, static_cast<int>(local.size()));
        if (names) names->push_back(a);
    }
    std::vector<std::set<int>> adj(comp.size());
    for (Atom a : comp)
        for (Atom b : g.neighbors(a)) adj[local.at(a)].insert(local.at(b));
    return adj;
}

}  // namespace

int treewidth_estimate(const UGraph& g) {
    int width = 0;
    for (const auto& comp : g.connected_components()) {
        std::vector<Atom> names;
        auto adj = component_adjacency(g, comp, &names);
        width = std::max(width, min_fill_width(std::move(adj), names));
    }
    return width;
}

int treewidth_exact_small(const UGraph& g) {
    int width = 0;
    for (const auto& comp : g.connected_components()) {
        auto adj = component_adjacency(g, comp, nullptr);
        width = std::max(width, exact_width(adj));
    }
    return width;
}

// ---------------------------------------------------------------------------
// SWIG

Digraph SwigGraph::to_digraph() const {
    Digraph g;
    for (Atom a : plain_nodes) g.add_vertex(a);
    for (const auto& s : split_nodes) {
        g.add_vertex(s.atom);
        g.add_vertex(fixed_atom(s.atom));
    }
    auto resolve = [](const NodeRef& r) {
        return r.half == Half::fixed ? fixed_atom(r.atom) : r.atom;
    };
    for (const auto& [u, v] : edges) g.add_edge(resolve(u), resolve(v));
    return g;
}

AtomSet SwigGraph::fixed_vertices() const {
    AtomSet out;
    for (const auto& s : split_nodes) out.insert(fixed_atom(s.atom));
    return out;
}

std::string SwigGraph::to_dot() const {
    std::ostringstream os;
    os << "digraph swig {\n";
    for (Atom a : plain_nodes) os << "  " << dot_id(a.name()) << ";\n";
    for (const auto& s : split_nodes) {
        os << "  " << dot_id(s.atom.name()) << " [shape=circle];\n";
        os << "  " << dot_id(fixed_atom(s.atom).name()) << " [shape=box,label="
           << dot_id(s.atom.name() + "=" + (s.fixed_value ? "true" : "false")) << "];\n";
    }
    auto name = [](const NodeRef& r) {
        return r.half == Half::fixed ? fixed_atom(r.atom).name() : r.atom.name();
    };
    for (const auto& [u, v] : edges)
        os << "  " << dot_id(name(u)) << " -> " << dot_id(name(v)) << ";\n";
    os << "}\n";
    return os.str();
}

SwigGraph swig(const Program& p, const Intervention& fix) {
    auto report = check_acyclic(p);
    if (!report.ok) throw validation_error("program is cyclic");
    for (const auto& [a, v] : fix.assignments)
        if (!p.has_atom(a))
            throw intervention_error("unknown intervened atom '" + a.name() + "'");

    Digraph dep = dependency_graph(p);
    SwigGraph out;
    for (Atom a : dep.vertices()) {
        auto it = fix.assignments.find(a);
        if (it == fix.assignments.end())
            out.plain_nodes.push_back(a);
        else
            out.split_nodes.push_back({a, it->second});
    }
    auto ref_source = [&](Atom a) {
        SwigGraph::NodeRef r{a, SwigGraph::Half::plain};
        if (fix.assignments.count(a)) r.half = SwigGraph::Half::fixed;
        return r;
    };
    auto ref_target = [&](Atom a) {
        SwigGraph::NodeRef r{a, SwigGraph::Half::plain};
        if (fix.assignments.count(a)) r.half = SwigGraph::Half::factual;
        return r;
    };
    for (Atom u : dep.vertices())
        for (Atom v : dep.children(u)) out.edges.emplace_back(ref_source(u), ref_target(v));
    return out;
}

bool screening_independence(const Program& p, const Intervention& fix, Atom x, Atom y) {
    for (Atom a : {x, y})
        if (!p.has_atom(a)) throw validation_error("unknown atom '" + a.name() + "'");
    auto swift_out = swift(p, fix);
    AtomSet keep{x, y};
    for (const auto& f : swift_out.program.facts) keep.insert(f.atom);
    Program reduced = simplify(swift_out.program, keep);
    Digraph dep = dependency_graph(reduced);
    if (!dep.has_vertex(x) || !dep.has_vertex(y)) return true;  // vanished => no dependence
    return d_separated(dep, x, y, {});
}

}  // namespace cfl

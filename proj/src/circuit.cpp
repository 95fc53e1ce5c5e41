#include "cfl/circuit.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "cfl/compiled.hpp"
#include "cfl/errors.hpp"

namespace cfl {

namespace {

// Residual subproblem after substituting every decided atom: the open
// requirement literals plus the clause slice that can still influence
// them. Canonically sorted, so equal residuals reached along different
// branches share one cache entry (and one circuit node).
struct Residual {
    std::vector<int> reqs;  // literal codes, sorted
    struct RClause {
        int head;
        std::vector<int> lits;  // sorted
        bool operator<(const RClause& o) const {
            return head != o.head ? head < o.head : lits < o.lits;
        }
    };
    std::vector<RClause> clauses;  // sorted

    std::vector<std::uint32_t> key() const {
        std::vector<std::uint32_t> k;
        k.push_back(static_cast<std::uint32_t>(reqs.size()));
        for (int r : reqs) k.push_back(static_cast<std::uint32_t>(r));
        for (const auto& c : clauses) {
            k.push_back(0x80000000u | static_cast<std::uint32_t>(c.head));
            for (int l : c.lits) k.push_back(static_cast<std::uint32_t>(l));
        }
        return k;
    }
};

struct KeyHash {
    std::size_t operator()(const std::vector<std::uint32_t>& k) const {
        std::size_t h = 1469598103934665603ull;
        for (std::uint32_t v : k) {
            h ^= v;
            h *= 1099511628211ull;
        }
        return h;
    }
};

class Compiler {
public:
    Compiler(const Program& p, const CircuitOptions& opts) : opts_(opts) {
        cp_ = CompiledProgram::build(p);
        circuit_.nodes.push_back(Circuit::Node{Circuit::Kind::ctrue, -1, true, -1, -1, {}});
        circuit_.nodes.push_back(Circuit::Node{Circuit::Kind::cfalse, -1, true, -1, -1, {}});
        circuit_.root = 1;
        circuit_.fact_atoms.assign(cp_.atoms.begin(), cp_.atoms.begin() + cp_.fact_count);
        circuit_.fact_prob = cp_.fact_prob;
        for (int f = 0; f < cp_.fact_count; ++f) {
            const Prob& pr = *cp_.fact_prob_src[f];
            if (pr.is_one()) det_.emplace_back(f, true);
            else if (pr.is_zero()) det_.emplace_back(f, false);
        }
    }

    Circuit run(const Formula& targets) {
        Residual root;
        for (const auto& l : targets.literals) {
            auto it = cp_.index.find(l.atom);
            if (it == cp_.index.end())
                throw validation_error("unknown atom '" + l.atom.name() + "'");
            root.reqs.push_back(CompiledProgram::lit_of(it->second, l.positive));
        }
        std::sort(root.reqs.begin(), root.reqs.end());
        for (const auto& c : cp_.clauses) {
            Residual::RClause rc;
            rc.head = c.head;
            rc.lits = c.lits;
            std::sort(rc.lits.begin(), rc.lits.end());
            root.clauses.push_back(std::move(rc));
        }
        std::sort(root.clauses.begin(), root.clauses.end());

        auto normalized = normalize(std::move(root), -1, false);
        circuit_.root = normalized ? build(std::move(*normalized)) : 1;
        return std::move(circuit_);
    }

private:
    int make_node(Circuit::Node n) {
        if (circuit_.nodes.size() >= opts_.node_cap)
            throw resource_error("circuit node budget exceeded");
        if (opts_.has_deadline && (circuit_.nodes.size() & 0xff) == 0 &&
            std::chrono::steady_clock::now() > opts_.deadline)
            throw timeout_error("deadline exceeded during circuit compilation");
        circuit_.nodes.push_back(std::move(n));
        return static_cast<int>(circuit_.nodes.size()) - 1;
    }

    // Unit propagation with state local to this call: a residual plus one
    // fresh decision fully determine the successor residual. Returns
    // nullopt on a violated requirement (weight zero).
    std::optional<Residual> normalize(Residual r, int pick, bool pick_value) const {
        std::vector<char> decided(cp_.atoms.size(), 0), value(cp_.atoms.size(), 0);
        for (auto [f, v] : det_) decided[f] = 1, value[f] = v;
        if (pick >= 0) decided[pick] = 1, value[pick] = pick_value;

        bool changed = true;
        while (changed) {
            changed = false;
            std::vector<Residual::RClause> kept;
            kept.reserve(r.clauses.size());
            std::vector<char> has_def(cp_.atoms.size(), 0);
            for (auto& c : r.clauses) {
                if (decided[c.head]) {
                    changed = true;
                    continue;  // redundant once the head is known
                }
                bool clause_false = false;
                std::vector<int> rest;
                rest.reserve(c.lits.size());
                for (int l : c.lits) {
                    int a = CompiledProgram::lit_atom(l);
                    if (!decided[a]) {
                        rest.push_back(l);
                    } else if (static_cast<bool>(value[a]) != CompiledProgram::lit_positive(l)) {
                        clause_false = true;
                        break;
                    }
                }
                if (clause_false) {
                    changed = true;
                    continue;
                }
                if (rest.empty()) {
                    decided[c.head] = 1;
                    value[c.head] = 1;
                    changed = true;
                    continue;
                }
                if (rest.size() != c.lits.size()) changed = true;
                c.lits = std::move(rest);
                has_def[c.head] = 1;
                kept.push_back(std::move(c));
            }
            r.clauses = std::move(kept);

            // Open internals that lost every clause are false.
            for (const auto& c : r.clauses)
                for (int l : c.lits) {
                    int a = CompiledProgram::lit_atom(l);
                    if (!cp_.is_fact(a) && !decided[a] && !has_def[a]) {
                        decided[a] = 1;
                        value[a] = 0;
                        changed = true;
                    }
                }
            for (int l : r.reqs) {
                int a = CompiledProgram::lit_atom(l);
                if (!cp_.is_fact(a) && !decided[a] && !has_def[a]) {
                    decided[a] = 1;
                    value[a] = 0;
                    changed = true;
                }
            }

            std::vector<int> open_reqs;
            for (int l : r.reqs) {
                int a = CompiledProgram::lit_atom(l);
                if (!decided[a]) {
                    open_reqs.push_back(l);
                    continue;
                }
                if (static_cast<bool>(value[a]) != CompiledProgram::lit_positive(l))
                    return std::nullopt;
                changed = true;
            }
            r.reqs = std::move(open_reqs);
        }

        if (r.reqs.empty()) {
            r.clauses.clear();
            return r;
        }

        // Slice to the ancestor cone of the open requirements.
        std::vector<char> want(cp_.atoms.size(), 0);
        std::vector<int> stack;
        for (int l : r.reqs) {
            int a = CompiledProgram::lit_atom(l);
            if (!want[a]) want[a] = 1, stack.push_back(a);
        }
        std::vector<std::vector<const Residual::RClause*>> defs(cp_.atoms.size());
        for (const auto& c : r.clauses) defs[c.head].push_back(&c);
        while (!stack.empty()) {
            int a = stack.back();
            stack.pop_back();
            for (const auto* c : defs[a])
                for (int l : c->lits) {
                    int b = CompiledProgram::lit_atom(l);
                    if (!want[b]) want[b] = 1, stack.push_back(b);
                }
        }
        std::vector<Residual::RClause> sliced;
        sliced.reserve(r.clauses.size());
        for (auto& c : r.clauses)
            if (want[c.head]) sliced.push_back(std::move(c));
        r.clauses = std::move(sliced);
        std::sort(r.clauses.begin(), r.clauses.end());
        std::sort(r.reqs.begin(), r.reqs.end());
        return r;
    }

    // r must be normalized. Splits into connected components, compiles
    // each, and conjoins.
    int build(Residual r) {
        if (r.reqs.empty()) return 0;  // true

        std::unordered_map<int, int> comp;
        int ncomp = 0;
        {
            std::unordered_map<int, std::vector<int>> adj;
            for (const auto& c : r.clauses)
                for (int l : c.lits) {
                    int a = CompiledProgram::lit_atom(l);
                    adj[c.head].push_back(a);
                    adj[a].push_back(c.head);
                }
            auto visit = [&](int seed) {
                if (comp.count(seed)) return;
                int id = ncomp++;
                std::vector<int> stack{seed};
                comp[seed] = id;
                while (!stack.empty()) {
                    int u = stack.back();
                    stack.pop_back();
                    for (int v : adj[u])
                        if (!comp.count(v)) {
                            comp[v] = id;
                            stack.push_back(v);
                        }
                }
            };
            for (int l : r.reqs) visit(CompiledProgram::lit_atom(l));
            for (const auto& c : r.clauses) visit(c.head);
        }
        if (ncomp <= 1) return build_component(std::move(r));

        std::vector<Residual> parts(ncomp);
        for (int l : r.reqs) parts[comp.at(CompiledProgram::lit_atom(l))].reqs.push_back(l);
        for (auto& c : r.clauses) parts[comp.at(c.head)].clauses.push_back(std::move(c));
        std::vector<int> children;
        for (auto& part : parts) {
            if (part.reqs.empty()) continue;  // unconstrained component, weight 1
            int child = build_component(std::move(part));
            if (child == 1) return 1;
            if (child != 0) children.push_back(child);
        }
        if (children.empty()) return 0;
        if (children.size() == 1) return children[0];
        Circuit::Node n{Circuit::Kind::and_node, -1, true, -1, -1, {}};
        n.children = std::move(children);
        return make_node(std::move(n));
    }

    int build_component(Residual r) {
        auto key = r.key();
        auto hit = cache_.find(key);
        if (hit != cache_.end()) return hit->second;

        // Decision variable: lowest-indexed fact of the component.
        int pick = -1;
        auto consider = [&](int lit) {
            int a = CompiledProgram::lit_atom(lit);
            if (cp_.is_fact(a) && (pick == -1 || a < pick)) pick = a;
        };
        for (int l : r.reqs) consider(l);
        for (const auto& c : r.clauses)
            for (int l : c.lits) consider(l);
        if (pick == -1)
            throw resource_error("residual component without free facts");  // unreachable

        auto hi_res = normalize(r, pick, true);
        int hi = hi_res ? build(std::move(*hi_res)) : 1;
        auto lo_res = normalize(std::move(r), pick, false);
        int lo = lo_res ? build(std::move(*lo_res)) : 1;

        int id;
        if (hi == lo) {
            id = hi;  // decision is vacuous
        } else {
            Circuit::Node n{Circuit::Kind::decision, -1, true, -1, -1, {}};
            n.fact = pick;
            n.hi = hi;
            n.lo = lo;
            id = make_node(std::move(n));
        }
        cache_.emplace(std::move(key), id);
        return id;
    }

    CompiledProgram cp_;
    CircuitOptions opts_;
    Circuit circuit_;
    std::vector<std::pair<int, bool>> det_;  // deterministic facts, never branched
    std::unordered_map<std::vector<std::uint32_t>, int, KeyHash> cache_;
};

}  // namespace

int Circuit::decision_depth() const {
    std::vector<int> depth(nodes.size(), 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Node& n = nodes[i];
        switch (n.kind) {
            case Kind::ctrue:
            case Kind::cfalse:
                depth[i] = 0;
                break;
            case Kind::leaf:
                depth[i] = 1;
                break;
            case Kind::and_node: {
                int d = 0;
                for (int c : n.children) d = std::max(d, depth[c]);
                depth[i] = d;
                break;
            }
            case Kind::decision:
                depth[i] = 1 + std::max(depth[n.hi], depth[n.lo]);
                break;
        }
    }
    return nodes.empty() ? 0 : depth[root];
}

double Circuit::weighted_count() const {
    std::vector<double> w(nodes.size(), 0.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Node& n = nodes[i];
        switch (n.kind) {
            case Kind::ctrue: w[i] = 1.0; break;
            case Kind::cfalse: w[i] = 0.0; break;
            case Kind::leaf:
                w[i] = n.positive ? fact_prob[n.fact] : 1.0 - fact_prob[n.fact];
                break;
            case Kind::and_node: {
                double prod = 1.0;
                for (int c : n.children) prod *= w[c];
                w[i] = prod;
                break;
            }
            case Kind::decision:
                w[i] = fact_prob[n.fact] * w[n.hi] + (1.0 - fact_prob[n.fact]) * w[n.lo];
                break;
        }
    }
    return nodes.empty() ? 0.0 : w[root];
}

bool Circuit::check_invariants() const {
    // Fact supports per node: AND children must not overlap, decision
    // branches must not re-decide the decision variable.
    std::vector<std::set<int>> support(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Node& n = nodes[i];
        switch (n.kind) {
            case Kind::ctrue:
            case Kind::cfalse:
                break;
            case Kind::leaf:
                support[i].insert(n.fact);
                break;
            case Kind::and_node: {
                std::size_t total = 0;
                for (int c : n.children) {
                    for (int f : support[c]) support[i].insert(f);
                    total += support[c].size();
                }
                if (total != support[i].size()) return false;  // shared fact
                break;
            }
            case Kind::decision: {
                if (support[n.hi].count(n.fact) || support[n.lo].count(n.fact)) return false;
                support[i] = support[n.hi];
                for (int f : support[n.lo]) support[i].insert(f);
                support[i].insert(n.fact);
                break;
            }
        }
    }
    return true;
}

Circuit compile_circuit(const Program& p, const Formula& targets, const CircuitOptions& opts) {
    Compiler c(p, opts);
    return c.run(targets);
}

}  // namespace cfl

#include "cfl/inference.hpp"

#include <algorithm>

#include "cfl/compiled.hpp"
#include "cfl/graph.hpp"

namespace cfl {

Backend backend_from_string(const std::string& s) {
    if (s == "enum" || s == "enumerate") return Backend::enumerate;
    if (s == "circuit") return Backend::circuit;
    throw validation_error("unknown backend '" + s + "' (expected enum|circuit)");
}

std::string to_string(Backend b) { return b == Backend::enumerate ? "enum" : "circuit"; }

Formula EvidenceSet::as_formula() const {
    std::vector<Literal> lits;
    lits.reserve(assignments.size());
    for (const auto& [a, v] : assignments) lits.emplace_back(a, v);
    std::sort(lits.begin(), lits.end(),
              [](const Literal& x, const Literal& y) { return x.atom < y.atom; });
    return Formula(std::move(lits));
}

namespace {

double marginal_enum(const Program& p, const Formula& phi, const QueryOptions& opts) {
    CompiledProgram cp = CompiledProgram::build(p);
    if (static_cast<std::size_t>(cp.fact_count) > opts.enum_fact_limit)
        throw resource_error("enumeration backend refused: " +
                             std::to_string(cp.fact_count) + " facts exceed the limit of " +
                             std::to_string(opts.enum_fact_limit));
    std::vector<std::pair<int, bool>> goals;
    for (const auto& l : phi.literals) {
        auto it = cp.index.find(l.atom);
        if (it == cp.index.end())
            throw validation_error("unknown atom '" + l.atom.name() + "'");
        goals.emplace_back(it->second, l.positive);
    }
    const int f = cp.fact_count;
    std::vector<char> vals(cp.atoms.size(), 0);
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < (1ull << f); ++mask) {
        double w = 1.0;
        for (int i = 0; i < f; ++i) {
            bool bit = (mask >> i) & 1;
            vals[i] = bit;
            w *= bit ? cp.fact_prob[i] : 1.0 - cp.fact_prob[i];
        }
        if (w == 0.0) continue;
        cp.sweep(vals);
        bool sat = true;
        for (auto [idx, positive] : goals)
            if (static_cast<bool>(vals[idx]) != positive) {
                sat = false;
                break;
            }
        if (sat) total += w;
    }
    return total;
}

double marginal_circuit(const Program& p, const Formula& phi, const QueryOptions& opts) {
    Circuit c = compile_circuit(p, phi, opts.circuit);
    return c.weighted_count();
}

constexpr double kEvidenceFloor = 1e-300;  // below this, treat p1 as zero

}  // namespace

double marginal(const Program& p, const Formula& phi, const QueryOptions& opts) {
    return opts.backend == Backend::enumerate ? marginal_enum(p, phi, opts)
                                              : marginal_circuit(p, phi, opts);
}

double conditional(const Program& p, const Formula& phi, const EvidenceSet& ev,
                   const QueryOptions& opts) {
    Formula evf = ev.as_formula();
    double p1 = marginal(p, evf, opts);
    if (p1 < kEvidenceFloor) throw zero_evidence_error(p1);
    auto conj = phi.conjoin(evf);
    if (!conj) return 0.0;  // query contradicts the evidence
    double p2 = marginal(p, *conj, opts);
    return p2 / p1;
}

namespace {

void check_atoms_known(const Program& p, const Formula& phi, const EvidenceSet& ev) {
    for (const auto& l : phi.literals)
        if (!p.has_atom(l.atom))
            throw validation_error("unknown query atom '" + l.atom.name() + "'");
    for (const auto& [a, v] : ev.assignments)
        if (!p.has_atom(a))
            throw validation_error("unknown evidence atom '" + a.name() + "'");
}

}  // namespace

double evaluate_swip_query(const Program& p, const Intervention& fix, const EvidenceSet& ev,
                           const Formula& phi, const QueryOptions& opts) {
    check_atoms_known(p, phi, ev);
    if (fix.empty()) return conditional(p, phi, ev, opts);

    AtomSet fact_atoms = p.fact_atoms();
    if (!opts.literal_alg4) {
        // Evidence placement guard: the factual value of an evidence atom
        // must be readable from the transformed program.
        AtomSet fixed_set;
        for (const auto& [a, v] : fix.assignments) fixed_set.insert(a);
        Digraph dep = dependency_graph(p);
        AtomSet desc = descendants(dep, fixed_set);
        for (const auto& [e, v] : ev.assignments) {
            if (desc.count(e)) {
                Atom culprit = e;
                for (const auto& [x, xv] : fix.assignments)
                    if (descendants(dep, {x}).count(e)) {
                        culprit = x;
                        break;
                    }
                throw evidence_placement_error(
                    e, culprit,
                    "evidence atom '" + e.name() + "' descends from intervened atom '" +
                        culprit.name() + "'; use the twin evaluator for this query");
            }
            if (fixed_set.count(e) && !fact_atoms.count(e))
                throw evidence_placement_error(
                    e, e,
                    "evidence atom '" + e.name() +
                        "' is an intervened internal atom whose factual definition is removed "
                        "by the transformation; use the twin evaluator for this query");
        }
    }

    SwiftResult s = swift(p, fix);

    // Query literals on intervened atoms read the fixed copies, mirroring
    // the out-edge redirection of the node split.
    std::vector<Literal> lits;
    lits.reserve(phi.literals.size());
    for (const auto& l : phi.literals) {
        auto it = s.fixed_map.find(l.atom);
        lits.emplace_back(it == s.fixed_map.end() ? l.atom : it->second, l.positive);
    }
    Formula phi2(std::move(lits));

    Program target = std::move(s.program);
    if (opts.simplify) {
        AtomSet keep = phi2.atoms();
        for (const auto& [a, v] : ev.assignments) keep.insert(a);
        for (const auto& f : target.facts) keep.insert(f.atom);
        target = simplify(target, keep);
    }
    return conditional(target, phi2, ev, opts);
}

double evaluate_twin_query(const Program& p, const Intervention& do_, const EvidenceSet& ev,
                           const Formula& phi, const QueryOptions& opts) {
    check_atoms_known(p, phi, ev);

    double p1 = marginal(p, ev.as_formula(), opts);
    if (p1 < kEvidenceFloor) throw zero_evidence_error(p1);

    TwinResult t = construct_twin(p, do_, opts.twin_mode);
    AtomSet fact_atoms = p.fact_atoms();
    auto primed = [&](Atom a) {
        auto it = t.prime_map.find(a);
        if (it != t.prime_map.end()) return it->second;
        // Shared mode leaves non-intervened facts common to both worlds.
        return a;
    };
    std::vector<Literal> lits;
    lits.reserve(phi.literals.size());
    for (const auto& l : phi.literals) lits.emplace_back(primed(l.atom), l.positive);
    Formula phi_cf(std::move(lits));

    auto conj = phi_cf.conjoin(ev.as_formula());
    if (!conj) return 0.0;
    double p2 = marginal(t.program, *conj, opts);
    return p2 / p1;
}

}  // namespace cfl

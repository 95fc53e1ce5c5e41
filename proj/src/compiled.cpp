#include "cfl/compiled.hpp"

#include "cfl/errors.hpp"
#include "cfl/graph.hpp"

namespace cfl {

CompiledProgram CompiledProgram::build(const Program& p) {
    CompiledProgram cp;
    auto order = dependency_graph(p).topological_order();
    if (!order) throw validation_error("program is cyclic");

    for (const auto& f : p.facts) {
        cp.index.emplace(f.atom, static_cast<int>(cp.atoms.size()));
        cp.atoms.push_back(f.atom);
        cp.fact_prob.push_back(f.prob.value);
        cp.fact_prob_src.push_back(&f.prob);
    }
    cp.fact_count = static_cast<int>(cp.atoms.size());
    for (Atom a : *order) {
        if (cp.index.count(a)) continue;
        cp.index.emplace(a, static_cast<int>(cp.atoms.size()));
        cp.atoms.push_back(a);
    }
    cp.defs.resize(cp.atoms.size());
    for (const auto& c : p.clauses) {
        CClause cc;
        cc.head = cp.index.at(c.head);
        for (const auto& l : c.body) cc.lits.push_back(lit_of(cp.index.at(l.atom), l.positive));
        cp.defs[cc.head].push_back(static_cast<int>(cp.clauses.size()));
        cp.clauses.push_back(std::move(cc));
    }
    return cp;
}

void CompiledProgram::sweep(std::vector<char>& vals) const {
    for (std::size_t a = fact_count; a < atoms.size(); ++a) {
        char truth = 0;
        for (int ci : defs[a]) {
            const CClause& c = clauses[ci];
            bool ok = true;
            for (int l : c.lits)
                if (static_cast<bool>(vals[lit_atom(l)]) != lit_positive(l)) {
                    ok = false;
                    break;
                }
            if (ok) {
                truth = 1;
                break;
            }
        }
        vals[a] = truth;
    }
}

}  // namespace cfl

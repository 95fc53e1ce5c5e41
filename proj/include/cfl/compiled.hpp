#pragma once

#include <vector>

#include "cfl/program.hpp"

namespace cfl {

// Dense array form of an acyclic program: fact atoms first (program
// order), internal atoms after them in topological order, so a single
// left-to-right sweep computes the supported model.
struct CompiledProgram {
    std::vector<Atom> atoms;
    std::unordered_map<Atom, int, AtomHash> index;
    int fact_count = 0;
    std::vector<double> fact_prob;
    std::vector<const Prob*> fact_prob_src;

    struct CClause {
        int head;
        std::vector<int> lits;  // (idx << 1) | (positive ? 0 : 1)
    };
    std::vector<CClause> clauses;
    std::vector<std::vector<int>> defs;  // per atom: clause indices (empty for facts)

    static int lit_of(int idx, bool positive) { return (idx << 1) | (positive ? 0 : 1); }
    static int lit_atom(int lit) { return lit >> 1; }
    static bool lit_positive(int lit) { return (lit & 1) == 0; }

    bool is_fact(int idx) const { return idx < fact_count; }

    // Throws on cyclic programs.
    static CompiledProgram build(const Program& p);

    // vals[0..fact_count) must be preset to 0/1; fills the rest.
    void sweep(std::vector<char>& vals) const;
};

}  // namespace cfl

#pragma once

#include <cstddef>
#include <unordered_map>
#include <vector>

#include "cfl/program.hpp"

namespace cfl {

// The pairs X_i := x_i of a fix(X:=x) / do(X:=x).
struct Intervention {
    Assignment assignments;

    bool empty() const { return assignments.empty(); }
    bool contains(Atom a) const { return assignments.count(a) != 0; }
};

struct TransformStats {
    std::size_t clauses_visited = 0;
    std::size_t literals_rewritten = 0;
    std::size_t output_size = 0;  // facts + clauses of the result
};

struct SwiftResult {
    Program program;
    TransformStats stats;
    std::unordered_map<Atom, Atom, AtomHash> fixed_map;  // intervened atom -> fixed__ atom
};

// Single-world intervention transformation: drops the clauses defining
// the intervened atoms, rewrites body occurrences to fresh fixed__ atoms
// (same sign), and appends one deterministic fact per intervened atom
// (probability 1.0 for true, 0.0 for false). Facts pass through
// unchanged. Errors on empty interventions and unknown atoms.
SwiftResult swift(const Program& p, const Intervention& fix);

enum class TwinMode {
    // Exogenous facts are shared between the factual and counterfactual
    // halves; internal atoms are duplicated under __cf names; intervened
    // atoms get a deterministic __cf fact carrying the intervened value.
    shared,
    // Study mode reproducing the published construction verbatim:
    // every fact is duplicated independently, intervened facts become
    // 1.0::a / 0.0::a__cf regardless of the intervened value, and the
    // clauses defining intervened atoms are dropped from both halves.
    literal,
};

struct TwinResult {
    Program program;
    TransformStats stats;
    std::unordered_map<Atom, Atom, AtomHash> prime_map;  // atom -> counterfactual alias
};

// Twin-network transformation. The empty intervention is allowed and
// yields a pure duplication.
TwinResult construct_twin(const Program& p, const Intervention& do_,
                          TwinMode mode = TwinMode::shared);

// Iterated unit propagation plus dead-code removal. Deterministic facts
// are substituted into bodies; internal atoms whose truth becomes
// constant propagate likewise (kept atoms that fold to a constant are
// re-emitted as deterministic facts); atoms that are not kept and not
// ancestors of kept atoms are removed. The marginal distribution over
// `keep` is preserved.
Program simplify(const Program& p, const AtomSet& keep);

// ---------------------------------------------------------------------------
// LPAD (annotated disjunctions)

struct LPADHead {
    Atom atom;
    Prob prob;
};

struct LPADClause {
    std::vector<LPADHead> heads;  // distinct atoms; probabilities sum to <= 1
    std::vector<Literal> body;
};

struct LPADProgram {
    std::vector<LPADClause> clauses;

    // Checks head-probability sums and acyclicity of the union
    // dependency graph (which guarantees unique supported models for
    // every selection).
    void validate() const;
};

// Selection-semantics-preserving translation to a plain program. Each
// l-headed clause introduces auxiliary choice atoms ad<k>_u<i> with
// probability pi_i / (1 - sum_{j<i} pi_j) plus guard clauses; single-head
// clauses compile directly to `h :- body, u`.
Program lpad_to_problog(const LPADProgram& lp);

// Desugars one annotated disjunction (index k names the auxiliaries)
// into `out`; `used` lists atoms the fresh names may not collide with.
void append_desugared_ad(Program& out, const LPADClause& rc, std::size_t k,
                         const AtomSet& used);

// Facts become `a:pi <-`, clauses become `h:1 <- body`.
LPADProgram problog_to_lpad(const Program& p);

}  // namespace cfl

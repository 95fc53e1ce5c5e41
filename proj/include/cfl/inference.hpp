#pragma once

#include <string>

#include "cfl/circuit.hpp"
#include "cfl/errors.hpp"
#include "cfl/program.hpp"
#include "cfl/transform.hpp"

namespace cfl {

enum class Backend { enumerate, circuit };

Backend backend_from_string(const std::string& s);
std::string to_string(Backend b);

struct EvidenceSet {
    Assignment assignments;

    bool empty() const { return assignments.empty(); }
    Formula as_formula() const;
};

struct QueryOptions {
    Backend backend = Backend::circuit;
    bool simplify = true;       // SWIP pipeline only
    bool literal_alg4 = false;  // study mode: no evidence-placement guard
    TwinMode twin_mode = TwinMode::shared;
    CircuitOptions circuit;
    std::size_t enum_fact_limit = 24;
};

// SWIP evidence must be attached to atoms whose factual behavior
// survives the transformation; this error names the first offender.
class evidence_placement_error : public error {
public:
    evidence_placement_error(Atom evidence, Atom intervened, const std::string& msg)
        : error(errc::guard, msg), evidence_(evidence), intervened_(intervened) {}
    Atom evidence_atom() const { return evidence_; }
    Atom intervened_atom() const { return intervened_; }

private:
    Atom evidence_;
    Atom intervened_;
};

// Probability that the supported model satisfies phi. The enumeration
// backend walks all fact assignments (refused above opts.enum_fact_limit
// facts); the circuit backend compiles and counts.
double marginal(const Program& p, const Formula& phi, const QueryOptions& opts = {});

// marginal(phi and ev) / marginal(ev); throws zero_evidence_error when
// the evidence mass is zero (or underflows).
double conditional(const Program& p, const Formula& phi, const EvidenceSet& ev,
                   const QueryOptions& opts = {});

// Counterfactual probability of phi under fix(X:=x) given factual
// evidence, computed by marginal inference over the SWIFT output
// (optionally simplified). Evidence atoms must be fact atoms, intervened
// fact atoms, or non-descendants of the intervened set; otherwise an
// evidence_placement_error directs the caller to the twin evaluator.
double evaluate_swip_query(const Program& p, const Intervention& fix, const EvidenceSet& ev,
                           const Formula& phi, const QueryOptions& opts = {});

// Counterfactual probability via the twin program: p2/p1 with
// p1 = pi_P(ev) and p2 = pi_T(P)(phi' and ev). Valid for every evidence
// placement.
double evaluate_twin_query(const Program& p, const Intervention& do_, const EvidenceSet& ev,
                           const Formula& phi, const QueryOptions& opts = {});

}  // namespace cfl

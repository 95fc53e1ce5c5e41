#pragma once

#include <vector>

#include "cfl/inference.hpp"
#include "cfl/program.hpp"
#include "cfl/transform.hpp"

namespace cfl {

// Brute-force reference semantics. Exogenous worlds (or LPAD selections)
// are enumerated outright; each world is evaluated once under the
// factual program for the evidence and once under the intervened program
// for the query, and the two indicator-weighted sums are divided.
// Arithmetic is exact (rational) whenever every probability carries an
// exact form.

struct OracleOptions {
    std::size_t max_facts = 20;
    std::size_t max_lpad_clauses = 12;
};

double oracle_counterfactual(const Program& p, const Intervention& fix, const EvidenceSet& ev,
                             const Formula& phi, const OracleOptions& opts = {});

// Exact variant; requires all fact probabilities to be rational.
Rational oracle_counterfactual_exact(const Program& p, const Intervention& fix,
                                     const EvidenceSet& ev, const Formula& phi,
                                     const OracleOptions& opts = {});

double oracle_interventional(const Program& p, const Intervention& fix, const Formula& phi,
                             const OracleOptions& opts = {});

// Per-clause head choice; index into heads or bottom (no head fires).
struct Selection {
    std::vector<int> choice;  // aligned with LPADProgram::clauses; -1 = bottom
};

// Selection-semantics counterfactual (the fixed-operator treatment):
// enumerate selections, weight each by its choice probabilities, check
// the evidence on the factual supported model and the query on the
// intervened one.
double lpad_counterfactual(const LPADProgram& lp, const Intervention& fix,
                           const EvidenceSet& ev, const Formula& phi,
                           const OracleOptions& opts = {});

Rational lpad_counterfactual_exact(const LPADProgram& lp, const Intervention& fix,
                                   const EvidenceSet& ev, const Formula& phi,
                                   const OracleOptions& opts = {});

}  // namespace cfl

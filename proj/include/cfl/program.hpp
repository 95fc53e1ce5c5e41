#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cfl/atoms.hpp"
#include "cfl/prob.hpp"

namespace cfl {

using Assignment = std::unordered_map<Atom, bool, AtomHash>;
using AtomSet = std::unordered_set<Atom, AtomHash>;

struct ProbFact {
    Atom atom;
    Prob prob;
};

struct Clause {
    Atom head;
    std::vector<Literal> body;  // source order; semantics are set-based
};

// Conjunction of literals; empty conjunction is vacuously true.
struct Formula {
    std::vector<Literal> literals;

    Formula() = default;
    explicit Formula(std::vector<Literal> lits);
    static Formula atom_true(Atom a) { return Formula({pos(a)}); }

    bool empty() const { return literals.empty(); }
    AtomSet atoms() const;

    // Conjunction; nullopt when the two parts contradict on some atom.
    std::optional<Formula> conjoin(const Formula& other) const;
};

// Ground propositional program: mutually independent probabilistic facts
// plus normal clauses over disjoint head atoms.
struct Program {
    enum class ItemKind { fact, clause };
    struct Item {
        ItemKind kind;
        std::size_t index;
    };

    std::vector<ProbFact> facts;
    std::vector<Clause> clauses;
    std::vector<Item> source_order;  // stable statement order for printing

    void push_fact(Atom a, Prob p);
    void push_clause(Atom head, std::vector<Literal> body);

    std::size_t size() const { return facts.size() + clauses.size(); }
    std::size_t max_body_len() const;

    bool is_fact_atom(Atom a) const { return fact_index(a).has_value(); }
    std::optional<std::size_t> fact_index(Atom a) const;
    bool is_head_atom(Atom a) const;
    bool has_atom(Atom a) const;

    AtomSet fact_atoms() const;
    AtomSet head_atoms() const;
    std::vector<Atom> all_atoms() const;  // deterministic (first-occurrence) order

    bool all_probs_exact() const;

    // Structural checks: probability ranges, duplicate facts, fact/head
    // overlap, duplicate body atoms. Throws validation_error.
    void validate() const;

    bool operator==(const Program& o) const;
};

// Total assignment to the program's fact atoms.
struct World {
    Assignment values;
};

// Total assignment to all program atoms (the unique supported model).
struct Interpretation {
    Assignment values;

    bool satisfies(const Formula& f) const;
    bool satisfies(const Assignment& partial) const;
};

// Unique supported model for the given world: atoms are evaluated in
// topological order, an internal atom is true iff some clause body holds.
// Requires an acyclic program and a world covering exactly the fact atoms.
Interpretation evaluate_world(const Program& p, const World& w);

// Product of pi over true facts times (1-pi) over false facts.
double world_probability(const Program& p, const World& w);
// Exact variant; requires all fact probabilities to carry rationals.
Rational world_probability_exact(const Program& p, const World& w);

}  // namespace cfl

#include "cfl/program.hpp"

#include <algorithm>

#include "cfl/errors.hpp"
#include "cfl/graph.hpp"

namespace cfl {

Formula::Formula(std::vector<Literal> lits) : literals(std::move(lits)) {
    for (std::size_t i = 0; i < literals.size(); ++i)
        for (std::size_t j = i + 1; j < literals.size(); ++j)
            if (literals[i].atom == literals[j].atom)
                throw validation_error("formula mentions atom '" + literals[i].atom.name() +
                                       "' more than once");
}

AtomSet Formula::atoms() const {
    AtomSet out;
    for (const auto& l : literals) out.insert(l.atom);
    return out;
}

std::optional<Formula> Formula::conjoin(const Formula& other) const {
    Formula out;
    out.literals = literals;
    for (const auto& l : other.literals) {
        bool dup = false;
        for (const auto& mine : out.literals) {
            if (mine.atom == l.atom) {
                if (mine.positive != l.positive) return std::nullopt;
                dup = true;
                break;
            }
        }
        if (!dup) out.literals.push_back(l);
    }
    return out;
}

void Program::push_fact(Atom a, Prob p) {
    source_order.push_back({ItemKind::fact, facts.size()});
    facts.push_back({a, std::move(p)});
}

void Program::push_clause(Atom head, std::vector<Literal> body) {
    source_order.push_back({ItemKind::clause, clauses.size()});
    clauses.push_back({head, std::move(body)});
}

std::size_t Program::max_body_len() const {
    std::size_t m = 0;
    for (const auto& c : clauses) m = std::max(m, c.body.size());
    return m;
}

std::optional<std::size_t> Program::fact_index(Atom a) const {
    for (std::size_t i = 0; i < facts.size(); ++i)
        if (facts[i].atom == a) return i;
    return std::nullopt;
}

bool Program::is_head_atom(Atom a) const {
    for (const auto& c : clauses)
        if (c.head == a) return true;
    return false;
}

bool Program::has_atom(Atom a) const {
    if (is_fact_atom(a) || is_head_atom(a)) return true;
    for (const auto& c : clauses)
        for (const auto& l : c.body)
            if (l.atom == a) return true;
    return false;
}

AtomSet Program::fact_atoms() const {
    AtomSet out;
    for (const auto& f : facts) out.insert(f.atom);
    return out;
}

AtomSet Program::head_atoms() const {
    AtomSet out;
    for (const auto& c : clauses) out.insert(c.head);
    return out;
}

std::vector<Atom> Program::all_atoms() const {
    std::vector<Atom> out;
    AtomSet seen;
    auto add = [&](Atom a) {
        if (seen.insert(a).second) out.push_back(a);
    };
    for (const auto& f : facts) add(f.atom);
    for (const auto& c : clauses) {
        add(c.head);
        for (const auto& l : c.body) add(l.atom);
    }
    return out;
}

bool Program::all_probs_exact() const {
    return std::all_of(facts.begin(), facts.end(),
                       [](const ProbFact& f) { return f.prob.exact.has_value(); });
}

void Program::validate() const {
    AtomSet fact_set;
    for (const auto& f : facts) {
        if (f.prob.value < 0.0 || f.prob.value > 1.0)
            throw validation_error("probability of fact '" + f.atom.name() +
                                   "' is outside [0,1]");
        if (!fact_set.insert(f.atom).second)
            throw validation_error("duplicate probabilistic fact for atom '" + f.atom.name() +
                                   "'");
    }
    for (const auto& c : clauses) {
        if (fact_set.count(c.head))
            throw validation_error("atom '" + c.head.name() +
                                   "' is both a probabilistic fact and a clause head");
        AtomSet body_set;
        for (const auto& l : c.body)
            if (!body_set.insert(l.atom).second)
                throw validation_error("clause for '" + c.head.name() +
                                       "' repeats body atom '" + l.atom.name() + "'");
    }
}

bool Program::operator==(const Program& o) const {
    if (facts.size() != o.facts.size() || clauses.size() != o.clauses.size() ||
        source_order.size() != o.source_order.size())
        return false;
    for (std::size_t i = 0; i < facts.size(); ++i)
        if (facts[i].atom != o.facts[i].atom || facts[i].prob != o.facts[i].prob) return false;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
        if (clauses[i].head != o.clauses[i].head) return false;
        if (clauses[i].body != o.clauses[i].body) return false;
    }
    for (std::size_t i = 0; i < source_order.size(); ++i)
        if (source_order[i].kind != o.source_order[i].kind ||
            source_order[i].index != o.source_order[i].index)
            return false;
    return true;
}

bool Interpretation::satisfies(const Formula& f) const {
    for (const auto& l : f.literals) {
        auto it = values.find(l.atom);
        if (it == values.end())
            throw validation_error("interpretation does not cover atom '" + l.atom.name() + "'");
        if (it->second != l.positive) return false;
    }
    return true;
}

bool Interpretation::satisfies(const Assignment& partial) const {
    for (const auto& [a, v] : partial) {
        auto it = values.find(a);
        if (it == values.end())
            throw validation_error("interpretation does not cover atom '" + a.name() + "'");
        if (it->second != v) return false;
    }
    return true;
}

Interpretation evaluate_world(const Program& p, const World& w) {
    auto facts = p.fact_atoms();
    if (w.values.size() != facts.size())
        throw validation_error("world does not assign exactly the fact atoms");
    for (Atom a : facts)
        if (!w.values.count(a))
            throw validation_error("world misses fact atom '" + a.name() + "'");

    Digraph dep = dependency_graph(p);
    auto order = dep.topological_order();
    if (!order) throw validation_error("program is cyclic; no unique supported model");

    Interpretation out;
    out.values = w.values;
    std::unordered_map<Atom, std::vector<const Clause*>, AtomHash> defs;
    for (const auto& c : p.clauses) defs[c.head].push_back(&c);

    for (Atom a : *order) {
        if (out.values.count(a)) continue;  // fact atom
        bool truth = false;
        auto it = defs.find(a);
        if (it != defs.end()) {
            for (const Clause* c : it->second) {
                bool body_ok = true;
                for (const auto& l : c->body) {
                    if (out.values.at(l.atom) != l.positive) {
                        body_ok = false;
                        break;
                    }
                }
                if (body_ok) {
                    truth = true;
                    break;
                }
            }
        }
        out.values[a] = truth;  // body-only atoms default to false
    }
    return out;
}

double world_probability(const Program& p, const World& w) {
    double prob = 1.0;
    for (const auto& f : p.facts) {
        auto it = w.values.find(f.atom);
        if (it == w.values.end())
            throw validation_error("world misses fact atom '" + f.atom.name() + "'");
        prob *= it->second ? f.prob.value : 1.0 - f.prob.value;
    }
    return prob;
}

Rational world_probability_exact(const Program& p, const World& w) {
    Rational prob = 1;
    for (const auto& f : p.facts) {
        auto it = w.values.find(f.atom);
        if (it == w.values.end())
            throw validation_error("world misses fact atom '" + f.atom.name() + "'");
        if (!f.prob.exact)
            throw validation_error("fact '" + f.atom.name() + "' has no exact probability");
        prob *= it->second ? *f.prob.exact : Rational(1) - *f.prob.exact;
    }
    return prob;
}

}  // namespace cfl

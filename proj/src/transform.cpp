#include "cfl/transform.hpp"

#include <algorithm>

#include "cfl/errors.hpp"
#include "cfl/graph.hpp"
#include "cfl/naming.hpp"

namespace cfl {

namespace {

void require_known_atoms(const Program& p, const Intervention& iv) {
    for (const auto& [a, v] : iv.assignments)
        if (!p.has_atom(a))
            throw intervention_error("unknown intervened atom '" + a.name() + "'");
}

void require_fresh(const Program& p, Atom generated) {
    if (p.has_atom(generated))
        throw intervention_error("generated atom '" + generated.name() +
                                 "' already occurs in the input program");
}

Prob deterministic_prob(bool value) { return value ? Prob::one() : Prob::zero(); }

}  // namespace

SwiftResult swift(const Program& p, const Intervention& fix) {
    if (fix.empty()) throw intervention_error("empty intervention");
    require_known_atoms(p, fix);

    SwiftResult out;
    for (const auto& [a, v] : fix.assignments) {
        Atom fa = fixed_atom(a);
        require_fresh(p, fa);
        out.fixed_map.emplace(a, fa);
    }

    for (const auto& f : p.facts) out.program.push_fact(f.atom, f.prob);

    for (const auto& c : p.clauses) {
        ++out.stats.clauses_visited;
        if (fix.contains(c.head)) continue;  // sever the arrows into X
        std::vector<Literal> body;
        body.reserve(c.body.size());
        for (const auto& l : c.body) {
            if (fix.contains(l.atom)) {
                body.emplace_back(out.fixed_map.at(l.atom), l.positive);
                ++out.stats.literals_rewritten;
            } else {
                body.push_back(l);
            }
        }
        out.program.push_clause(c.head, std::move(body));
    }

    // Deterministic facts with the intervened value encoded in the
    // probability, deterministic order.
    std::vector<std::pair<Atom, bool>> fixes(fix.assignments.begin(), fix.assignments.end());
    std::sort(fixes.begin(), fixes.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [a, v] : fixes) out.program.push_fact(out.fixed_map.at(a), deterministic_prob(v));

    out.stats.output_size = out.program.size();
    return out;
}

TwinResult construct_twin(const Program& p, const Intervention& do_, TwinMode mode) {
    require_known_atoms(p, do_);

    TwinResult out;
    AtomSet fact_set = p.fact_atoms();

    auto prime = [&](Atom a) {
        auto it = out.prime_map.find(a);
        if (it != out.prime_map.end()) return it->second;
        Atom pa = primed_atom(a);
        require_fresh(p, pa);
        out.prime_map.emplace(a, pa);
        return pa;
    };

    if (mode == TwinMode::literal) {
        for (const auto& f : p.facts) {
            if (do_.contains(f.atom)) {
                out.program.push_fact(f.atom, Prob::one());
                out.program.push_fact(prime(f.atom), Prob::zero());
            } else {
                out.program.push_fact(f.atom, f.prob);
                out.program.push_fact(prime(f.atom), f.prob);
            }
        }
        for (const auto& c : p.clauses) {
            ++out.stats.clauses_visited;
            if (do_.contains(c.head)) continue;
            out.program.push_clause(c.head, c.body);
            std::vector<Literal> body;
            for (const auto& l : c.body) {
                body.emplace_back(prime(l.atom), l.positive);
                ++out.stats.literals_rewritten;
            }
            out.program.push_clause(prime(c.head), std::move(body));
        }
        // Undefined primed atoms (interventions on internal atoms) fall
        // out as probability-0 facts so the result stays a valid program.
        AtomSet declared = out.program.fact_atoms();
        for (Atom h : out.program.head_atoms()) declared.insert(h);
        std::vector<Atom> missing;
        for (const auto& c : out.program.clauses)
            for (const auto& l : c.body)
                if (!declared.count(l.atom)) {
                    declared.insert(l.atom);
                    missing.push_back(l.atom);
                }
        std::sort(missing.begin(), missing.end());
        for (Atom a : missing) out.program.push_fact(a, Prob::zero());
        out.stats.output_size = out.program.size();
        return out;
    }

    // Shared-exogeneity construction. Facts stay common to both worlds;
    // only intervened atoms receive a counterfactual fact.
    for (const auto& f : p.facts) out.program.push_fact(f.atom, f.prob);

    for (const auto& c : p.clauses) {
        ++out.stats.clauses_visited;
        out.program.push_clause(c.head, c.body);  // factual world is untouched
        if (do_.contains(c.head)) continue;       // counterfactual copy replaced by the fix
        std::vector<Literal> body;
        body.reserve(c.body.size());
        for (const auto& l : c.body) {
            bool shared_fact = fact_set.count(l.atom) && !do_.contains(l.atom);
            body.emplace_back(shared_fact ? l.atom : prime(l.atom), l.positive);
            ++out.stats.literals_rewritten;
        }
        out.program.push_clause(prime(c.head), std::move(body));
    }

    std::vector<std::pair<Atom, bool>> dos(do_.assignments.begin(), do_.assignments.end());
    std::sort(dos.begin(), dos.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [a, v] : dos) out.program.push_fact(prime(a), deterministic_prob(v));

    out.stats.output_size = out.program.size();
    return out;
}

// ---------------------------------------------------------------------------
// simplify

namespace {

enum class Truth : char { open, yes, no };

}  // namespace

Program simplify(const Program& p, const AtomSet& keep) {
    std::unordered_map<Atom, Truth, AtomHash> truth;
    for (Atom a : p.all_atoms()) truth[a] = Truth::open;
    for (const auto& f : p.facts) {
        if (f.prob.is_one()) truth[f.atom] = Truth::yes;
        else if (f.prob.is_zero()) truth[f.atom] = Truth::no;
    }
    // Body-only atoms have no definition and are constantly false.
    {
        AtomSet defined = p.fact_atoms();
        for (Atom h : p.head_atoms()) defined.insert(h);
        for (const auto& [a, t] : truth)
            if (!defined.count(a)) truth[a] = Truth::no;
    }

    struct Residual {
        Atom head;
        std::vector<Literal> body;
        bool dropped = false;
    };
    std::vector<Residual> residuals;
    residuals.reserve(p.clauses.size());
    for (const auto& c : p.clauses) residuals.push_back({c.head, c.body, false});

    std::unordered_map<Atom, std::vector<std::size_t>, AtomHash> defs;
    for (std::size_t i = 0; i < residuals.size(); ++i)
        defs[residuals[i].head].push_back(i);

    // Monotone propagation; decisions and literal removals are finite,
    // so the pass budget is a guard rather than a limit.
    std::size_t budget = 2 * truth.size() + 4;
    bool changed = true;
    while (changed && budget-- > 0) {
        changed = false;
        for (auto& r : residuals) {
            if (r.dropped) continue;
            if (truth[r.head] != Truth::open) {
                r.dropped = true;  // redundant once the head is decided
                changed = true;
                continue;
            }
            std::vector<Literal> rest;
            bool clause_false = false;
            for (const auto& l : r.body) {
                Truth t = truth[l.atom];
                if (t == Truth::open) {
                    rest.push_back(l);
                } else if ((t == Truth::yes) != l.positive) {
                    clause_false = true;
                    break;
                }
            }
            if (clause_false) {
                r.dropped = true;
                changed = true;
                continue;
            }
            if (rest.size() != r.body.size()) {
                r.body = std::move(rest);
                changed = true;
            }
            if (r.body.empty()) {
                truth[r.head] = Truth::yes;
                r.dropped = true;
                changed = true;
            }
        }
        // Heads with every clause gone are constantly false.
        for (auto& [head, idxs] : defs) {
            if (truth[head] != Truth::open) continue;
            bool all_gone = std::all_of(idxs.begin(), idxs.end(),
                                        [&](std::size_t i) { return residuals[i].dropped; });
            if (all_gone) {
                truth[head] = Truth::no;
                changed = true;
            }
        }
    }

    // Ancestor closure of the kept atoms over the residual structure.
    AtomSet needed;
    std::vector<Atom> stack;
    auto require = [&](Atom a) {
        if (needed.insert(a).second) stack.push_back(a);
    };
    for (Atom a : keep)
        if (truth.count(a)) require(a);
    while (!stack.empty()) {
        Atom a = stack.back();
        stack.pop_back();
        if (truth[a] != Truth::open) continue;  // constants have no live ancestors
        auto it = defs.find(a);
        if (it == defs.end()) continue;
        for (std::size_t i : it->second) {
            if (residuals[i].dropped) continue;
            for (const auto& l : residuals[i].body) require(l.atom);
        }
    }

    // Emit surviving items in source order so that a no-op pass is the
    // structural identity.
    Program out;
    for (const auto& item : p.source_order) {
        if (item.kind == Program::ItemKind::fact) {
            const ProbFact& f = p.facts[item.index];
            if (!needed.count(f.atom)) continue;
            out.push_fact(f.atom, f.prob);
        } else {
            const Residual& r = residuals[item.index];
            if (r.dropped || !needed.count(r.head)) continue;
            out.push_clause(r.head, r.body);
        }
    }
    // Needed atoms whose truth became constant are re-emitted as
    // deterministic facts (their defining clauses are gone).
    AtomSet already = out.fact_atoms();
    std::vector<Atom> folded;
    for (Atom a : needed) {
        if (already.count(a) || out.is_head_atom(a)) continue;
        if (truth[a] == Truth::yes || truth[a] == Truth::no) folded.push_back(a);
    }
    std::sort(folded.begin(), folded.end());
    for (Atom a : folded) out.push_fact(a, deterministic_prob(truth[a] == Truth::yes));
    return out;
}

// ---------------------------------------------------------------------------
// LPAD

void LPADProgram::validate() const {
    Digraph dep;
    for (const auto& rc : clauses) {
        AtomSet heads;
        Rational sum = 0;
        bool exact = true;
        double dsum = 0.0;
        for (const auto& h : rc.heads) {
            if (!heads.insert(h.atom).second)
                throw validation_error("annotated disjunction repeats head atom '" +
                                       h.atom.name() + "'");
            if (h.prob.value < 0.0 || h.prob.value > 1.0)
                throw validation_error("head probability outside [0,1]");
            if (h.prob.exact) sum += *h.prob.exact; else exact = false;
            dsum += h.prob.value;
        }
        if (exact ? sum > 1 : dsum > 1.0 + 1e-9)
            throw validation_error("annotated-disjunction head probabilities exceed 1");
        for (const auto& h : rc.heads) {
            dep.add_vertex(h.atom);
            for (const auto& l : rc.body) dep.add_edge(l.atom, h.atom, l.positive);
        }
    }
    if (auto cycle = dep.find_cycle())
        throw validation_error("LPAD union dependency graph is cyclic through '" +
                               cycle->front().name() + "'");
}

void append_desugared_ad(Program& out, const LPADClause& rc, std::size_t k,
                         const AtomSet& used) {
    std::string tag = "ad" + std::to_string(k);
    std::size_t l = rc.heads.size();

    // Choice probabilities: remaining-mass normalization, so that picking
    // head i has overall probability pi_i under selection semantics.
    std::vector<Prob> choice(l);
    bool exact = std::all_of(rc.heads.begin(), rc.heads.end(),
                             [](const LPADHead& h) { return h.prob.exact.has_value(); });
    if (exact) {
        Rational consumed = 0;
        for (std::size_t i = 0; i < l; ++i) {
            Rational rem = Rational(1) - consumed;
            choice[i] = rem == 0 ? Prob::zero()
                                 : Prob::from_rational(*rc.heads[i].prob.exact / rem);
            consumed += *rc.heads[i].prob.exact;
        }
    } else {
        double consumed = 0.0;
        for (std::size_t i = 0; i < l; ++i) {
            double rem = 1.0 - consumed;
            choice[i] = rem <= 0.0 ? Prob::zero()
                                   : Prob::from_double(rc.heads[i].prob.value / rem);
            consumed += rc.heads[i].prob.value;
        }
    }

    auto fresh = [&](const std::string& name) {
        Atom a = Atom::intern(name);
        if (used.count(a))
            throw validation_error("auxiliary atom '" + name +
                                   "' collides with a program atom");
        return a;
    };

    std::vector<Atom> u(l), hk(l);
    for (std::size_t i = 0; i < l; ++i) {
        u[i] = fresh(tag + "_u" + std::to_string(i + 1));
        out.push_fact(u[i], choice[i]);
    }
    if (l == 1) {
        std::vector<Literal> body = rc.body;
        body.push_back(pos(u[0]));
        out.push_clause(rc.heads[0].atom, std::move(body));
        return;
    }
    for (std::size_t i = 0; i < l; ++i) hk[i] = fresh(tag + "_h" + std::to_string(i + 1));
    for (std::size_t i = 0; i < l; ++i) {
        std::vector<Literal> body = rc.body;
        for (std::size_t j = 0; j < i; ++j) body.push_back(neg(hk[j]));
        body.push_back(pos(u[i]));
        out.push_clause(hk[i], std::move(body));
        out.push_clause(rc.heads[i].atom, {pos(hk[i])});
    }
}

Program lpad_to_problog(const LPADProgram& lp) {
    lp.validate();
    AtomSet used;
    for (const auto& rc : lp.clauses) {
        for (const auto& h : rc.heads) used.insert(h.atom);
        for (const auto& l : rc.body) used.insert(l.atom);
    }
    Program out;
    for (std::size_t k = 0; k < lp.clauses.size(); ++k)
        append_desugared_ad(out, lp.clauses[k], k, used);
    out.validate();
    return out;
}

LPADProgram problog_to_lpad(const Program& p) {
    LPADProgram out;
    for (const auto& item : p.source_order) {
        if (item.kind == Program::ItemKind::fact) {
            const ProbFact& f = p.facts[item.index];
            out.clauses.push_back({{{f.atom, f.prob}}, {}});
        } else {
            const Clause& c = p.clauses[item.index];
            out.clauses.push_back({{{c.head, Prob::one()}}, c.body});
        }
    }
    return out;
}

}  // namespace cfl

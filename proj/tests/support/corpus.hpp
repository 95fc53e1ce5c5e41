#pragma once

#include <random>
#include <string>
#include <vector>

#include "cfl/graph.hpp"
#include "cfl/inference.hpp"
#include "cfl/program.hpp"
#include "cfl/transform.hpp"

namespace cfl::testing {

inline std::uint64_t rdraw(std::mt19937_64& rng, std::uint64_t bound) {
    return bound == 0 ? 0 : rng() % bound;
}

struct CorpusOptions {
    int min_facts = 2, max_facts = 8;
    int min_internal = 2, max_internal = 8;
    int max_clauses = 25;
    int max_body = 4;
    int max_clauses_per_atom = 3;
    // Probabilities are k/20; with small probability a fact is pinned to
    // 0 or 1 so unit propagation has something to chew on.
    bool allow_deterministic = true;
};

// Seeded random acyclic ground program. Internal atoms are layered, so
// acyclicity holds by construction; every internal atom has at least one
// clause and every body atom is declared.
inline Program random_program(std::uint64_t seed, const CorpusOptions& opt = {}) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull);
    int nf = opt.min_facts + static_cast<int>(rdraw(rng, opt.max_facts - opt.min_facts + 1));
    int ni = opt.min_internal +
             static_cast<int>(rdraw(rng, opt.max_internal - opt.min_internal + 1));

    Program p;
    std::vector<Atom> pool;
    for (int i = 0; i < nf; ++i) {
        Atom a = Atom::intern("f" + std::to_string(i + 1));
        long num = 1 + static_cast<long>(rdraw(rng, 19));
        if (opt.allow_deterministic && rdraw(rng, 10) == 0) num = rdraw(rng, 2) ? 20 : 0;
        p.push_fact(a, Prob::from_ratio(num, 20));
        pool.push_back(a);
    }
    int clause_budget = opt.max_clauses;
    for (int i = 0; i < ni; ++i) {
        Atom head = Atom::intern("q" + std::to_string(i + 1));
        int defs = 1 + static_cast<int>(rdraw(rng, opt.max_clauses_per_atom));
        defs = std::min(defs, std::max(1, clause_budget - (ni - i - 1)));
        for (int d = 0; d < defs; ++d) {
            int blen = 1 + static_cast<int>(
                               rdraw(rng, std::min<std::size_t>(opt.max_body, pool.size())));
            std::vector<Atom> chosen = pool;
            for (std::size_t j = chosen.size(); j > 1; --j)
                std::swap(chosen[j - 1], chosen[rdraw(rng, j)]);
            chosen.resize(blen);
            std::vector<Literal> body;
            for (Atom a : chosen) body.emplace_back(a, rdraw(rng, 10) >= 3);
            p.push_clause(head, std::move(body));
            --clause_budget;
        }
        pool.push_back(head);
    }
    p.validate();
    return p;
}

struct RandomQuery {
    Intervention fix;
    EvidenceSet ev;
    Formula phi;
};

// Samples 1..3 intervened atoms, 0..3 evidence atoms restricted to
// non-descendants of the intervened set (excluding the set itself), and
// a 1..2-literal query. Evidence is re-drawn until it has positive mass.
inline RandomQuery random_query(const Program& p, std::uint64_t seed) {
    std::mt19937_64 rng(seed * 0x6c62272e07bb0142ull + 0x9e3779b97f4a7c15ull);
    std::vector<Atom> atoms = p.all_atoms();

    RandomQuery q;
    std::vector<Atom> shuffled = atoms;
    for (std::size_t j = shuffled.size(); j > 1; --j)
        std::swap(shuffled[j - 1], shuffled[rdraw(rng, j)]);
    int nx = 1 + static_cast<int>(rdraw(rng, 3));
    nx = std::min<int>(nx, static_cast<int>(shuffled.size()));
    AtomSet xs;
    for (int i = 0; i < nx; ++i) {
        q.fix.assignments.emplace(shuffled[i], rdraw(rng, 2) == 0);
        xs.insert(shuffled[i]);
    }

    Digraph dep = dependency_graph(p);
    AtomSet desc = descendants(dep, xs);
    std::vector<Atom> ev_pool;
    for (Atom a : atoms)
        if (!xs.count(a) && !desc.count(a)) ev_pool.push_back(a);
    for (std::size_t j = ev_pool.size(); j > 1; --j)
        std::swap(ev_pool[j - 1], ev_pool[rdraw(rng, j)]);

    int ne = static_cast<int>(rdraw(rng, 4));
    ne = std::min<int>(ne, static_cast<int>(ev_pool.size()));
    QueryOptions enum_opts;
    enum_opts.backend = Backend::enumerate;
    for (int attempt = 0; attempt < 16; ++attempt) {
        EvidenceSet ev;
        for (int i = 0; i < ne; ++i) ev.assignments.emplace(ev_pool[i], rdraw(rng, 2) == 0);
        if (ne == 0 || marginal(p, ev.as_formula(), enum_opts) > 1e-12) {
            q.ev = std::move(ev);
            break;
        }
        if (attempt == 14) ne = 0;  // give up on evidence for this seed
    }

    int nq = 1 + static_cast<int>(rdraw(rng, 2));
    std::vector<Atom> qpool = atoms;
    for (std::size_t j = qpool.size(); j > 1; --j)
        std::swap(qpool[j - 1], qpool[rdraw(rng, j)]);
    std::vector<Literal> lits;
    for (int i = 0; i < nq && i < static_cast<int>(qpool.size()); ++i)
        lits.emplace_back(qpool[i], rdraw(rng, 2) == 0);
    q.phi = Formula(std::move(lits));
    return q;
}

struct LPADCorpusOptions {
    int min_clauses = 3, max_clauses = 8;
    int max_heads = 3;
    int max_body = 3;
    int n_atoms = 8;
};

// Random LPAD program over atoms b1..bN: a base layer of fact-like
// clauses plus rule clauses whose heads sit strictly above their bodies,
// so the union dependency graph is acyclic and every selection has a
// unique supported model. Total clause count stays within max_clauses.
inline LPADProgram random_lpad(std::uint64_t seed, const LPADCorpusOptions& opt = {}) {
    std::mt19937_64 rng(seed * 0xd1342543de82ef95ull + 0xaf251af3b0f025b5ull);
    std::vector<Atom> atoms;
    for (int i = 0; i < opt.n_atoms; ++i)
        atoms.push_back(Atom::intern("b" + std::to_string(i + 1)));

    LPADProgram lp;
    int base = std::min(opt.n_atoms - 1, 2 + static_cast<int>(rdraw(rng, 3)));
    for (int i = 0; i < base; ++i) {
        long num = 1 + static_cast<long>(rdraw(rng, 18));
        lp.clauses.push_back({{{atoms[i], Prob::from_ratio(num, 20)}}, {}});
    }
    int total = opt.min_clauses +
                static_cast<int>(rdraw(rng, opt.max_clauses - opt.min_clauses + 1));
    int nc = std::max(1, total - base);
    for (int c = 0; c < nc; ++c) {
        int split = base + static_cast<int>(rdraw(rng, opt.n_atoms - base));
        split = std::max(1, std::min(split, opt.n_atoms - 1));
        std::vector<Atom> above(atoms.begin() + split, atoms.end());
        std::vector<Atom> below(atoms.begin(), atoms.begin() + split);
        for (std::size_t j = above.size(); j > 1; --j)
            std::swap(above[j - 1], above[rdraw(rng, j)]);
        for (std::size_t j = below.size(); j > 1; --j)
            std::swap(below[j - 1], below[rdraw(rng, j)]);

        LPADClause rc;
        int nh = 1 + static_cast<int>(
                         rdraw(rng, std::min<std::size_t>(opt.max_heads, above.size())));
        // Head probabilities in twentieths with total mass <= 1.
        long remaining = 20;
        for (int h = 0; h < nh; ++h) {
            long num =
                1 + static_cast<long>(rdraw(rng, std::max<long>(1, remaining - (nh - h - 1))));
            remaining -= num;
            rc.heads.push_back({above[h], Prob::from_ratio(num, 20)});
        }
        int nb = static_cast<int>(
            rdraw(rng, std::min<std::size_t>(opt.max_body, below.size()) + 1));
        for (int b = 0; b < nb; ++b) rc.body.emplace_back(below[b], rdraw(rng, 10) >= 3);
        lp.clauses.push_back(std::move(rc));
    }
    lp.validate();
    return lp;
}

// Alphabet atoms of an LPAD program (heads and bodies).
inline std::vector<Atom> lpad_atoms(const LPADProgram& lp) {
    std::vector<Atom> out;
    AtomSet seen;
    for (const auto& rc : lp.clauses) {
        for (const auto& h : rc.heads)
            if (seen.insert(h.atom).second) out.push_back(h.atom);
        for (const auto& l : rc.body)
            if (seen.insert(l.atom).second) out.push_back(l.atom);
    }
    return out;
}

}  // namespace cfl::testing

#include <doctest.h>

#include "cfl/graph.hpp"
#include "cfl/naming.hpp"
#include "cfl/parse.hpp"
#include "cfl/transform.hpp"
#include "support/corpus.hpp"
#include "support/fixtures.hpp"
#include "support/naive.hpp"

using namespace cfl;
using namespace cfl::testing;

namespace {

Intervention iv(std::initializer_list<std::pair<const char*, bool>> xs) {
    Intervention out;
    for (const auto& [name, value] : xs) out.assignments.emplace(at(name), value);
    return out;
}

}  // namespace

TEST_CASE("swift rewrites bodies and adds fixed facts") {
    Program sm = smoking();
    auto s = swift(sm, iv({{"smokes", false}}));
    // Facts unchanged plus the deterministic fixed fact.
    REQUIRE(s.program.facts.size() == 4);
    CHECK(s.program.facts[0].atom == at("lifestyle"));
    CHECK(s.program.facts[1].atom == at("smokes"));
    CHECK(s.program.facts[1].prob.exact == Rational(3, 10));
    CHECK(s.program.facts[3].atom == fixed_atom(at("smokes")));
    CHECK(s.program.facts[3].prob.is_zero());
    REQUIRE(s.program.clauses.size() == 1);
    CHECK(s.program.clauses[0].body[0].atom == fixed_atom(at("smokes")));
    CHECK(s.program.clauses[0].body[1].atom == at("genetic_risk"));
    CHECK(s.stats.clauses_visited == 1);
    CHECK(s.stats.literals_rewritten == 1);
    CHECK(s.stats.output_size == s.program.size());
    CHECK(check_acyclic(s.program).ok);

    Program pf = power_failure();
    auto sb = swift(pf, iv({{"b", true}}));
    // b :- u_b dropped; c :- b rewritten; 1.0::fixed__b appended.
    CHECK(sb.program.clauses.size() == 4);
    CHECK(sb.program.facts.size() == 3);
    CHECK(sb.program.facts[2].atom == fixed_atom(at("b")));
    CHECK(sb.program.facts[2].prob.is_one());
    bool saw_rewritten = false, saw_original_b = false;
    for (const auto& c : sb.program.clauses)
        for (const auto& l : c.body) {
            if (l.atom == fixed_atom(at("b"))) saw_rewritten = true;
            if (l.atom == at("b")) saw_original_b = true;
        }
    CHECK(saw_rewritten);
    CHECK(!saw_original_b);
    CHECK(sb.stats.clauses_visited == 5);
    CHECK(sb.stats.literals_rewritten == 1);
}

TEST_CASE("swift on an atom with no body occurrences is a no-op rewrite") {
    Program p = parse_program("0.5::x.\n0.5::y.\nz :- y.\n");
    auto s = swift(p, iv({{"x", true}}));
    CHECK(s.stats.literals_rewritten == 0);
    CHECK(s.program.facts.size() == 3);
    CHECK(s.program.clauses.size() == 1);
    CHECK(s.program.clauses[0].body[0].atom == at("y"));
}

TEST_CASE("swift errors") {
    Program p = power_failure();
    CHECK_THROWS_AS(swift(p, Intervention{}), intervention_error);
    CHECK_THROWS_AS(swift(p, iv({{"ghost", true}})), intervention_error);
    // Reserved name already present in the input.
    Program clash = parse_program("0.5::fixed__x.\n0.5::x.\ny :- x, fixed__x.\n");
    CHECK_THROWS_AS(swift(clash, iv({{"x", true}})), intervention_error);
}

TEST_CASE("construct_twin shares exogenous facts between the worlds") {
    Program sm = smoking();
    auto t = construct_twin(sm, iv({{"smokes", false}}));
    // Shared facts plus one deterministic counterfactual copy.
    REQUIRE(t.program.facts.size() == 4);
    CHECK(t.program.facts[0].atom == at("lifestyle"));
    CHECK(t.program.facts[3].atom == primed_atom(at("smokes")));
    CHECK(t.program.facts[3].prob.is_zero());
    REQUIRE(t.program.clauses.size() == 2);
    CHECK(t.program.clauses[0].head == at("cancer"));
    CHECK(t.program.clauses[1].head == primed_atom(at("cancer")));
    CHECK(t.program.clauses[1].body[0].atom == primed_atom(at("smokes")));
    CHECK(t.program.clauses[1].body[1].atom == at("genetic_risk"));  // shared exogenous
    CHECK(t.stats.clauses_visited == 1);
}

TEST_CASE("construct_twin with empty intervention doubles the rule structure") {
    Program pf = power_failure();
    auto t = construct_twin(pf, Intervention{});
    CHECK(t.program.facts.size() == 2);     // facts stay shared
    CHECK(t.program.clauses.size() == 10);  // clauses double
    CHECK(t.stats.clauses_visited == 5);
    CHECK(check_acyclic(t.program).ok);
}

TEST_CASE("construct_twin on a single intervened fact") {
    Program p = parse_program("0.7::a.\n");
    auto t = construct_twin(p, iv({{"a", true}}));
    REQUIRE(t.program.facts.size() == 2);
    CHECK(t.program.facts[0].atom == at("a"));
    CHECK(t.program.facts[0].prob.exact == Rational(7, 10));
    CHECK(t.program.facts[1].atom == primed_atom(at("a")));
    CHECK(t.program.facts[1].prob.is_one());
}

TEST_CASE("twin bodies never mix primed and unprimed endogenous atoms") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        Program p = random_program(seed);
        RandomQuery q = random_query(p, seed);
        auto t = construct_twin(p, q.fix);
        AtomSet original_heads = p.head_atoms();
        AtomSet primed_heads;
        for (Atom h : original_heads) primed_heads.insert(primed_atom(h));
        for (const auto& c : t.program.clauses) {
            bool has_orig = false, has_primed = false;
            for (const auto& l : c.body) {
                if (original_heads.count(l.atom)) has_orig = true;
                if (primed_heads.count(l.atom)) has_primed = true;
            }
            CHECK(!(has_orig && has_primed));
        }
        // The endogenous primal graph separates the two worlds.
        UGraph primal = primal_graph(t.program);
        for (Atom h : original_heads) {
            if (!primal.has_vertex(h)) continue;
            for (Atom nb : primal.neighbors(h)) CHECK(!primed_heads.count(nb));
        }
    }
}

TEST_CASE("transform size and work accounting over the corpus") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        Program p = random_program(seed);
        RandomQuery q = random_query(p, seed * 31 + 7);
        auto s = swift(p, q.fix);
        auto t = construct_twin(p, q.fix);
        std::size_t body_total = 0;
        for (const auto& c : p.clauses) body_total += c.body.size();

        CHECK(s.program.size() <= t.program.size());
        CHECK(t.stats.clauses_visited == p.clauses.size());
        CHECK(s.stats.clauses_visited == p.clauses.size());
        CHECK(s.stats.literals_rewritten <= body_total);
        CHECK(s.stats.output_size == s.program.size());
        CHECK(t.stats.output_size == t.program.size());

        // Strictly smaller whenever any clause survives in both outputs.
        bool survivor = false;
        for (const auto& c : p.clauses)
            if (!q.fix.contains(c.head)) survivor = true;
        if (survivor) CHECK(s.program.size() < t.program.size());

        CHECK(check_acyclic(s.program).ok);
        CHECK(check_acyclic(t.program).ok);
    }
}

TEST_CASE("literal twin mode reproduces the published construction") {
    Program sm = smoking();
    auto t = construct_twin(sm, iv({{"smokes", false}}), TwinMode::literal);
    // Every fact duplicated; the intervened fact forced to 1.0/0.0
    // regardless of the requested value.
    REQUIRE(t.program.facts.size() == 6);
    CHECK(t.program.facts[2].atom == at("smokes"));
    CHECK(t.program.facts[2].prob.is_one());
    CHECK(t.program.facts[3].atom == primed_atom(at("smokes")));
    CHECK(t.program.facts[3].prob.is_zero());
    REQUIRE(t.program.clauses.size() == 2);
    CHECK(t.program.clauses[1].body[1].atom == primed_atom(at("genetic_risk")));
}

TEST_CASE("simplify propagates fixed values and prunes dead structure") {
    Program pf = power_failure();
    auto s = swift(pf, iv({{"b", true}}));
    Program reduced = simplify(s.program, {at("d"), at("a")});
    // c became constant true, d folded to a deterministic fact, and the
    // dependency of d on a is gone.
    CHECK(reduced.is_fact_atom(at("d")));
    CHECK(reduced.fact_index(at("d")).has_value());
    CHECK(reduced.facts[reduced.fact_index(at("d")).value()].prob.is_one());
    bool d_has_clause = false;
    for (const auto& c : reduced.clauses)
        if (c.head == at("d")) d_has_clause = true;
    CHECK(!d_has_clause);
    Digraph dep = dependency_graph(reduced);
    CHECK(d_separated(dep, at("a"), at("d"), {}));

    // keep = all atoms, nothing deterministic: fixpoint at the input.
    Program plain = parse_program("0.5::x.\n0.4::y.\nz :- x, \\+ y.\nw :- z.\n");
    AtomSet all;
    for (Atom a : plain.all_atoms()) all.insert(a);
    CHECK(simplify(plain, all) == plain);

    // keep = empty: everything is dead.
    Program none = simplify(plain, {});
    CHECK(none.size() == 0);
}

TEST_CASE("simplify preserves kept marginals on the corpus") {
    QueryOptions opts;
    opts.backend = Backend::enumerate;
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        Program p = random_program(seed);
        std::vector<Atom> atoms = p.all_atoms();
        std::mt19937_64 rng(seed);
        AtomSet keep;
        for (int i = 0; i < 3 && i < static_cast<int>(atoms.size()); ++i)
            keep.insert(atoms[rdraw(rng, atoms.size())]);
        Program reduced = simplify(p, keep);
        reduced.validate();
        CHECK(check_acyclic(reduced).ok);
        for (Atom a : keep) {
            double before = naive_marginal(p, Formula::atom_true(a));
            double after = naive_marginal(reduced, Formula::atom_true(a));
            CHECK(std::abs(before - after) <= 1e-12);
        }
    }
}

TEST_CASE("simplify keeps constant-false atoms queryable") {
    Program p = parse_program("0.0::dead.\nx :- dead.\ny :- x.\n0.5::z.\n");
    Program reduced = simplify(p, {at("y"), at("z")});
    auto yi = reduced.fact_index(at("y"));
    REQUIRE(yi.has_value());
    CHECK(reduced.facts[*yi].prob.is_zero());
    CHECK(naive_marginal(reduced, Formula::atom_true(at("z"))) == doctest::Approx(0.5));
}

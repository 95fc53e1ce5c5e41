#include <doctest.h>

#include "cfl/circuit.hpp"
#include "cfl/parse.hpp"
#include "support/corpus.hpp"
#include "support/fixtures.hpp"

using namespace cfl;
using namespace cfl::testing;

TEST_CASE("single fact compiles to one decision over constants") {
    Program p = parse_program("0.3::a.\n");
    Circuit c = compile_circuit(p, Formula::atom_true(at("a")));
    CHECK(c.weighted_count() == doctest::Approx(0.3).epsilon(1e-15));
    const auto& root = c.nodes[c.root];
    CHECK(root.kind == Circuit::Kind::decision);
    CHECK(c.fact_atoms[root.fact] == at("a"));
    CHECK(c.nodes[root.hi].kind == Circuit::Kind::ctrue);
    CHECK(c.nodes[root.lo].kind == Circuit::Kind::cfalse);
    CHECK(c.decision_depth() == 1);
    CHECK(c.check_invariants());
}

TEST_CASE("power failure target counts to 0.75") {
    Circuit c = compile_circuit(power_failure(), Formula::atom_true(at("d")));
    CHECK(c.weighted_count() == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(c.check_invariants());
}

TEST_CASE("independent components meet at an AND root") {
    Program p = parse_program("0.5::x.\n0.25::y.\n");
    Circuit c = compile_circuit(p, Formula({pos(at("x")), pos(at("y"))}));
    CHECK(c.weighted_count() == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(c.nodes[c.root].kind == Circuit::Kind::and_node);
    CHECK(c.nodes[c.root].children.size() == 2);
    CHECK(c.check_invariants());

    // Independent chains decompose as well.
    Program chains = parse_program(
        "0.5::x.\n0.25::y.\nha :- x.\nhb :- y.\n");
    Circuit c2 = compile_circuit(chains, Formula({pos(at("ha")), pos(at("hb"))}));
    CHECK(c2.weighted_count() == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(c2.nodes[c2.root].kind == Circuit::Kind::and_node);
}

TEST_CASE("deterministic facts are propagated, not decided") {
    Program p = parse_program("1.0::always.\n0.5::coin.\nboth :- always, coin.\n");
    Circuit c = compile_circuit(p, Formula::atom_true(at("both")));
    CHECK(c.weighted_count() == doctest::Approx(0.5).epsilon(1e-15));
    for (const auto& n : c.nodes)
        if (n.kind == Circuit::Kind::decision) CHECK(c.fact_atoms[n.fact] == at("coin"));
}

TEST_CASE("negative requirements and negation in bodies") {
    Program p = parse_program("0.4::b.\na :- \\+ b.\n");
    Circuit c = compile_circuit(p, Formula::atom_true(at("a")));
    CHECK(c.weighted_count() == doctest::Approx(0.6).epsilon(1e-15));
    Circuit c2 = compile_circuit(p, Formula({neg(at("a"))}));
    CHECK(c2.weighted_count() == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("contradictory and tautological targets") {
    Program p = power_failure();
    Circuit c = compile_circuit(p, Formula({pos(at("d")), neg(at("c"))}));
    CHECK(c.weighted_count() == 0.0);  // d implies c
    Circuit t = compile_circuit(p, Formula{});
    CHECK(t.weighted_count() == 1.0);
}

TEST_CASE("node cap raises a resource error") {
    Program p = random_program(7, CorpusOptions{.min_facts = 8, .max_facts = 8,
                                                .min_internal = 8, .max_internal = 8});
    CircuitOptions opts;
    opts.node_cap = 3;
    Formula phi = Formula::atom_true(p.clauses.back().head);
    CHECK_THROWS_AS(compile_circuit(p, phi, opts), resource_error);
}

TEST_CASE("hand-built leaf nodes count with fact weights") {
    Circuit c;
    c.nodes.push_back({Circuit::Kind::ctrue, -1, true, -1, -1, {}});
    c.nodes.push_back({Circuit::Kind::cfalse, -1, true, -1, -1, {}});
    c.fact_atoms = {at("w1"), at("w2")};
    c.fact_prob = {0.25, 0.5};
    c.nodes.push_back({Circuit::Kind::leaf, 0, true, -1, -1, {}});
    c.nodes.push_back({Circuit::Kind::leaf, 1, false, -1, -1, {}});
    c.nodes.push_back({Circuit::Kind::and_node, -1, true, -1, -1, {2, 3}});
    c.root = 4;
    CHECK(c.weighted_count() == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(c.check_invariants());

    // Sharing a fact across AND children violates decomposability.
    Circuit bad = c;
    bad.nodes[3].fact = 0;
    CHECK(!bad.check_invariants());
}

TEST_CASE("cache shares equal residuals across branches") {
    // Two parallel XOR-ish diamonds over shared tail variables produce
    // identical residuals after the head variable is decided both ways.
    Program p = parse_program(
        "0.5::t1.\n0.5::t2.\n0.5::h.\n"
        "mid :- h, t1.\n"
        "mid :- \\+ h, t1.\n"
        "out :- mid, t2.\n");
    Circuit c = compile_circuit(p, Formula::atom_true(at("out")));
    CHECK(c.weighted_count() == doctest::Approx(0.25).epsilon(1e-12));
    // h is irrelevant after propagation; the circuit should not branch on
    // it at all (the hi/lo residuals coincide and collapse).
    for (const auto& n : c.nodes)
        if (n.kind == Circuit::Kind::decision) CHECK(c.fact_atoms[n.fact] != at("h"));
}

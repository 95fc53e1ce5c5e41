#include <doctest.h>

#include "cfl/oracle.hpp"
#include "cfl/parse.hpp"
#include "cfl/transform.hpp"
#include "support/corpus.hpp"
#include "support/fixtures.hpp"
#include "support/naive.hpp"

using namespace cfl;
using namespace cfl::testing;

namespace {

LPADClause ad(std::initializer_list<std::pair<const char*, Prob>> heads,
              std::vector<Literal> body = {}) {
    LPADClause rc;
    for (const auto& [name, prob] : heads) rc.heads.push_back({at(name), prob});
    rc.body = std::move(body);
    return rc;
}

}  // namespace

TEST_CASE("two-headed disjunction uses remaining-mass choice probabilities") {
    LPADProgram lp;
    lp.clauses.push_back(ad({{"bd", Prob::one()}}));  // body enabler
    lp.clauses.push_back(
        ad({{"h1", Prob::from_ratio(1, 2)}, {"h2", Prob::from_ratio(3, 10)}}, {pos(at("bd"))}));
    Program p = lpad_to_problog(lp);

    // u1 = 0.5, u2 = 0.3 / (1 - 0.5) = 0.6.
    std::vector<Rational> choice_probs;
    for (const auto& f : p.facts) choice_probs.push_back(*f.prob.exact);
    REQUIRE(choice_probs.size() == 3);  // enabler choice + u1 + u2
    CHECK(choice_probs[1] == Rational(1, 2));
    CHECK(choice_probs[2] == Rational(3, 5));

    CHECK(naive_marginal(p, Formula::atom_true(at("h2"))) ==
          doctest::Approx(0.3).epsilon(1e-12));
    CHECK(naive_marginal(p, Formula::atom_true(at("h1"))) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("deterministic single-head clause behaves like a plain clause") {
    LPADProgram lp;
    lp.clauses.push_back(ad({{"b", Prob::from_ratio(2, 5)}}));
    lp.clauses.push_back(ad({{"h", Prob::one()}}, {pos(at("b"))}));
    Program p = lpad_to_problog(lp);
    auto ui = p.fact_index(Atom::intern("ad1_u1"));
    REQUIRE(ui.has_value());
    CHECK(p.facts[*ui].prob.is_one());
    CHECK(naive_marginal(p, Formula::atom_true(at("h"))) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("fact-like clause compiles to a guarded unit clause") {
    LPADProgram lp;
    lp.clauses.push_back(ad({{"a", Prob::from_ratio(1, 2)}}));
    Program p = lpad_to_problog(lp);
    REQUIRE(p.facts.size() == 1);
    REQUIRE(p.clauses.size() == 1);
    CHECK(p.facts[0].prob.exact == Rational(1, 2));
    CHECK(p.clauses[0].head == at("a"));
    REQUIRE(p.clauses[0].body.size() == 1);
    CHECK(p.clauses[0].body[0].atom == p.facts[0].atom);
    CHECK(naive_marginal(p, Formula::atom_true(at("a"))) == doctest::Approx(0.5));
}

TEST_CASE("exhausted head mass yields probability-0 choice facts") {
    LPADProgram lp;
    lp.clauses.push_back(ad({{"x", Prob::one()}, {"y", Prob::zero()}}));
    Program p = lpad_to_problog(lp);
    // Remaining mass for the second head is zero.
    bool found_zero = false;
    for (const auto& f : p.facts)
        if (f.prob.is_zero()) found_zero = true;
    CHECK(found_zero);
    CHECK(naive_marginal(p, Formula::atom_true(at("y"))) == 0.0);
}

TEST_CASE("problog_to_lpad wraps facts and clauses") {
    Program sm = smoking();
    LPADProgram lp = problog_to_lpad(sm);
    REQUIRE(lp.clauses.size() == 4);
    int prob_heads = 0, det_heads = 0;
    for (const auto& rc : lp.clauses) {
        REQUIRE(rc.heads.size() == 1);
        if (rc.heads[0].prob.is_one()) ++det_heads;
        else ++prob_heads;
    }
    CHECK(prob_heads == 3);
    CHECK(det_heads == 1);
    CHECK(problog_to_lpad(Program{}).clauses.empty());
}

TEST_CASE("round trip through the LPAD form preserves marginals") {
    Program sm = smoking();
    Program back = lpad_to_problog(problog_to_lpad(sm));
    CHECK(naive_marginal(back, Formula::atom_true(at("cancer"))) ==
          doctest::Approx(0.18).epsilon(1e-12));

    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        Program p = random_program(seed, CorpusOptions{.max_facts = 5, .max_internal = 4});
        Program rt = lpad_to_problog(problog_to_lpad(p));
        for (Atom a : p.all_atoms()) {
            double before = naive_marginal(p, Formula::atom_true(a));
            double after = naive_marginal(rt, Formula::atom_true(a));
            CHECK(std::abs(before - after) <= 1e-12);
        }
    }
}

TEST_CASE("LPAD validation") {
    LPADProgram over;
    over.clauses.push_back(ad({{"x", Prob::from_ratio(7, 10)}, {"y", Prob::from_ratio(7, 10)}}));
    CHECK_THROWS_AS(over.validate(), validation_error);

    LPADProgram cyc;
    cyc.clauses.push_back(ad({{"x", Prob::one()}}, {pos(at("y"))}));
    cyc.clauses.push_back(ad({{"y", Prob::one()}}, {pos(at("x"))}));
    CHECK_THROWS_AS(cyc.validate(), validation_error);

    LPADProgram dup;
    dup.clauses.push_back(ad({{"x", Prob::from_ratio(1, 4)}, {"x", Prob::from_ratio(1, 4)}}));
    CHECK_THROWS_AS(dup.validate(), validation_error);
}

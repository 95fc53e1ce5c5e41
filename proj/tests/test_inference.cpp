#include <doctest.h>

#include "cfl/inference.hpp"
#include "cfl/oracle.hpp"
#include "cfl/parse.hpp"
#include "support/corpus.hpp"
#include "support/fixtures.hpp"

using namespace cfl;
using namespace cfl::testing;

namespace {

QueryOptions enum_opts() {
    QueryOptions o;
    o.backend = Backend::enumerate;
    return o;
}

QueryOptions circuit_opts() {
    QueryOptions o;
    o.backend = Backend::circuit;
    return o;
}

Intervention iv(std::initializer_list<std::pair<const char*, bool>> xs) {
    Intervention out;
    for (const auto& [name, value] : xs) out.assignments.emplace(at(name), value);
    return out;
}

EvidenceSet ev(std::initializer_list<std::pair<const char*, bool>> xs) {
    EvidenceSet out;
    for (const auto& [name, value] : xs) out.assignments.emplace(at(name), value);
    return out;
}

}  // namespace

TEST_CASE("marginal worked examples") {
    Program pf = power_failure();
    for (auto opts : {enum_opts(), circuit_opts()}) {
        CHECK(marginal(pf, Formula::atom_true(at("d")), opts) ==
              doctest::Approx(0.75).epsilon(1e-12));
        CHECK(marginal(pf, Formula::atom_true(at("u_a")), opts) ==
              doctest::Approx(0.5).epsilon(1e-12));
        CHECK(marginal(smoking(), Formula::atom_true(at("cancer")), opts) ==
              doctest::Approx(0.18).epsilon(1e-12));
    }
    CHECK_THROWS_AS(marginal(pf, Formula::atom_true(at("missing")), enum_opts()),
                    validation_error);
}

TEST_CASE("enumeration guard refuses oversized programs") {
    Program big;
    for (int i = 0; i < 26; ++i)
        big.push_fact(at("bf" + std::to_string(i)), Prob::from_ratio(1, 2));
    QueryOptions o = enum_opts();
    CHECK_THROWS_AS(marginal(big, Formula::atom_true(at("bf0")), o), resource_error);
}

TEST_CASE("conditional worked examples") {
    Program pf = power_failure();
    CHECK(conditional(pf, Formula::atom_true(at("d")), ev({{"b", true}}), enum_opts()) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(conditional(pf, Formula::atom_true(at("a")), ev({{"d", false}}), enum_opts()) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(conditional(smoking(), Formula::atom_true(at("cancer")), ev({{"genetic_risk", true}}),
                      enum_opts()) == doctest::Approx(0.3).epsilon(1e-12));

    // Conditioning on nothing is the marginal.
    CHECK(conditional(pf, Formula::atom_true(at("d")), EvidenceSet{}, circuit_opts()) ==
          doctest::Approx(0.75).epsilon(1e-12));

    Program zero = parse_program("0.0::never.\nx :- never.\n");
    CHECK_THROWS_AS(conditional(zero, Formula::atom_true(at("never")), ev({{"x", true}}),
                                enum_opts()),
                    zero_evidence_error);
}

TEST_CASE("conditioning and intervening are different observables") {
    Program sm = smoking();
    CHECK(conditional(sm, Formula::atom_true(at("cancer")), ev({{"smokes", false}}),
                      enum_opts()) == doctest::Approx(0.0));
    CHECK(evaluate_swip_query(sm, iv({{"smokes", false}}), EvidenceSet{},
                              Formula::atom_true(at("cancer")), enum_opts()) ==
          doctest::Approx(0.0));
    double observed = conditional(sm, Formula::atom_true(at("smokes")), ev({{"cancer", true}}),
                                  enum_opts());
    CHECK(observed == doctest::Approx(1.0));
    CHECK(marginal(sm, Formula::atom_true(at("smokes")), enum_opts()) ==
          doctest::Approx(0.3));
}

TEST_CASE("swip query worked examples") {
    Program sm = smoking();
    CHECK(evaluate_swip_query(sm, iv({{"smokes", true}}), EvidenceSet{},
                              Formula::atom_true(at("cancer")), circuit_opts()) ==
          doctest::Approx(0.6).epsilon(1e-12));

    Program pf = power_failure();
    CHECK(evaluate_swip_query(pf, iv({{"a", false}}), ev({{"b", false}}),
                              Formula::atom_true(at("d")), circuit_opts()) ==
          doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(evaluate_swip_query(pf, iv({{"a", true}}), ev({{"d", true}}),
                                        Formula::atom_true(at("d")), circuit_opts()),
                    evidence_placement_error);
    try {
        evaluate_swip_query(pf, iv({{"a", true}}), ev({{"d", true}}),
                            Formula::atom_true(at("d")), circuit_opts());
    } catch (const evidence_placement_error& e) {
        CHECK(e.evidence_atom() == at("d"));
        CHECK(e.intervened_atom() == at("a"));
    }

    // Evidence on an intervened internal atom is rejected too.
    CHECK_THROWS_AS(evaluate_swip_query(pf, iv({{"b", true}}), ev({{"b", true}}),
                                        Formula::atom_true(at("d")), circuit_opts()),
                    evidence_placement_error);

    // Evidence on an intervened fact atom conditions its factual copy.
    double on_fact = evaluate_swip_query(pf, iv({{"u_a", false}}), ev({{"u_a", true}}),
                                         Formula::atom_true(at("d")), enum_opts());
    CHECK(on_fact == doctest::Approx(0.5).epsilon(1e-12));  // d_cf = u_b

    // Empty intervention reduces to conditioning.
    CHECK(evaluate_swip_query(pf, Intervention{}, ev({{"b", true}}),
                              Formula::atom_true(at("d")), enum_opts()) ==
          doctest::Approx(1.0));
}

TEST_CASE("swip querying an intervened atom reads its fixed value") {
    Program pf = power_failure();
    CHECK(evaluate_swip_query(pf, iv({{"b", true}}), EvidenceSet{}, Formula::atom_true(at("b")),
                              enum_opts()) == doctest::Approx(1.0));
    CHECK(evaluate_swip_query(pf, iv({{"b", false}}), EvidenceSet{}, Formula::atom_true(at("b")),
                              enum_opts()) == doctest::Approx(0.0));
}

TEST_CASE("literal Algorithm-4 mode conditions inside the transformed program") {
    Program pf = power_failure();
    QueryOptions lit = circuit_opts();
    lit.literal_alg4 = true;
    // The guarded evaluator rejects this query; the literal mode answers 1,
    // the factual-conditioning value is 2/3.
    double literal = evaluate_swip_query(pf, iv({{"a", false}}), ev({{"d", true}}),
                                         Formula::atom_true(at("d")), lit);
    CHECK(literal == doctest::Approx(1.0).epsilon(1e-12));
    double factual = evaluate_twin_query(pf, iv({{"a", false}}), ev({{"d", true}}),
                                         Formula::atom_true(at("d")), circuit_opts());
    CHECK(factual == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("twin query worked examples") {
    Program pf = power_failure();
    CHECK(evaluate_twin_query(pf, iv({{"a", false}}), ev({{"d", true}}),
                              Formula::atom_true(at("d")), circuit_opts()) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(evaluate_twin_query(pf, Intervention{}, EvidenceSet{}, Formula::atom_true(at("d")),
                              circuit_opts()) == doctest::Approx(0.75).epsilon(1e-12));

    Program sm = smoking();
    CHECK(evaluate_twin_query(sm, iv({{"smokes", true}}), ev({{"cancer", false}}),
                              Formula::atom_true(at("cancer")), circuit_opts()) ==
          doctest::Approx(21.0 / 41.0).epsilon(1e-12));

    Program zero = parse_program("0.0::never.\nx :- never.\n");
    CHECK_THROWS_AS(evaluate_twin_query(zero, iv({{"x", true}}), ev({{"x", true}}),
                                        Formula::atom_true(at("x")), enum_opts()),
                    zero_evidence_error);
}

TEST_CASE("twin of phi equal to evidence is one") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        Program p = random_program(seed);
        RandomQuery q = random_query(p, seed * 13 + 5);
        if (q.ev.empty()) continue;
        Formula phi = q.ev.as_formula();
        double v = evaluate_twin_query(p, q.fix, q.ev, phi, enum_opts());
        CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("backend agreement on the corpus") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        Program p = random_program(seed);
        for (Atom a : p.all_atoms()) {
            double e = marginal(p, Formula::atom_true(a), enum_opts());
            double c = marginal(p, Formula::atom_true(a), circuit_opts());
            CHECK(std::abs(e - c) <= 1e-9);
        }
        RandomQuery q = random_query(p, seed * 17 + 3);
        double se = evaluate_twin_query(p, q.fix, q.ev, q.phi, enum_opts());
        double sc = evaluate_twin_query(p, q.fix, q.ev, q.phi, circuit_opts());
        CHECK(std::abs(se - sc) <= 1e-9);
    }
}

TEST_CASE("swip, twin, and oracle agree on guard-satisfying corpus queries") {
    double max_gap = 0.0;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        Program p = random_program(seed);
        RandomQuery q = random_query(p, seed * 101 + 11);
        double reference = oracle_counterfactual(p, q.fix, q.ev, q.phi);
        double via_swip = evaluate_swip_query(p, q.fix, q.ev, q.phi, circuit_opts());
        double via_twin = evaluate_twin_query(p, q.fix, q.ev, q.phi, circuit_opts());
        max_gap = std::max(max_gap, std::abs(via_swip - reference));
        max_gap = std::max(max_gap, std::abs(via_twin - reference));
        CHECK(std::abs(via_swip - reference) <= 1e-9);
        CHECK(std::abs(via_twin - reference) <= 1e-9);
    }
    CHECK(max_gap <= 1e-9);
}

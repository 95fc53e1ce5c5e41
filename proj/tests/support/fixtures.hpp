#pragma once

#include <string>

#include "cfl/parse.hpp"
#include "cfl/program.hpp"

namespace cfl::testing {

// Backup power supply: u_a/u_b exogenous, c on iff either supply works,
// d a deterministic report of c.
inline const char* kPowerFailureText =
    "0.5::u_a.\n"
    "0.5::u_b.\n"
    "a :- u_a.\n"
    "b :- u_b.\n"
    "c :- a.\n"
    "c :- b.\n"
    "d :- c.\n";

inline const char* kSmokingText =
    "0.3::lifestyle.\n"
    "0.3::smokes.\n"
    "0.6::genetic_risk.\n"
    "cancer :- smokes, genetic_risk.\n";

inline Program power_failure() { return parse_program(kPowerFailureText); }
inline Program smoking() { return parse_program(kSmokingText); }

inline Atom at(const std::string& name) { return Atom::intern(name); }

}  // namespace cfl::testing

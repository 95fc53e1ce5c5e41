#pragma once

#include "cfl/atoms.hpp"

namespace cfl {

// Fresh-name schemes shared by the transforms and the SWIG view.
// Prefixes and suffixes attach to the functor so compound ground terms
// stay inside the atom grammar: fix(r(v3)) -> fixed__r(v3),
// prime(r(v3)) -> r__cf(v3).

inline Atom fixed_atom(Atom a) { return Atom::intern("fixed__" + a.name()); }

inline Atom primed_atom(Atom a) { return Atom::intern(a.functor() + "__cf" + a.args()); }

}  // namespace cfl

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cfl/program.hpp"

namespace cfl {

struct ParseOptions {
    // Atoms that appear only in bodies are rejected unless this is set,
    // in which case they become probability-0 facts.
    bool implicit_false = false;
};

// query/evidence/fix/do lines. They may live in the program file or in a
// sidecar file containing only directives.
struct Directives {
    std::vector<Atom> queries;
    std::vector<std::pair<Atom, bool>> evidence;
    std::vector<std::pair<Atom, bool>> fixes;
    std::vector<std::pair<Atom, bool>> dos;

    bool empty() const {
        return queries.empty() && evidence.empty() && fixes.empty() && dos.empty();
    }
};

struct ParseResult {
    Program program;
    Directives directives;
};

// Parses the line-oriented format: probabilistic facts, clauses,
// probabilistic clauses and annotated disjunctions (desugared on the
// spot), and directives. Validates structure and acyclicity; syntax
// errors carry line/column.
ParseResult parse_with_directives(const std::string& text, const ParseOptions& opts = {});

Program parse_program(const std::string& text, const ParseOptions& opts = {});

// Inverse of parse_program up to structural identity.
std::string print_program(const Program& p);

std::string print_directives(const Directives& d);

}  // namespace cfl

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "cfl/program.hpp"

namespace cfl {

struct CircuitOptions {
    std::size_t node_cap = 4u << 20;  // compiled nodes before giving up
    bool has_deadline = false;
    std::chrono::steady_clock::time_point deadline{};
};

// Decomposable decision circuit over fact variables. AND children touch
// disjoint fact sets; along any root-to-leaf path each fact is decided
// at most once. The weighted count with leaf weights (pi, 1-pi) equals
// the probability mass of fact assignments whose supported model
// satisfies the compiled formula.
struct Circuit {
    enum class Kind : std::uint8_t { ctrue, cfalse, leaf, and_node, decision };

    struct Node {
        Kind kind;
        int fact = -1;         // dense fact id (leaf, decision)
        bool positive = true;  // leaf sign
        int hi = -1, lo = -1;  // decision branches
        std::vector<int> children;  // and_node
    };

    std::vector<Node> nodes;  // children precede parents
    int root = 1;             // node 0 = true, node 1 = false
    std::vector<Atom> fact_atoms;   // dense fact id -> atom
    std::vector<double> fact_prob;

    std::size_t node_count() const { return nodes.size(); }
    int decision_depth() const;
    double weighted_count() const;

    // Structural invariants: decomposability and once-per-path decisions.
    // Used by tests; quadratic-ish, fine at test scale.
    bool check_invariants() const;
};

// Compiles the conjunction `targets` over the acyclic program into a
// decision circuit: clause unfolding with unit propagation, recursive
// decision on the lowest-indexed fact of each connected component, and a
// cache keyed by the canonicalized residual subproblem.
Circuit compile_circuit(const Program& p, const Formula& targets,
                        const CircuitOptions& opts = {});

}  // namespace cfl

#include "cfl/oracle.hpp"

#include <algorithm>

#include "cfl/compiled.hpp"
#include "cfl/errors.hpp"
#include "cfl/graph.hpp"

namespace cfl {

namespace {

struct Goal {
    int idx;
    bool positive;
};

std::vector<Goal> resolve(const CompiledProgram& cp, const Formula& f) {
    std::vector<Goal> out;
    for (const auto& l : f.literals) {
        auto it = cp.index.find(l.atom);
        if (it == cp.index.end())
            throw validation_error("unknown atom '" + l.atom.name() + "'");
        out.push_back({it->second, l.positive});
    }
    return out;
}

bool satisfied(const std::vector<Goal>& goals, const std::vector<char>& vals) {
    for (const auto& g : goals)
        if (static_cast<bool>(vals[g.idx]) != g.positive) return false;
    return true;
}

// Supported-model sweep with the intervened atoms clamped: their clauses
// are skipped and their value is the fixed one (for exogenous atoms the
// world bit is overridden).
void sweep_clamped(const CompiledProgram& cp, const std::vector<std::pair<int, bool>>& clamps,
                   std::vector<char>& vals) {
    std::vector<char> clamped(cp.atoms.size(), 0);
    for (auto [idx, v] : clamps) {
        clamped[idx] = 1;
        vals[idx] = v;
    }
    for (std::size_t a = cp.fact_count; a < cp.atoms.size(); ++a) {
        if (clamped[a]) continue;
        char truth = 0;
        for (int ci : cp.defs[a]) {
            const auto& c = cp.clauses[ci];
            bool ok = true;
            for (int l : c.lits)
                if (static_cast<bool>(vals[CompiledProgram::lit_atom(l)]) !=
                    CompiledProgram::lit_positive(l)) {
                    ok = false;
                    break;
                }
            if (ok) {
                truth = 1;
                break;
            }
        }
        vals[a] = truth;
    }
}

template <typename Weight>
Weight counterfactual_sum(const Program& p, const Intervention& fix, const EvidenceSet& ev,
                          const Formula& phi, const OracleOptions& opts, bool exact) {
    CompiledProgram cp = CompiledProgram::build(p);
    if (static_cast<std::size_t>(cp.fact_count) > opts.max_facts)
        throw resource_error("oracle refused: " + std::to_string(cp.fact_count) +
                             " facts exceed the limit of " + std::to_string(opts.max_facts));
    for (const auto& [a, v] : fix.assignments)
        if (!p.has_atom(a))
            throw intervention_error("unknown intervened atom '" + a.name() + "'");

    auto ev_goals = resolve(cp, ev.as_formula());
    auto phi_goals = resolve(cp, phi);
    std::vector<std::pair<int, bool>> clamps;
    for (const auto& [a, v] : fix.assignments) clamps.emplace_back(cp.index.at(a), v);
    std::sort(clamps.begin(), clamps.end());

    const int f = cp.fact_count;
    std::vector<char> factual(cp.atoms.size(), 0), twisted(cp.atoms.size(), 0);
    Weight num = 0, den = 0;
    for (std::uint64_t mask = 0; mask < (1ull << f); ++mask) {
        Weight w = 1;
        for (int i = 0; i < f; ++i) {
            bool bit = (mask >> i) & 1;
            factual[i] = bit;
            if constexpr (std::is_same_v<Weight, Rational>) {
                const Prob& pr = *cp.fact_prob_src[i];
                w *= bit ? *pr.exact : Rational(1) - *pr.exact;
            } else {
                w *= bit ? cp.fact_prob[i] : 1.0 - cp.fact_prob[i];
            }
            (void)exact;
        }
        if (w == 0) continue;
        cp.sweep(factual);
        if (!satisfied(ev_goals, factual)) continue;
        den += w;
        std::copy(factual.begin(), factual.begin() + f, twisted.begin());
        sweep_clamped(cp, clamps, twisted);
        if (satisfied(phi_goals, twisted)) num += w;
    }
    if (den == 0) throw zero_evidence_error(0.0);
    return num / den;
}

}  // namespace

double oracle_counterfactual(const Program& p, const Intervention& fix, const EvidenceSet& ev,
                             const Formula& phi, const OracleOptions& opts) {
    if (p.all_probs_exact())
        return counterfactual_sum<Rational>(p, fix, ev, phi, opts, true).get_d();
    return counterfactual_sum<double>(p, fix, ev, phi, opts, false);
}

Rational oracle_counterfactual_exact(const Program& p, const Intervention& fix,
                                     const EvidenceSet& ev, const Formula& phi,
                                     const OracleOptions& opts) {
    if (!p.all_probs_exact())
        throw validation_error("exact oracle requires rational fact probabilities");
    return counterfactual_sum<Rational>(p, fix, ev, phi, opts, true);
}

double oracle_interventional(const Program& p, const Intervention& fix, const Formula& phi,
                             const OracleOptions& opts) {
    return oracle_counterfactual(p, fix, EvidenceSet{}, phi, opts);
}

// ---------------------------------------------------------------------------
// LPAD selection semantics

namespace {

struct LPADDense {
    std::vector<Atom> atoms;
    std::unordered_map<Atom, int, AtomHash> index;
    std::vector<int> order;  // evaluation order (topological over the union graph)
    // Per clause: body literal codes and head atom ids per option.
    struct DClause {
        std::vector<int> lits;
        std::vector<int> heads;
    };
    std::vector<DClause> clauses;
    std::vector<std::vector<std::pair<int, int>>> producers;  // atom -> (clause, option)
};

LPADDense build_lpad(const LPADProgram& lp) {
    LPADDense d;
    Digraph dep;
    auto intern = [&](Atom a) {
        auto it = d.index.find(a);
        if (it != d.index.end()) return it->second;
        int id = static_cast<int>(d.atoms.size());
        d.atoms.push_back(a);
        d.index.emplace(a, id);
        return id;
    };
    for (const auto& rc : lp.clauses) {
        LPADDense::DClause dc;
        for (const auto& l : rc.body) {
            dep.add_vertex(l.atom);
            dc.lits.push_back(CompiledProgram::lit_of(intern(l.atom), l.positive));
        }
        for (const auto& h : rc.heads) {
            dep.add_vertex(h.atom);
            for (const auto& l : rc.body) dep.add_edge(l.atom, h.atom, l.positive);
            dc.heads.push_back(intern(h.atom));
        }
        d.clauses.push_back(std::move(dc));
    }
    auto order = dep.topological_order();
    if (!order) throw validation_error("LPAD union dependency graph is cyclic");
    for (Atom a : *order) d.order.push_back(d.index.at(a));

    d.producers.resize(d.atoms.size());
    for (std::size_t k = 0; k < d.clauses.size(); ++k)
        for (std::size_t i = 0; i < d.clauses[k].heads.size(); ++i)
            d.producers[d.clauses[k].heads[i]].emplace_back(static_cast<int>(k),
                                                            static_cast<int>(i));
    return d;
}

// Supported model of P^sigma, optionally with clamps.
void eval_selection(const LPADDense& d, const std::vector<int>& sigma,
                    const std::vector<std::pair<int, bool>>& clamps, std::vector<char>& vals) {
    std::vector<char> clamped(d.atoms.size(), 0);
    for (auto [idx, v] : clamps) clamped[idx] = 1;
    for (int a : d.order) {
        if (clamped[a]) {
            for (auto [idx, v] : clamps)
                if (idx == a) vals[a] = v;
            continue;
        }
        char truth = 0;
        for (auto [k, i] : d.producers[a]) {
            if (sigma[k] != i) continue;
            bool ok = true;
            for (int l : d.clauses[k].lits)
                if (static_cast<bool>(vals[CompiledProgram::lit_atom(l)]) !=
                    CompiledProgram::lit_positive(l)) {
                    ok = false;
                    break;
                }
            if (ok) {
                truth = 1;
                break;
            }
        }
        vals[a] = truth;
    }
}

template <typename Weight>
struct LPADAccumulator {
    Weight num = 0, den = 0;
};

template <typename Weight>
void enumerate_selections(const LPADProgram& lp, const LPADDense& d,
                          const std::vector<std::pair<int, bool>>& clamps,
                          const std::vector<Goal>& ev_goals, const std::vector<Goal>& phi_goals,
                          std::size_t k, Weight weight, std::vector<int>& sigma,
                          LPADAccumulator<Weight>& acc) {
    if (weight == 0) return;  // zero-mass branch, nothing to add
    if (k == lp.clauses.size()) {
        std::vector<char> factual(d.atoms.size(), 0), twisted(d.atoms.size(), 0);
        eval_selection(d, sigma, {}, factual);
        if (!satisfied(ev_goals, factual)) return;
        acc.den += weight;
        eval_selection(d, sigma, clamps, twisted);
        if (satisfied(phi_goals, twisted)) acc.num += weight;
        return;
    }
    const LPADClause& rc = lp.clauses[k];
    Weight rest = 1;
    for (std::size_t i = 0; i < rc.heads.size(); ++i) {
        Weight pi;
        if constexpr (std::is_same_v<Weight, Rational>) {
            pi = *rc.heads[i].prob.exact;
        } else {
            pi = rc.heads[i].prob.value;
        }
        rest -= pi;
        sigma[k] = static_cast<int>(i);
        enumerate_selections(lp, d, clamps, ev_goals, phi_goals, k + 1, Weight(weight * pi),
                             sigma, acc);
    }
    // Explicit bottom branch even when the head mass sums to one.
    if (rest < 0) rest = 0;
    sigma[k] = -1;
    enumerate_selections(lp, d, clamps, ev_goals, phi_goals, k + 1, Weight(weight * rest), sigma,
                         acc);
}

template <typename Weight>
Weight lpad_sum(const LPADProgram& lp, const Intervention& fix, const EvidenceSet& ev,
                const Formula& phi, const OracleOptions& opts) {
    lp.validate();
    if (lp.clauses.size() > opts.max_lpad_clauses)
        throw resource_error("selection oracle refused: " + std::to_string(lp.clauses.size()) +
                             " clauses exceed the limit of " +
                             std::to_string(opts.max_lpad_clauses));
    LPADDense d = build_lpad(lp);
    auto lookup = [&](Atom a) {
        auto it = d.index.find(a);
        if (it == d.index.end())
            throw validation_error("unknown atom '" + a.name() + "'");
        return it->second;
    };
    std::vector<Goal> ev_goals, phi_goals;
    for (const auto& [a, v] : ev.assignments) ev_goals.push_back({lookup(a), v});
    for (const auto& l : phi.literals) phi_goals.push_back({lookup(l.atom), l.positive});
    std::vector<std::pair<int, bool>> clamps;
    for (const auto& [a, v] : fix.assignments) clamps.emplace_back(lookup(a), v);
    std::sort(clamps.begin(), clamps.end());

    std::vector<int> sigma(lp.clauses.size(), -1);
    LPADAccumulator<Weight> acc;
    enumerate_selections<Weight>(lp, d, clamps, ev_goals, phi_goals, 0, 1, sigma, acc);
    if (acc.den == 0) throw zero_evidence_error(0.0);
    return acc.num / acc.den;
}

bool lpad_all_exact(const LPADProgram& lp) {
    for (const auto& rc : lp.clauses)
        for (const auto& h : rc.heads)
            if (!h.prob.exact) return false;
    return true;
}

}  // namespace

double lpad_counterfactual(const LPADProgram& lp, const Intervention& fix, const EvidenceSet& ev,
                           const Formula& phi, const OracleOptions& opts) {
    if (lpad_all_exact(lp)) return lpad_sum<Rational>(lp, fix, ev, phi, opts).get_d();
    return lpad_sum<double>(lp, fix, ev, phi, opts);
}

Rational lpad_counterfactual_exact(const LPADProgram& lp, const Intervention& fix,
                                   const EvidenceSet& ev, const Formula& phi,
                                   const OracleOptions& opts) {
    if (!lpad_all_exact(lp))
        throw validation_error("exact selection oracle requires rational probabilities");
    return lpad_sum<Rational>(lp, fix, ev, phi, opts);
}

}  // namespace cfl

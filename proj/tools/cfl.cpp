// cfl: counterfactual inference over ground probabilistic logic programs.
//
// Subcommands: validate, transform, query, dsep, graph, bench gen/run/summary.
// Exit codes: 0 ok, 2 parse/validation, 3 bad intervention, 4 zero-probability
// evidence, 5 evidence-placement guard, 6 resource guard.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cfl/bench.hpp"
#include "cfl/errors.hpp"
#include "cfl/graph.hpp"
#include "cfl/inference.hpp"
#include "cfl/naming.hpp"
#include "cfl/oracle.hpp"
#include "cfl/parse.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cfl::validation_error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Splits "a=true,r(v3,v4)=false" respecting parentheses.
std::vector<std::string> split_top_level(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(0, 1);
    return s;
}

// Accepts "atom", "atom=true", "atom=false"; a trailing apostrophe names
// the counterfactual copy (d' -> d__cf).
std::pair<cfl::Atom, bool> parse_assignment(const std::string& text, bool default_value) {
    std::string name = trim(text);
    bool value = default_value;
    auto eq = name.rfind('=');
    if (eq != std::string::npos) {
        std::string v = trim(name.substr(eq + 1));
        name = trim(name.substr(0, eq));
        if (v == "true") value = true;
        else if (v == "false") value = false;
        else throw cfl::validation_error("expected true/false in '" + text + "'");
    }
    if (!name.empty() && name.back() == '\'')
        name = cfl::primed_atom(cfl::Atom::intern(name.substr(0, name.size() - 1))).name();
    if (name.empty()) throw cfl::validation_error("empty atom in '" + text + "'");
    return {cfl::Atom::intern(name), value};
}

cfl::Assignment parse_assignments(const std::string& flag) {
    cfl::Assignment out;
    for (const auto& part : split_top_level(flag)) {
        auto [atom, value] = parse_assignment(part, true);
        if (!out.emplace(atom, value).second)
            throw cfl::validation_error("atom '" + atom.name() + "' assigned twice");
    }
    return out;
}

struct QueryInputs {
    cfl::Program program;
    cfl::Intervention intervention;
    cfl::EvidenceSet evidence;
    cfl::Formula query;
};

QueryInputs gather_inputs(const std::string& path, const std::string& fix_flag,
                          const std::string& do_flag, const std::string& evidence_flag,
                          const std::string& query_flag, bool implicit_false) {
    cfl::ParseOptions popts;
    popts.implicit_false = implicit_false;
    cfl::ParseResult parsed = cfl::parse_with_directives(slurp(path), popts);

    QueryInputs in;
    in.program = std::move(parsed.program);

    if (!fix_flag.empty() || !do_flag.empty()) {
        if (!fix_flag.empty())
            for (const auto& [a, v] : parse_assignments(fix_flag))
                in.intervention.assignments.emplace(a, v);
        if (!do_flag.empty())
            for (const auto& [a, v] : parse_assignments(do_flag))
                in.intervention.assignments.emplace(a, v);
    } else {
        for (const auto& [a, v] : parsed.directives.fixes)
            in.intervention.assignments.emplace(a, v);
        for (const auto& [a, v] : parsed.directives.dos)
            in.intervention.assignments.emplace(a, v);
    }

    if (!evidence_flag.empty()) {
        for (const auto& [a, v] : parse_assignments(evidence_flag))
            in.evidence.assignments.emplace(a, v);
    } else {
        for (const auto& [a, v] : parsed.directives.evidence)
            in.evidence.assignments.emplace(a, v);
    }

    std::vector<cfl::Literal> lits;
    if (!query_flag.empty()) {
        for (const auto& part : split_top_level(query_flag)) {
            auto [atom, value] = parse_assignment(part, true);
            lits.emplace_back(atom, value);
        }
    } else {
        for (cfl::Atom a : parsed.directives.queries) lits.push_back(cfl::pos(a));
    }
    in.query = cfl::Formula(std::move(lits));
    return in;
}

int cmd_validate(const std::string& path, bool implicit_false) {
    cfl::ParseOptions popts;
    popts.implicit_false = implicit_false;
    cfl::Program p = cfl::parse_program(slurp(path), popts);
    std::size_t internal = p.all_atoms().size() - p.facts.size();
    std::printf("ok: %zu fact%s, %zu clause%s", p.facts.size(), p.facts.size() == 1 ? "" : "s",
                p.clauses.size(), p.clauses.size() == 1 ? "" : "s");
    if (!p.clauses.empty()) std::printf(", L_max=%zu", p.max_body_len());
    std::printf("\n");
    std::printf("atoms: %zu (%zu external, %zu internal)\n", p.all_atoms().size(),
                p.facts.size(), internal);
    return 0;
}

int cmd_transform(const std::string& path, const std::string& method, const std::string& fix_flag,
                  const std::string& do_flag, const std::string& out_path, bool do_simplify,
                  bool literal_alg1, bool implicit_false) {
    QueryInputs in = gather_inputs(path, fix_flag, do_flag, "", "", implicit_false);

    cfl::Program result;
    cfl::TransformStats stats;
    if (method == "swip") {
        auto s = cfl::swift(in.program, in.intervention);
        result = std::move(s.program);
        stats = s.stats;
    } else if (method == "twin") {
        auto t = cfl::construct_twin(in.program, in.intervention,
                                     literal_alg1 ? cfl::TwinMode::literal : cfl::TwinMode::shared);
        result = std::move(t.program);
        stats = t.stats;
    } else {
        throw cfl::validation_error("unknown method '" + method + "' (expected swip|twin)");
    }
    if (do_simplify) {
        cfl::AtomSet keep;
        for (const auto& f : result.facts) keep.insert(f.atom);
        for (const auto& c : result.clauses) keep.insert(c.head);
        result = cfl::simplify(result, keep);
    }
    if (out_path.empty() || out_path == "-") {
        std::cout << cfl::print_program(result);
    } else {
        std::ofstream out(out_path);
        out << cfl::print_program(result);
    }
    std::printf("{\"clauses_visited\": %zu, \"literals_rewritten\": %zu, \"output_size\": %zu}\n",
                stats.clauses_visited, stats.literals_rewritten, stats.output_size);
    return 0;
}

int cmd_query(const std::string& path, const std::string& method, const std::string& backend_flag,
              const std::string& fix_flag, const std::string& do_flag,
              const std::string& evidence_flag, const std::string& query_flag, bool json_out,
              bool no_simplify, bool literal_alg4, bool literal_alg1, bool implicit_false,
              double timeout_s) {
    QueryInputs in =
        gather_inputs(path, fix_flag, do_flag, evidence_flag, query_flag, implicit_false);
    if (in.query.empty())
        throw cfl::validation_error("no query: pass --query or add a query(...) directive");

    cfl::QueryOptions qopts;
    qopts.backend = cfl::backend_from_string(backend_flag);
    qopts.simplify = !no_simplify;
    qopts.literal_alg4 = literal_alg4;
    qopts.twin_mode = literal_alg1 ? cfl::TwinMode::literal : cfl::TwinMode::shared;
    if (timeout_s > 0) {
        qopts.circuit.has_deadline = true;
        qopts.circuit.deadline = std::chrono::steady_clock::now() +
                                 std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                     std::chrono::duration<double>(timeout_s));
    }

    auto t0 = std::chrono::steady_clock::now();
    double prob = 0.0;
    if (method == "swip") {
        prob = cfl::evaluate_swip_query(in.program, in.intervention, in.evidence, in.query, qopts);
    } else if (method == "twin") {
        prob = cfl::evaluate_twin_query(in.program, in.intervention, in.evidence, in.query, qopts);
    } else if (method == "oracle") {
        prob = cfl::oracle_counterfactual(in.program, in.intervention, in.evidence, in.query);
    } else {
        throw cfl::validation_error("unknown method '" + method + "' (expected swip|twin|oracle)");
    }
    double elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    if (json_out) {
        cfl::ResultRecord rec;
        rec.instance = path;
        rec.method = method;
        rec.backend = method == "oracle" ? "enum" : backend_flag;
        rec.inference_ms = elapsed_ms;
        rec.program_size = in.program.size();
        rec.tw_estimate = cfl::treewidth_estimate(cfl::primal_graph(in.program));
        rec.probability = prob;
        std::cout << cfl::to_json(rec) << "\n";
    } else {
        std::printf("%.10g\n", prob);
    }
    return 0;
}

int cmd_dsep(const std::string& path, const std::string& method, const std::string& fix_flag,
             const std::string& do_flag, const std::string& x_flag, const std::string& y_flag,
             const std::string& given_flag, bool implicit_false) {
    QueryInputs in = gather_inputs(path, fix_flag, do_flag, "", "", implicit_false);
    cfl::Atom x = parse_assignment(x_flag, true).first;
    cfl::Atom y = parse_assignment(y_flag, true).first;
    cfl::AtomSet given;
    if (!given_flag.empty())
        for (const auto& part : split_top_level(given_flag))
            given.insert(parse_assignment(part, true).first);

    cfl::Digraph g;
    if (method == "twin") {
        auto t = cfl::construct_twin(in.program, in.intervention);
        g = cfl::dependency_graph(t.program);
    } else if (method == "swip") {
        if (in.intervention.empty()) {
            g = cfl::dependency_graph(in.program);
        } else {
            auto s = cfl::swift(in.program, in.intervention);
            cfl::AtomSet keep{x, y};
            for (cfl::Atom a : given) keep.insert(a);
            for (const auto& f : s.program.facts) keep.insert(f.atom);
            cfl::Program reduced = cfl::simplify(s.program, keep);
            g = cfl::dependency_graph(reduced);
        }
    } else {
        throw cfl::validation_error("unknown method '" + method + "' (expected swip|twin)");
    }
    bool sep = !g.has_vertex(x) || !g.has_vertex(y) || cfl::d_separated(g, x, y, given);
    std::printf("%s\n", sep ? "yes" : "no");
    return 0;
}

int cmd_graph(const std::string& path, const std::string& kind, const std::string& fix_flag,
              const std::string& do_flag, bool implicit_false) {
    QueryInputs in = gather_inputs(path, fix_flag, do_flag, "", "", implicit_false);
    if (kind == "dep") {
        std::cout << cfl::dependency_graph(in.program).to_dot();
    } else if (kind == "primal") {
        std::cout << cfl::primal_graph(in.program).to_dot();
    } else if (kind == "swig") {
        std::cout << cfl::swig(in.program, in.intervention).to_dot();
    } else if (kind == "twin") {
        auto t = cfl::construct_twin(in.program, in.intervention);
        std::cout << cfl::dependency_graph(t.program).to_dot();
    } else {
        throw cfl::validation_error("unknown graph kind '" + kind +
                                    "' (expected dep|primal|swig|twin)");
    }
    return 0;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    for (const auto& part : split_top_level(s)) out.push_back(std::stoi(part));
    return out;
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& s) {
    auto dots = s.find("..");
    if (dots == std::string::npos) {
        std::uint64_t v = std::stoull(s);
        return {v, v};
    }
    return {std::stoull(s.substr(0, dots)), std::stoull(s.substr(dots + 2))};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"counterfactual inference for ground probabilistic logic programs"};
    app.require_subcommand(1);

    std::string path, method = "swip", backend = "circuit", fix_flag, do_flag, evidence_flag,
                query_flag, out_path, x_flag, y_flag, given_flag, graph_kind = "dep";
    bool implicit_false = false, json_out = false, do_simplify = false, no_simplify = false,
         literal_alg4 = false, literal_alg1 = false;
    double timeout_s = 0.0;

    auto* validate = app.add_subcommand("validate", "parse and check a program file");
    validate->add_option("file", path)->required();
    validate->add_flag("--implicit-false", implicit_false,
                       "declare body-only atoms as probability-0 facts");

    auto* transform = app.add_subcommand("transform", "apply a counterfactual transformation");
    transform->add_option("file", path)->required();
    transform->add_option("--method", method, "swip|twin")->required();
    transform->add_option("--fix", fix_flag, "fix list, e.g. \"b=true,c=false\"");
    transform->add_option("--do", do_flag, "do list (same payload as --fix)");
    transform->add_option("--out,-o", out_path, "output file ('-' = stdout)");
    transform->add_flag("--simplify", do_simplify, "run structural simplification");
    transform->add_flag("--literal-alg1", literal_alg1,
                        "reproduce the published twin construction verbatim");
    transform->add_flag("--implicit-false", implicit_false);

    auto* query = app.add_subcommand("query", "evaluate a counterfactual query");
    query->add_option("file", path)->required();
    query->add_option("--method", method, "swip|twin|oracle");
    query->add_option("--backend", backend, "enum|circuit");
    query->add_option("--fix", fix_flag);
    query->add_option("--do", do_flag);
    query->add_option("--evidence", evidence_flag, "e.g. \"d=true,b=false\"");
    query->add_option("--query", query_flag, "e.g. \"d\" or \"d=true,c=false\"");
    query->add_flag("--json", json_out, "print the full result record as JSON");
    query->add_flag("--no-simplify", no_simplify, "skip simplification in the SWIP pipeline");
    query->add_flag("--literal-alg4", literal_alg4,
                    "condition inside the transformed program without the placement guard");
    query->add_flag("--literal-alg1", literal_alg1);
    query->add_option("--timeout", timeout_s, "seconds (0 = none)");
    query->add_flag("--implicit-false", implicit_false);

    auto* dsep = app.add_subcommand("dsep", "d-separation on the transformed dependency graph");
    dsep->add_option("file", path)->required();
    dsep->add_option("--method", method, "swip|twin");
    dsep->add_option("--fix", fix_flag);
    dsep->add_option("--do", do_flag);
    dsep->add_option("--x", x_flag)->required();
    dsep->add_option("--y", y_flag, "atom; trailing ' names the counterfactual copy")->required();
    dsep->add_option("--given", given_flag, "conditioning atoms");
    dsep->add_flag("--implicit-false", implicit_false);

    auto* graph = app.add_subcommand("graph", "export a graph view as DOT");
    graph->add_option("file", path)->required();
    graph->add_option("--type", graph_kind, "dep|primal|swig|twin");
    graph->add_option("--fix", fix_flag);
    graph->add_option("--do", do_flag);
    graph->add_flag("--implicit-false", implicit_false);

    auto* bench = app.add_subcommand("bench", "benchmark instance generation and runs");
    bench->require_subcommand(1);

    std::string bench_dir = "bench_out", csv_path = "results.csv", ns_flag = "20,40,80",
                ks_flag = "2,4,8", seeds_flag = "1..10", methods_flag = "swip,twin";
    int queries_per_instance = 2;
    double bench_timeout = 60.0;

    auto* gen = bench->add_subcommand("gen", "generate instance directories");
    gen->add_option("--out", bench_dir, "output directory");
    gen->add_option("--n", ns_flag, "tree sizes, comma separated");
    gen->add_option("--k", ks_flag, "dense layer sizes, comma separated");
    gen->add_option("--seeds", seeds_flag, "seed range lo..hi");
    gen->add_option("--queries", queries_per_instance, "queries per instance");

    auto* run = bench->add_subcommand("run", "execute instances and write a CSV");
    run->add_option("--dir", bench_dir, "instance directory (from bench gen)");
    run->add_option("--methods", methods_flag, "comma separated: swip,twin,oracle");
    run->add_option("--backend", backend, "enum|circuit");
    run->add_option("--timeout", bench_timeout, "per-query wall clock limit, seconds");
    run->add_option("--out", csv_path, "CSV output path");

    auto* summary = bench->add_subcommand("summary", "paired swip/twin statistics from a CSV");
    summary->add_option("--csv", csv_path, "CSV produced by bench run");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(path, implicit_false);
        if (transform->parsed())
            return cmd_transform(path, method, fix_flag, do_flag, out_path, do_simplify,
                                 literal_alg1, implicit_false);
        if (query->parsed())
            return cmd_query(path, method, backend, fix_flag, do_flag, evidence_flag, query_flag,
                             json_out, no_simplify, literal_alg4, literal_alg1, implicit_false,
                             timeout_s);
        if (dsep->parsed())
            return cmd_dsep(path, method, fix_flag, do_flag, x_flag, y_flag, given_flag,
                            implicit_false);
        if (graph->parsed()) return cmd_graph(path, graph_kind, fix_flag, do_flag, implicit_false);
        if (bench->parsed()) {
            if (gen->parsed()) {
                cfl::BenchGenOptions opts;
                opts.ns = parse_int_list(ns_flag);
                opts.ks = parse_int_list(ks_flag);
                std::tie(opts.seed_lo, opts.seed_hi) = parse_seed_range(seeds_flag);
                opts.queries_per_instance = queries_per_instance;
                if (const char* env_seed = std::getenv("CFL_SEED"))
                    opts.seed_lo = opts.seed_hi = std::stoull(env_seed);
                auto dirs = cfl::bench_generate(bench_dir, opts);
                std::printf("generated %zu instances under %s\n", dirs.size(), bench_dir.c_str());
                return 0;
            }
            if (run->parsed()) {
                cfl::BenchRunOptions opts;
                opts.methods.clear();
                for (const auto& m : split_top_level(methods_flag)) opts.methods.push_back(m);
                opts.backend = cfl::backend_from_string(backend);
                opts.timeout_s = bench_timeout;
                if (const char* env_workers = std::getenv("CFL_WORKERS"))
                    opts.workers = std::max(1, std::atoi(env_workers));
                std::vector<std::string> dirs;
                for (const auto& entry : std::filesystem::directory_iterator(bench_dir))
                    if (entry.is_directory() &&
                        std::filesystem::exists(entry.path() / "manifest.json"))
                        dirs.push_back(entry.path().string());
                std::sort(dirs.begin(), dirs.end());
                if (dirs.empty())
                    throw cfl::validation_error("no instances found under '" + bench_dir + "'");
                auto rows = cfl::bench_run(dirs, opts, csv_path);
                auto s = cfl::summarize(rows);
                std::printf("ran %zu cells; %zu paired queries, swip<=twin on %zu, "
                            "median time ratio %.3f, median size ratio %.3f, "
                            "%zu timeouts, %zu errors\n",
                            rows.size(), s.pairs, s.swip_not_slower, s.median_time_ratio,
                            s.median_size_ratio, s.timeouts, s.errors);
                return 0;
            }
            if (summary->parsed()) {
                auto rows = cfl::read_csv(csv_path);
                auto s = cfl::summarize(rows);
                std::printf("pairs: %zu\n", s.pairs);
                std::printf("swip_total<=twin_total: %zu (%.1f%%)\n", s.swip_not_slower,
                            s.pairs ? 100.0 * s.swip_not_slower / s.pairs : 0.0);
                std::printf("median_time_ratio: %.4f\n", s.median_time_ratio);
                std::printf("median_size_ratio: %.4f\n", s.median_size_ratio);
                std::printf("max_probability_gap: %.3g\n", s.max_probability_gap);
                std::printf("timeouts: %zu, errors: %zu\n", s.timeouts, s.errors);
                return 0;
            }
        }
    } catch (const cfl::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

#include "cfl/bench.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "cfl/errors.hpp"
#include "cfl/oracle.hpp"
#include "cfl/parse.hpp"

namespace cfl {

namespace fs = std::filesystem;
using json = nlohmann::json;
using clock_type = std::chrono::steady_clock;

namespace {

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

std::string format_probability(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", p);
    return buf;
}

}  // namespace

std::string csv_header() {
    return "instance,n,k,seed,method,backend,transform_ms,inference_ms,size,tw_estimate,"
           "probability,status";
}

std::string to_csv_row(const ResultRecord& r) {
    std::ostringstream os;
    os << r.instance << ',' << r.n << ',' << r.k << ',' << r.seed << ',' << r.method << ','
       << r.backend << ',' << r.transform_ms << ',' << r.inference_ms << ',' << r.program_size
       << ',' << r.tw_estimate << ',' << format_probability(r.probability) << ',' << r.status;
    return os.str();
}

std::string to_json(const ResultRecord& r) {
    json j{{"instance", r.instance},
           {"n", r.n},
           {"k", r.k},
           {"seed", r.seed},
           {"method", r.method},
           {"backend", r.backend},
           {"transform_ms", r.transform_ms},
           {"inference_ms", r.inference_ms},
           {"program_size", r.program_size},
           {"tw_estimate", r.tw_estimate},
           {"probability", r.probability},
           {"status", r.status}};
    return j.dump();
}

ResultRecord run_query_case(const Program& p, const QuerySpec& spec, const std::string& method,
                            Backend backend, double timeout_s) {
    ResultRecord rec;
    rec.method = method;
    rec.backend = to_string(backend);
    rec.seed = spec.seed;

    Intervention iv;
    for (const auto& [a, v] : spec.interventions) iv.assignments.emplace(a, v);
    EvidenceSet ev;
    for (const auto& [a, v] : spec.evidence) ev.assignments.emplace(a, v);

    QueryOptions qopts;
    qopts.backend = backend;
    auto deadline = clock_type::now() +
                    std::chrono::duration_cast<clock_type::duration>(
                        std::chrono::duration<double>(timeout_s));
    qopts.circuit.has_deadline = true;
    qopts.circuit.deadline = deadline;

    try {
        if (method == "swip") {
            auto t0 = clock_type::now();
            Formula phi = spec.query;
            if (!iv.empty()) {
                // Evidence placement guard, as in the query evaluator.
                AtomSet fixed_set;
                for (const auto& [a, v] : iv.assignments) fixed_set.insert(a);
                AtomSet desc = descendants(dependency_graph(p), fixed_set);
                for (const auto& [e, v] : ev.assignments)
                    if (desc.count(e) || (fixed_set.count(e) && !p.is_fact_atom(e)))
                        throw evidence_placement_error(e, e, "evidence atom '" + e.name() +
                                                                 "' violates the guard");
                SwiftResult s = swift(p, iv);
                std::vector<Literal> lits;
                for (const auto& l : spec.query.literals) {
                    auto it = s.fixed_map.find(l.atom);
                    lits.emplace_back(it == s.fixed_map.end() ? l.atom : it->second, l.positive);
                }
                phi = Formula(std::move(lits));
                AtomSet keep = phi.atoms();
                for (const auto& [a, v] : ev.assignments) keep.insert(a);
                for (const auto& f : s.program.facts) keep.insert(f.atom);
                Program reduced = simplify(s.program, keep);
                rec.transform_ms = ms_since(t0);
                rec.program_size = reduced.size();
                rec.tw_estimate = treewidth_estimate(primal_graph(reduced));
                auto t1 = clock_type::now();
                rec.probability = conditional(reduced, phi, ev, qopts);
                rec.inference_ms = ms_since(t1);
            } else {
                rec.transform_ms = ms_since(t0);
                rec.program_size = p.size();
                rec.tw_estimate = treewidth_estimate(primal_graph(p));
                auto t1 = clock_type::now();
                rec.probability = conditional(p, phi, ev, qopts);
                rec.inference_ms = ms_since(t1);
            }
        } else if (method == "twin") {
            auto t0 = clock_type::now();
            TwinResult t = construct_twin(p, iv);
            rec.transform_ms = ms_since(t0);
            rec.program_size = t.program.size();
            rec.tw_estimate = treewidth_estimate(primal_graph(t.program));
            auto t1 = clock_type::now();
            double p1 = marginal(p, ev.as_formula(), qopts);
            if (p1 < 1e-300) throw zero_evidence_error(p1);
            std::vector<Literal> lits;
            for (const auto& l : spec.query.literals) {
                auto it = t.prime_map.find(l.atom);
                lits.emplace_back(it == t.prime_map.end() ? l.atom : it->second, l.positive);
            }
            auto conj = Formula(std::move(lits)).conjoin(ev.as_formula());
            rec.probability = conj ? marginal(t.program, *conj, qopts) / p1 : 0.0;
            rec.inference_ms = ms_since(t1);
        } else if (method == "oracle") {
            rec.program_size = p.size();
            rec.tw_estimate = treewidth_estimate(primal_graph(p));
            auto t1 = clock_type::now();
            rec.probability = oracle_counterfactual(p, iv, ev, spec.query);
            rec.inference_ms = ms_since(t1);
        } else {
            throw validation_error("unknown method '" + method + "'");
        }
    } catch (const timeout_error&) {
        rec.status = "timeout";
        rec.probability = 0.0;
        rec.inference_ms = timeout_s * 1000.0;  // cap convention for timed-out queries
    } catch (const error& e) {
        rec.status = "error:" + std::to_string(static_cast<int>(e.code()));
        rec.probability = 0.0;
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Instance files

std::vector<std::string> bench_generate(const std::string& out_dir, const BenchGenOptions& opts) {
    std::vector<std::string> dirs;
    fs::create_directories(out_dir);
    for (int n : opts.ns)
        for (int k : opts.ks)
            for (std::uint64_t seed = opts.seed_lo; seed <= opts.seed_hi; ++seed) {
                BenchGraph bg = generate_dag(n, k, seed);
                Program p = emit_program(bg);
                std::string name = "n" + std::to_string(n) + "_k" + std::to_string(k) + "_s" +
                                   std::to_string(seed);
                fs::path dir = fs::path(out_dir) / name;
                fs::create_directories(dir);
                {
                    std::ofstream out(dir / "program.pl");
                    out << print_program(p);
                }
                json manifest{{"n", n}, {"k", k}, {"seed", seed},
                              {"swip_safe", opts.swip_safe}, {"queries", json::array()}};
                for (int q = 0; q < opts.queries_per_instance; ++q) {
                    std::uint64_t qseed = seed * 1000003ull + static_cast<std::uint64_t>(q);
                    std::mt19937_64 qrng(qseed);
                    int n_int = 1 + static_cast<int>(qrng() % static_cast<std::uint64_t>(
                                                                 opts.max_interventions));
                    int n_ev = static_cast<int>(qrng() %
                                                static_cast<std::uint64_t>(opts.max_evidence + 1));
                    QuerySpec spec;
                    for (;;) {
                        try {
                            spec = sample_query(bg, n_ev, n_int, qseed, opts.swip_safe);
                            break;
                        } catch (const validation_error&) {
                            // Degrade gracefully on tiny instances.
                            if (n_ev > 0) --n_ev;
                            else if (n_int > 1) --n_int;
                            else throw;
                        }
                    }
                    Directives d;
                    d.queries.push_back(spec.query.literals.front().atom);
                    for (const auto& [a, v] : spec.evidence) d.evidence.emplace_back(a, v);
                    for (const auto& [a, v] : spec.interventions) {
                        d.fixes.emplace_back(a, v);
                        d.dos.emplace_back(a, v);
                    }
                    std::ofstream qf(dir / ("query_" + std::to_string(q) + ".pl"));
                    qf << print_directives(d);
                    manifest["queries"].push_back(
                        {{"seed", qseed}, {"n_ev", n_ev}, {"n_int", n_int}});
                }
                std::ofstream mf(dir / "manifest.json");
                mf << manifest.dump(2) << "\n";
                dirs.push_back(dir.string());
            }
    return dirs;
}

BenchInstance load_instance(const std::string& dir) {
    BenchInstance inst;
    inst.dir = dir;
    {
        std::ifstream mf(fs::path(dir) / "manifest.json");
        if (!mf) throw validation_error("missing manifest.json in " + dir);
        json manifest = json::parse(mf);
        inst.n = manifest.at("n").get<int>();
        inst.k = manifest.at("k").get<int>();
        inst.seed = manifest.at("seed").get<std::uint64_t>();
    }
    {
        std::ifstream pf(fs::path(dir) / "program.pl");
        if (!pf) throw validation_error("missing program.pl in " + dir);
        std::stringstream ss;
        ss << pf.rdbuf();
        inst.program = parse_program(ss.str());
    }
    for (int q = 0;; ++q) {
        fs::path qp = fs::path(dir) / ("query_" + std::to_string(q) + ".pl");
        if (!fs::exists(qp)) break;
        std::ifstream qf(qp);
        std::stringstream ss;
        ss << qf.rdbuf();
        Directives d = parse_with_directives(ss.str()).directives;
        QuerySpec spec;
        spec.seed = inst.seed;
        std::vector<Literal> lits;
        for (Atom a : d.queries) lits.push_back(pos(a));
        spec.query = Formula(std::move(lits));
        for (const auto& [a, v] : d.evidence) spec.evidence.emplace_back(a, v);
        const auto& ivs = d.fixes.empty() ? d.dos : d.fixes;
        for (const auto& [a, v] : ivs) spec.interventions.emplace_back(a, v);
        inst.queries.push_back(std::move(spec));
    }
    return inst;
}

std::vector<ResultRecord> bench_run(const std::vector<std::string>& instance_dirs,
                                    const BenchRunOptions& opts, const std::string& csv_path) {
    struct Cell {
        std::size_t instance_idx;
        std::size_t query_idx;
        std::string method;
    };
    std::vector<BenchInstance> instances;
    for (const auto& dir : instance_dirs) instances.push_back(load_instance(dir));

    std::vector<Cell> cells;
    for (std::size_t i = 0; i < instances.size(); ++i)
        for (std::size_t q = 0; q < instances[i].queries.size(); ++q)
            for (const auto& m : opts.methods) cells.push_back({i, q, m});

    std::vector<ResultRecord> rows(cells.size());
    std::ofstream csv;
    std::mutex csv_mutex;
    if (!csv_path.empty()) {
        csv.open(csv_path);
        csv << csv_header() << "\n";
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& cell = cells[i];
            const BenchInstance& inst = instances[cell.instance_idx];
            ResultRecord rec = run_query_case(inst.program, inst.queries[cell.query_idx],
                                              cell.method, opts.backend, opts.timeout_s);
            rec.instance = fs::path(inst.dir).filename().string() + "/q" +
                           std::to_string(cell.query_idx);
            rec.n = inst.n;
            rec.k = inst.k;
            rec.seed = inst.seed;
            rows[i] = rec;
            if (csv.is_open()) {
                std::lock_guard<std::mutex> lock(csv_mutex);
                csv << to_csv_row(rec) << "\n";
                csv.flush();
            }
        }
    };

    int workers = std::max(1, opts.workers);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return rows;
}

BenchSummary summarize(const std::vector<ResultRecord>& rows) {
    BenchSummary s;
    std::unordered_map<std::string, const ResultRecord*> swip, twin;
    for (const auto& r : rows) {
        if (r.status == "timeout") ++s.timeouts;
        else if (r.status != "ok") ++s.errors;
        if (r.method == "swip") swip[r.instance] = &r;
        else if (r.method == "twin") twin[r.instance] = &r;
    }
    std::vector<double> time_ratios, size_ratios;
    for (const auto& [inst, sr] : swip) {
        auto it = twin.find(inst);
        if (it == twin.end()) continue;
        const ResultRecord* tr = it->second;
        // Timeouts participate at the cap, mirroring the convention of
        // assigning the limit to censored runs.
        bool usable = (sr->status == "ok" || sr->status == "timeout") &&
                      (tr->status == "ok" || tr->status == "timeout");
        if (!usable) continue;
        double st = sr->transform_ms + sr->inference_ms;
        double tt = tr->transform_ms + tr->inference_ms;
        ++s.pairs;
        if (st <= tt) ++s.swip_not_slower;
        if (tt > 0) time_ratios.push_back(st / tt);
        if (tr->program_size > 0)
            size_ratios.push_back(static_cast<double>(sr->program_size) /
                                  static_cast<double>(tr->program_size));
        if (sr->status == "ok" && tr->status == "ok")
            s.max_probability_gap =
                std::max(s.max_probability_gap, std::fabs(sr->probability - tr->probability));
    }
    auto median = [](std::vector<double>& v) {
        if (v.empty()) return 0.0;
        std::sort(v.begin(), v.end());
        std::size_t m = v.size() / 2;
        return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
    };
    s.median_time_ratio = median(time_ratios);
    s.median_size_ratio = median(size_ratios);
    return s;
}

std::vector<ResultRecord> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open CSV '" + path + "'");
    std::string line;
    std::getline(in, line);
    if (line != csv_header()) throw validation_error("unexpected CSV header in '" + path + "'");
    std::vector<ResultRecord> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> parts;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) parts.push_back(cell);
        if (parts.size() != 12) throw validation_error("malformed CSV row: " + line);
        ResultRecord r;
        r.instance = parts[0];
        r.n = std::stoi(parts[1]);
        r.k = std::stoi(parts[2]);
        r.seed = std::stoull(parts[3]);
        r.method = parts[4];
        r.backend = parts[5];
        r.transform_ms = std::stod(parts[6]);
        r.inference_ms = std::stod(parts[7]);
        r.program_size = std::stoull(parts[8]);
        r.tw_estimate = std::stoi(parts[9]);
        r.probability = std::stod(parts[10]);
        r.status = parts[11];
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace cfl

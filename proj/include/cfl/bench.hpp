#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cfl/benchgen.hpp"
#include "cfl/inference.hpp"

namespace cfl {

struct ResultRecord {
    std::string instance;
    int n = 0;
    int k = 0;
    std::uint64_t seed = 0;
    std::string method;   // swip | twin | oracle
    std::string backend;  // enum | circuit
    double transform_ms = 0.0;
    double inference_ms = 0.0;
    std::size_t program_size = 0;  // facts + clauses of the queried program
    int tw_estimate = 0;
    double probability = 0.0;
    std::string status = "ok";  // ok | timeout | error:<code>
};

// Header: instance,n,k,seed,method,backend,transform_ms,inference_ms,size,tw_estimate,probability,status
std::string csv_header();
std::string to_csv_row(const ResultRecord& r);
std::string to_json(const ResultRecord& r);  // keys mirror the field names

// Runs one (program, query, method) cell: transform and inference are
// timed separately, the wall-clock timeout is enforced cooperatively
// inside the circuit compiler, and failures land in `status` instead of
// escaping.
ResultRecord run_query_case(const Program& p, const QuerySpec& spec, const std::string& method,
                            Backend backend, double timeout_s);

// On-disk instance layout: <dir>/program.pl, <dir>/query_<i>.pl,
// <dir>/manifest.json.
struct BenchInstance {
    std::string dir;
    int n = 0;
    int k = 0;
    std::uint64_t seed = 0;
    Program program;
    std::vector<QuerySpec> queries;
};

struct BenchGenOptions {
    std::vector<int> ns{20, 40, 80};
    std::vector<int> ks{2, 4, 8};
    std::uint64_t seed_lo = 1, seed_hi = 10;  // inclusive
    int queries_per_instance = 2;
    int max_evidence = 3;
    int max_interventions = 3;
    bool swip_safe = true;
};

// Writes instance directories under `out_dir`; returns their paths.
std::vector<std::string> bench_generate(const std::string& out_dir, const BenchGenOptions& opts);

BenchInstance load_instance(const std::string& dir);

struct BenchRunOptions {
    std::vector<std::string> methods{"swip", "twin"};
    Backend backend = Backend::circuit;
    double timeout_s = 60.0;
    int workers = 1;
};

// Executes every (instance x query x method) cell and appends CSV rows
// through a single writer. Returns all records.
std::vector<ResultRecord> bench_run(const std::vector<std::string>& instance_dirs,
                                    const BenchRunOptions& opts, const std::string& csv_path);

struct BenchSummary {
    std::size_t pairs = 0;
    std::size_t swip_not_slower = 0;  // total time swip <= twin
    double median_time_ratio = 0.0;   // swip total / twin total
    double median_size_ratio = 0.0;
    std::size_t timeouts = 0;
    std::size_t errors = 0;
    double max_probability_gap = 0.0;  // across ok/ok pairs
};

BenchSummary summarize(const std::vector<ResultRecord>& rows);
std::vector<ResultRecord> read_csv(const std::string& path);

}  // namespace cfl

#pragma once

#include <stdexcept>
#include <string>

namespace cfl {

// Exit-code families used by the CLI. Library code throws; the CLI maps
// code() to a process exit status.
enum class errc : int {
    parse      = 2,  // syntax, structural validation, cyclicity
    intervention = 3,  // unknown/empty intervention
    evidence   = 4,  // zero-probability evidence
    guard      = 5,  // SWIP evidence-placement guard
    resource   = 6,  // enumeration/width/node-budget limits
};

class error : public std::runtime_error {
public:
    error(errc c, const std::string& msg) : std::runtime_error(msg), code_(c) {}
    errc code() const { return code_; }

private:
    errc code_;
};

class parse_error : public error {
public:
    parse_error(int line, int col, const std::string& msg)
        : error(errc::parse, "parse error at " + std::to_string(line) + ":" +
                                 std::to_string(col) + ": " + msg),
          line_(line), col_(col) {}
    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

class validation_error : public error {
public:
    explicit validation_error(const std::string& msg) : error(errc::parse, msg) {}
};

class intervention_error : public error {
public:
    explicit intervention_error(const std::string& msg) : error(errc::intervention, msg) {}
};

// Evidence conjunction has probability zero (or underflows to it).
class zero_evidence_error : public error {
public:
    explicit zero_evidence_error(double p1)
        : error(errc::evidence, "evidence has probability " + std::to_string(p1)),
          evidence_probability_(p1) {}
    double evidence_probability() const { return evidence_probability_; }

private:
    double evidence_probability_;
};

class resource_error : public error {
public:
    explicit resource_error(const std::string& msg) : error(errc::resource, msg) {}
};

// Cooperative wall-clock cutoff (benchmark harness).
class timeout_error : public resource_error {
public:
    explicit timeout_error(const std::string& msg) : resource_error(msg) {}
};

}  // namespace cfl

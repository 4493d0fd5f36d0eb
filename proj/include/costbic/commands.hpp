#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "costbic/diagnostics.hpp"
#include "costbic/report.hpp"
#include "costbic/samplers.hpp"

namespace costbic {

inline constexpr const char* kVersion = "0.3.0";

struct CommonOptions {
    std::string data_path;
    std::string costs_path;
    PriorMode mode = PriorMode::cost_benefit;
    Method method = Method::laplace;
    bool standardize = false;
    int top_k = 10;
    std::string format = "json";  // json | csv
    std::string out;              // empty: report to stdout
};

struct EnumerateOptions : CommonOptions {};

struct SearchOptions : CommonOptions {
    std::string sampler = "mc3";  // mc3 | rjmcmc
    std::optional<long> iters;    // defaults: mc3 10000/1000, rjmcmc 100000/10000
    std::optional<long> burnin;
    int chains = 1;
    std::uint64_t seed = 0;
    double threshold = 0.3;
    StartModel start = StartModel::null_model;
    bool run_diagnostics = true;  // deviance + LS_CV for the top model
    long diag_draws = 5000;
};

struct ScoreOptions : CommonOptions {
    std::string model;  // "X1+X3+X46" or variable names
    std::uint64_t seed = 0;
    long draws = 10000;
    bool cv_exact = true;  // auto-disabled when n > 500
    bool cv_mcmc = true;
};

struct SimulateOptions {
    std::optional<std::string> spec_file;  // key=value lines; flags override
    int n = 500;
    int p = 6;
    std::vector<double> beta;     // length p+1; default all zero
    std::string corr = "none";    // none | equi | ar1
    double rho = 0.0;
    std::vector<double> costs;    // default all 0.5
    std::uint64_t seed = 0;
    std::string out = "synthetic";  // writes <out>_data.csv and <out>_costs.csv
};

struct CommandResult {
    RunReport report;
    // Extra artifacts keyed by filename suffix (visits.csv, marginals.csv,
    // trace.csv), written next to the report when --out is given.
    std::vector<std::pair<std::string, std::string>> extra_files;
};

CommandResult cmd_enumerate(const EnumerateOptions& opts);
CommandResult cmd_search(const SearchOptions& opts);
CommandResult cmd_score(const ScoreOptions& opts);
void cmd_simulate(const SimulateOptions& opts);

// Reads key=value lines (n, p, beta, corr, rho, costs, seed) over `opts`.
SimulateOptions apply_spec_file(SimulateOptions opts, const std::string& path);

// Renders the report in opts.format and writes it (plus extras) under the
// --out base path, or prints to stdout. Returns the rendered report.
std::string emit_result(const CommandResult& result, const std::string& format,
                        const std::string& out);

}  // namespace costbic

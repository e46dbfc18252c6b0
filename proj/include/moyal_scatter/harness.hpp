#pragma once

#include <map>

#include "moyal_scatter/config.hpp"
#include "moyal_scatter/fock.hpp"

namespace msc {

struct CheckResult {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

// Accumulated result of a subcommand pipeline.  to_json() is deterministic
// for a fixed config and seed (keys sorted, timings kept out of the report
// and written to a separate timings.json).
struct RunReport {
    RunConfig config;
    std::string subcommand;
    std::vector<CheckResult> checks;
    nlohmann::json details = nlohmann::json::object();
    std::vector<std::string> artifacts;  // files written under out_dir
    std::map<std::string, double> timings_s;

    void add_check(const std::string& name, double residual, double tolerance);
    bool all_passed() const;
    std::vector<std::string> failing() const;
    nlohmann::json to_json() const;
};

// Pipelines.  Each appends its checks, detail numbers, and artifact files
// (written under config.out_dir) to the report.
void run_star_check(const RunConfig& c, RunReport& rep);
void run_evolve(const RunConfig& c, RunReport& rep);
void run_scatter(const RunConfig& c, RunReport& rep);
void run_implementability(const RunConfig& c, int refine, RunReport& rep);
void run_bogoliubov(const RunConfig& c, RunReport& rep);
void run_fock_check(const RunConfig& c, RunReport& rep);
void run_lm_probe(const RunConfig& c, RunReport& rep);

// Executes one subcommand (star-check | evolve | scatter | implementability
// | bogoliubov | fock-check | lm-probe | all), writes report.json and
// timings.json under config.out_dir, and returns the report.
RunReport run_pipelines(const std::string& name, const RunConfig& c, int refine);

// Full CLI entry: run_pipelines plus persistence and exit-code mapping
// (0 ok, 1 failed checks, 3 I/O failure; schema errors are thrown as
// config_error before this point and map to 2 in the CLI).
int run_subcommand(const std::string& name, const RunConfig& c, int refine);

// Applies MOYAL_SCATTER_THREADS to the BLAS thread pool if set.
void apply_thread_env();

}  // namespace msc

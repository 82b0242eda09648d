#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ddlab/config.hpp"

namespace ddlab {

struct MetricRow {
    std::string test;
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
    std::size_t flagged = 0;
    bool pass = true;
};

// One experiment run: metric rows with their acceptance verdicts, the claim
// under test, and enough echo to reproduce the run byte-for-byte.
struct ExperimentReport {
    std::string experiment;
    std::string claim;
    std::vector<MetricRow> rows;
    bool passed = true;
    std::uint64_t seed = 0;
    std::string config_echo;
    // optional per-sample dumps: (filename, csv content)
    std::vector<std::pair<std::string, std::string>> artifacts;

    void add(MetricRow row);
};

ExperimentReport run_numeraire_test(const ExperimentConfig& cfg);
ExperimentReport run_growth(const ExperimentConfig& cfg);
ExperimentReport run_zeta_law(const ExperimentConfig& cfg);
ExperimentReport run_oscillation(const ExperimentConfig& cfg);
ExperimentReport run_drawdown_race(const ExperimentConfig& cfg);
ExperimentReport run_turnpike(const ExperimentConfig& cfg);
ExperimentReport run_selftest(const ExperimentConfig& cfg);

// Dispatch by CLI subcommand name; throws invalid_input for unknown names.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& name);

// Batch dump for the `simulate` subcommand.
void run_simulate(const ExperimentConfig& cfg, std::ostream& os);

void write_report_csv(const ExperimentReport& report, std::ostream& os);
std::string render_report_text(const ExperimentReport& report);
// Writes <experiment>_summary.csv, <experiment>_report.txt and any artifacts
// into out_dir (created if missing).
void write_report_files(const ExperimentReport& report, const std::string& out_dir);

}  // namespace ddlab

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ddlab/market.hpp"
#include "ddlab/path.hpp"

namespace ddlab {

// Flat key=value configuration for the CLI and experiment drivers.
// Unknown keys are rejected; every numeric field is validated on load.
struct ExperimentConfig {
    // model
    std::string preset = "custom";  // custom | gbm | dds
    int d = 1;
    std::vector<double> mu{0.2};
    std::vector<double> sigma{0.2};  // d rows separated by ';'
    std::vector<double> s0{1.0};
    double pinv_tol = 1e-10;

    // simulation
    double dt = 0.01;
    double t_max = 10.0;
    std::size_t n_paths = 1000;
    std::uint64_t seed = 42;

    // experiment
    double alpha = 0.5;
    double level = 1.0;  // l in the log-scale hitting time tau_l
    int threads = 1;
    std::size_t max_n = 12;   // cycles harvested per path
    double eps = 0.02;        // oscillation band width
    std::vector<std::size_t> n_list{1, 2, 3, 4, 5, 6};  // turnpike horizons
    std::string strategy = "baseline,buyhold,halfkelly";

    // output
    std::string out_dir = "out";
    bool dump_samples = false;

    void set(const std::string& key, const std::string& value);
    void validate() const;
    MarketModel build_model() const;
    TimeGrid build_grid() const;
    std::size_t n_steps() const;
    std::string echo() const;  // canonical rendering, reproducible byte-for-byte
};

ExperimentConfig load_config_file(const std::string& filename);
ExperimentConfig parse_config_text(const std::string& text);

}  // namespace ddlab

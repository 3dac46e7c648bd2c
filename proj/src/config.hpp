#pragma once

#include <string>
#include <vector>

#include "expression.hpp"
#include "weights.hpp"

namespace shum {

// Flat key=value experiment configuration. Raw strings are kept so CLI flags
// can override file values before anything is parsed into numbers.
struct ExperimentConfig {
    long N = 8;
    int K = 6;
    double T = 1.0;
    double delta = 0.25;
    double lambda = 2.0;
    double mu = 0.1;
    double C = 0.6;          // penalty rule eps = exp(-C/h)
    double eps = 0.0;        // > 0 overrides the rule with a fixed penalty
    double eps_T = 0.0;      // > 0 overrides exp(-C/h) for the observability term
    Interval G0{0.3, 0.8};
    Interval G1{0.4, 0.7};
    Interval G2{0.55, 0.65};
    double margin = 0.1;
    std::string a1_text = "1";
    std::string a2_text = "0.5";
    std::string y0_text = "sin(pi*x)";
    double tol = 1e-10;
    unsigned long seed = 42;
    long trials = 200;
    long t_samples = 9;
    long max_iter = 0;       // 0 picks a dimension-based default
    long workers = 0;        // 0 defers to SHUM_WORKERS, then hardware
    double lambda0 = 1.0;    // admissible-regime thresholds
    double eps0 = 1.0;
    double h0 = 1.0;
    std::vector<long> N_list = {7, 11, 15, 19};
    std::vector<double> T_list = {1.0};

    Expression a1_expr;      // filled by finalize_config
    Expression a2_expr;
    Expression y0_expr;

    double h() const { return 1.0 / static_cast<double>(N + 1); }
};

// Apply one key=value setting; `where` anchors error messages ("file.cfg:12"
// or "flag --N").
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                   const std::string& where);

// Parse a flat config file with # comments; errors cite path:line.
void load_config_file(ExperimentConfig& cfg, const std::string& path);

// Validate ranges and geometry, parse the coefficient expressions. Every run
// goes through this before touching the numerics.
void finalize_config(ExperimentConfig& cfg);

// Known keys, for the CLI to expose one flag per key.
const std::vector<std::string>& config_keys();

} // namespace shum

#pragma once

#include <vector>

#include "mesh.hpp"

namespace shum {

// Binary path tree for the driving Brownian increments: level k holds 2^k
// equally probable path prefixes; the step to child 2j is +√dt, to 2j+1 is −√dt.
struct NoiseTree {
    int K = 0;
    double T = 0.0;
    double dt = 0.0;
    double sqrt_dt = 0.0;
    long nodes_at(int level) const { return 1L << level; }
    long leaves() const { return 1L << K; }
    double t_at(int level) const { return level * dt; }
    double increment(long child) const { return (child % 2 == 0) ? sqrt_dt : -sqrt_dt; }
};

NoiseTree build_tree(int K, double T); // 1 <= K <= 16

// Grid functions indexed by (time level, path prefix). values[k] is one column
// per path node; adaptedness is structural in the storage layout.
struct AdaptedField {
    NodeSet set;
    std::vector<Eigen::MatrixXd> values;

    int levels() const { return static_cast<int>(values.size()); }
    static AdaptedField zeros(const NodeSet& set, const NoiseTree& tree, int levels);
};

// Probability-weighted (uniform) average over the 2^k path nodes of one level.
Eigen::VectorXd expectation(const AdaptedField& field, int level);
Eigen::VectorXd expectation(const Eigen::MatrixXd& level_values);

// Parent value = mean of its two children: E[·|F_k] one level down.
Eigen::MatrixXd cond_expectation(const Eigen::MatrixXd& child_level);
Eigen::MatrixXd cond_expectation(const AdaptedField& field, int child_level);

// Z_k = E[ξ_{k+1} ΔW_{k+1} | F_k]/dt = (ξ^{up} − ξ^{down})/(2√dt).
Eigen::MatrixXd martingale_rep(const Eigen::MatrixXd& child_level, double sqrt_dt);
Eigen::MatrixXd martingale_rep(const AdaptedField& field, int child_level, const NoiseTree& tree);

} // namespace shum

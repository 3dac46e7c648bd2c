#pragma once

#include <string>
#include <vector>

#include "solvers.hpp"

namespace shum {

// Test process for the weighted energy estimate: w solves the adjoint
// recursion, f collects the drift residual against the pure fourth-difference
// flow, g the diffusion residual. Both vanish only when a1 = a2 = 0.
struct CarlemanProbe {
    AdaptedField w; // levels 0..K on the interior nodes
    AdaptedField f; // drift residual, levels 0..K-1
    AdaptedField g; // diffusion residual, levels 0..K-1
};

CarlemanProbe make_probe(const Eigen::MatrixXd& z_terminal, const SchemeConfig& scheme);

struct CarlemanTerm {
    std::string name;
    double value = 0.0;
};

// The two sides of the weighted estimate: four interior energies on the left,
// the localized observation term, both residuals, and the time endpoints on
// the right. ratio is the quantity the estimate bounds uniformly in h.
struct CarlemanTable {
    std::vector<CarlemanTerm> lhs;
    std::vector<CarlemanTerm> rhs;
    double lhs_total = 0.0;
    double rhs_total = 0.0;
    double ratio = 0.0;
};

CarlemanTable carleman_functionals(const CarlemanProbe& probe, const WeightParams& params,
                                   const NoiseTree& tree, const Mesh& mesh,
                                   const Interval& observation_region);

} // namespace shum

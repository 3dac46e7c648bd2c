#pragma once

#include <string>
#include <vector>

#include "mesh.hpp"

namespace shum {

// Staggered difference and average: both take values on the half-shifted dual
// of the input set. The default target is prime(input) — every node where both
// half-step neighbors exist.

GridFunction apply_Dh(const GridFunction& u);
GridFunction apply_Ah(const GridFunction& u);
GridFunction apply_Dh_on(const GridFunction& u, const NodeSet& target);
GridFunction apply_Ah_on(const GridFunction& u, const NodeSet& target);
GridFunction apply_Dh_pow(const GridFunction& u, int k); // k in 1..4

struct BiharmonicOperator {
    long N = 0;
    double h = 0.0;
    Eigen::MatrixXd matrix; // D_h^4 on M with y=0 on ∂M and D_h y=0 on ∂M*
};

BiharmonicOperator assemble_biharmonic(const Mesh& mesh);

// u on M padded with the four zero boundary/ghost values x_{-1}, x_0, x_{N+1}, x_{N+2}.
GridFunction ghost_extend(const GridFunction& u, const Mesh& mesh);

struct IdentityResult {
    std::string name;
    double max_scaled_residual = 0.0;
};

struct IdentityReport {
    std::vector<IdentityResult> results;
    double worst() const;
    bool all_within(double tol) const;
};

// Scaled residuals of the product/reconstruction/summation-by-parts identity
// family for one triple of inputs: u on the twice-extended lattice of M,
// v on M̄, w on M*.
std::vector<IdentityResult> identity_residuals(const Mesh& mesh, const GridFunction& u_ext,
                                               const GridFunction& v_bar, const GridFunction& w_star);

// Max scaled residual per identity over seeded random inputs.
IdentityReport identity_suite(const Mesh& mesh, int trials, unsigned seed);

} // namespace shum

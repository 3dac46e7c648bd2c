#pragma once

#include <functional>

#include <Eigen/Cholesky>

#include "calculus.hpp"
#include "mesh.hpp"
#include "tree.hpp"
#include "weights.hpp"

namespace shum {

// Reaction/noise coefficients a1(t,x), a2(t,x) sampled on the space-time grid;
// column k holds the values at time t_k on the interior nodes.
struct CoefficientField {
    Eigen::MatrixXd a1_samples;
    Eigen::MatrixXd a2_samples;
    double H_norm = 0.0; // sup |a1| + sup |a2| over the sampled grid
};

CoefficientField make_coefficients(const std::function<double(double, double)>& a1,
                                   const std::function<double(double, double)>& a2,
                                   const Mesh& mesh, const NoiseTree& tree);

// Distributed control pair: u acts through the indicator of G0, v acts on the
// noise term. Both live on the interior nodes at levels 0..K-1.
struct ControlPair {
    AdaptedField u;
    AdaptedField v;
};

ControlPair zero_controls(const Mesh& mesh, const NoiseTree& tree);

// Everything the time-stepping needs: the fourth-difference operator, the
// factorized implicit step S = (I + dt A)^{-1}, and the control-region mask.
struct SchemeConfig {
    Mesh mesh;
    NoiseTree tree;
    CoefficientField coeffs;
    Interval control_region;
    BiharmonicOperator op;
    Eigen::MatrixXd implicit_matrix;     // I + dt A
    Eigen::LLT<Eigen::MatrixXd> implicit_llt;
    Eigen::VectorXd chi;                 // node indicator of control_region

    // S applied columnwise, with one iterative-refinement pass so the step
    // residual sits at rounding level rather than at kappa * eps.
    Eigen::MatrixXd apply_implicit(const Eigen::MatrixXd& rhs) const;

    // Expectation inner product on one level: h-weighted in space, uniform
    // probability weights over the path columns.
    double level_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const;
    double level_norm2(const Eigen::MatrixXd& a) const { return level_inner(a, a); }
};

SchemeConfig make_scheme(const Mesh& mesh, const NoiseTree& tree,
                         const CoefficientField& coeffs, const Interval& control_region);

// One Euler-Maruyama step per tree edge, implicit in the stiff operator:
// y_{k+1} = S[(1 + dt a1) y_k + dt chi u_k + (a2 y_k + v_k) dW].
AdaptedField solve_forward(const Eigen::VectorXd& y0, const ControlPair& controls,
                           const SchemeConfig& scheme);

struct BackwardSolution {
    AdaptedField z;    // levels 0..K
    AdaptedField m;    // m_k = S E[z_{k+1}|F_k], levels 0..K-1
    AdaptedField zeta; // zeta_k = S Z_k, levels 0..K-1
};

// Adjoint recursion z_k = (1 + dt a1) m_k + dt a2 zeta_k run from the
// terminal data down to level 0.
BackwardSolution solve_backward(const Eigen::MatrixXd& z_terminal, const SchemeConfig& scheme);

// E<y_K, z_T> - <y_0, z_0> minus the control pairing; exactly zero for this
// scheme up to rounding, which is what the duality-based tests pin down.
double duality_gap(const Eigen::VectorXd& y0, const Eigen::MatrixXd& z_terminal,
                   const ControlPair& controls, const SchemeConfig& scheme);

} // namespace shum

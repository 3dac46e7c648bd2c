#pragma once

#include "solvers.hpp"

namespace shum {

// Terminal leaf state of the uncontrolled dynamics started at y0.
Eigen::MatrixXd free_terminal(const Eigen::VectorXd& y0, const SchemeConfig& scheme);

// Controllability Gramian acting on terminal adjoint data: run the adjoint
// backward, feed u = -chi m, v = -zeta into the zero-initial forward problem,
// and return minus its terminal state. Symmetric positive semidefinite in the
// expectation inner product by the discrete duality identity.
Eigen::MatrixXd gramian_apply(const Eigen::MatrixXd& z_terminal, const SchemeConfig& scheme);

// Controls induced by terminal adjoint data.
ControlPair extract_controls(const Eigen::MatrixXd& z_terminal, const SchemeConfig& scheme);

struct MinimizeResult {
    Eigen::MatrixXd z_star;    // minimizer of the penalized quadratic functional
    long iterations = 0;
    double residual = 0.0;     // relative CG residual at exit
    double functional = 0.0;   // final value of the quadratic functional
};

// Conjugate gradients on (Gramian + eps I) z = free terminal, run in the
// expectation inner product. The functional value follows the exact one-step
// recurrence and every step is checked to decrease it.
MinimizeResult minimize_Jeps(const Eigen::VectorXd& y0, double eps, double tol,
                             long max_iter, const SchemeConfig& scheme);

struct EpsRule {
    bool fixed = false;
    double value = 0.0; // used when fixed
    double C = 0.6;     // otherwise eps = exp(-C/h)
    double resolve(double h) const;
    static EpsRule fixed_value(double eps);
    static EpsRule mesh_rule(double C);
};

struct HUMReport {
    long N = 0;
    double h = 0.0;
    int K = 0;
    double T = 0.0;
    double eps = 0.0;
    long cg_iterations = 0;
    double cg_residual = 0.0;
    double initial_norm2 = 0.0;      // h-weighted |y0|^2
    double terminal_norm2 = 0.0;     // E h-weighted |y_K|^2 of the re-simulated run
    double penalty_norm2 = 0.0;      // eps^2 E |z*|^2, the dual route to the same number
    double control_cost = 0.0;       // dt sum E[|chi u|^2 + |v|^2]
    double certificate_residual = 0.0;
    double terminal_ratio() const { return terminal_norm2 / initial_norm2; }
    double cost_ratio() const { return control_cost / initial_norm2; }
};

// End-to-end controlled run: minimize, extract the controls, re-simulate the
// forward dynamics with them, and cross-check the optimality identity
// y_K = eps z* between the primal and dual routes.
HUMReport control_experiment(const Eigen::VectorXd& y0, const EpsRule& rule, double tol,
                             long max_iter, const SchemeConfig& scheme);

} // namespace shum

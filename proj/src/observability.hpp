#pragma once

#include "solvers.hpp"

namespace shum {

// Rayleigh quotient of the discrete observability inequality for the given
// terminal adjoint data: initial adjoint energy over observed energy plus the
// eps_T-regularized terminal energy.
double observability_quotient(const Eigen::MatrixXd& z_terminal, const SchemeConfig& scheme,
                              double eps_T);

struct ObservabilityReport {
    long N = 0;
    double h = 0.0;
    int K = 0;
    double T = 0.0;
    double H_norm = 0.0;
    double eps_T = 0.0;
    double quotient = 0.0;  // largest Rayleigh quotient found
    long iterations = 0;
    bool converged = false;
    double fitted_C = 0.0;  // log of the quotient over the rate polynomial
};

// Generalized power iteration for the worst-case quotient. Each step solves
// the regularized Gramian system by conjugate gradients, so successive
// quotients cannot decrease; hitting max_iter flags the report instead of
// throwing.
ObservabilityReport estimate_Cobs(const SchemeConfig& scheme, double eps_T, double tol,
                                  long max_iter);

} // namespace shum

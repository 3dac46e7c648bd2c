#include "observability.hpp"

#include <cmath>
#include <fmt/format.h>
#include <random>

#include "error.hpp"
#include "hum.hpp"

namespace shum {

namespace {

struct QuotientParts {
    double numerator = 0.0;
    double denominator = 0.0;
    Eigen::VectorXd z0;
};

QuotientParts quotient_parts(const Eigen::MatrixXd& z_terminal, const SchemeConfig& scheme,
                             double eps_T) {
    BackwardSolution adj = solve_backward(z_terminal, scheme);
    QuotientParts parts;
    parts.z0 = adj.z.values[0].col(0);
    parts.numerator = scheme.mesh.h * parts.z0.squaredNorm();
    double observed = 0.0;
    for (int k = 0; k < scheme.tree.K; ++k) {
        Eigen::MatrixXd masked = scheme.chi.asDiagonal() * adj.m.values[k];
        observed += scheme.tree.dt
                    * (scheme.level_norm2(adj.zeta.values[k]) + scheme.level_norm2(masked));
    }
    parts.denominator = observed + eps_T * scheme.level_norm2(z_terminal);
    return parts;
}

// Solve (Gramian + eps_T I) x = rhs by conjugate gradients in the expectation
// inner product; this is the B-solve of the generalized power step.
Eigen::MatrixXd regularized_solve(const Eigen::MatrixXd& rhs, const SchemeConfig& scheme,
                                  double eps_T, double tol) {
    double rhs_norm = std::sqrt(scheme.level_norm2(rhs));
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(rhs.rows(), rhs.cols());
    if (rhs_norm == 0.0) return x;
    Eigen::MatrixXd r = rhs;
    Eigen::MatrixXd p = r;
    double rs = scheme.level_norm2(r);
    long limit = 10 * rhs.rows() * rhs.cols();
    long it = 0;
    while (std::sqrt(rs) > tol * rhs_norm) {
        require(it < limit, errc::numeric,
                fmt::format("inner conjugate-gradient solve stalled at relative residual {:.3g}",
                            std::sqrt(rs) / rhs_norm));
        Eigen::MatrixXd Ap = gramian_apply(p, scheme) + eps_T * p;
        double pAp = scheme.level_inner(p, Ap);
        require(pAp > 0.0, errc::numeric,
                "the regularized Gramian lost positive definiteness");
        double alpha = rs / pAp;
        x += alpha * p;
        r -= alpha * Ap;
        double rs_next = scheme.level_norm2(r);
        p = r + (rs_next / rs) * p;
        rs = rs_next;
        ++it;
    }
    return x;
}

} // namespace

double observability_quotient(const Eigen::MatrixXd& z_terminal, const SchemeConfig& scheme,
                              double eps_T) {
    require(eps_T > 0.0, errc::config,
            fmt::format("terminal regularization eps_T = {} must be positive", eps_T));
    require(z_terminal.rows() == scheme.mesh.M.size()
                && z_terminal.cols() == scheme.tree.leaves(),
            errc::config,
            fmt::format("terminal data must be {} x {}", scheme.mesh.M.size(),
                        scheme.tree.leaves()));
    require(scheme.level_norm2(z_terminal) > 0.0, errc::config,
            "the observability quotient is undefined for zero terminal data");
    QuotientParts parts = quotient_parts(z_terminal, scheme, eps_T);
    return parts.numerator / parts.denominator;
}

ObservabilityReport estimate_Cobs(const SchemeConfig& scheme, double eps_T, double tol,
                                  long max_iter) {
    require(eps_T > 0.0, errc::config,
            fmt::format("terminal regularization eps_T = {} must be positive", eps_T));
    require(tol > 0.0, errc::config, fmt::format("tolerance {} must be positive", tol));
    if (max_iter <= 0) max_iter = 200;

    ObservabilityReport report;
    report.N = scheme.mesh.N;
    report.h = scheme.mesh.h;
    report.K = scheme.tree.K;
    report.T = scheme.tree.T;
    report.H_norm = scheme.coeffs.H_norm;
    report.eps_T = eps_T;

    std::mt19937_64 rng(20240612);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::MatrixXd x(scheme.mesh.M.size(), scheme.tree.leaves());
    for (long j = 0; j < x.cols(); ++j)
        for (long i = 0; i < x.rows(); ++i) x(i, j) = unif(rng);
    x /= std::sqrt(scheme.level_norm2(x));

    double q_prev = observability_quotient(x, scheme, eps_T);
    double inner_tol = std::min(1e-12, tol * 1e-2);

    for (long it = 1; it <= max_iter; ++it) {
        QuotientParts parts = quotient_parts(x, scheme, eps_T);
        Eigen::MatrixXd forced = free_terminal(parts.z0, scheme);
        Eigen::MatrixXd y = regularized_solve(forced, scheme, eps_T, inner_tol);
        double y_norm = std::sqrt(scheme.level_norm2(y));
        require(y_norm > 0.0, errc::numeric,
                "the power iterate collapsed to zero; the Gramian annihilated the start vector");
        x = y / y_norm;

        double q = observability_quotient(x, scheme, eps_T);
        require(q >= q_prev * (1.0 - 1e-9), errc::numeric,
                fmt::format("Rayleigh quotient decreased from {:.12g} to {:.12g}; the power "
                            "step is not ascending",
                            q_prev, q));
        report.iterations = it;
        report.quotient = q;
        if (std::abs(q - q_prev) <= tol * q) {
            report.converged = true;
            break;
        }
        q_prev = q;
    }

    double H = report.H_norm;
    double rate = 1.0 + 1.0 / report.T + std::pow(H, 2.0 / 7.0) + report.T + H * H * report.T;
    report.fitted_C = std::log(std::max(report.quotient, 1e-300)) / rate;
    return report;
}

} // namespace shum

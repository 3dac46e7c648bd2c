#include "hum.hpp"

#include <cmath>
#include <fmt/format.h>

#include "error.hpp"

namespace shum {

Eigen::MatrixXd free_terminal(const Eigen::VectorXd& y0, const SchemeConfig& scheme) {
    ControlPair none = zero_controls(scheme.mesh, scheme.tree);
    return solve_forward(y0, none, scheme).values[scheme.tree.K];
}

ControlPair extract_controls(const Eigen::MatrixXd& z_terminal, const SchemeConfig& scheme) {
    BackwardSolution adj = solve_backward(z_terminal, scheme);
    ControlPair controls = zero_controls(scheme.mesh, scheme.tree);
    for (int k = 0; k < scheme.tree.K; ++k) {
        controls.u.values[k] = -(scheme.chi.asDiagonal() * adj.m.values[k]);
        controls.v.values[k] = -adj.zeta.values[k];
    }
    return controls;
}

Eigen::MatrixXd gramian_apply(const Eigen::MatrixXd& z_terminal, const SchemeConfig& scheme) {
    ControlPair controls = extract_controls(z_terminal, scheme);
    Eigen::VectorXd zero_start = Eigen::VectorXd::Zero(scheme.mesh.M.size());
    return -solve_forward(zero_start, controls, scheme).values[scheme.tree.K];
}

MinimizeResult minimize_Jeps(const Eigen::VectorXd& y0, double eps, double tol,
                             long max_iter, const SchemeConfig& scheme) {
    require(eps > 0.0, errc::config, fmt::format("penalty eps = {} must be positive", eps));
    require(tol > 0.0, errc::config, fmt::format("solver tolerance {} must be positive", tol));
    const NoiseTree& tree = scheme.tree;
    if (max_iter <= 0) max_iter = 2 * scheme.mesh.M.size() * tree.leaves();

    Eigen::MatrixXd b = free_terminal(y0, scheme);
    double b_norm = std::sqrt(scheme.level_norm2(b));

    MinimizeResult result;
    result.z_star = Eigen::MatrixXd::Zero(b.rows(), b.cols());
    if (b_norm == 0.0) return result;

    Eigen::MatrixXd r = b;
    Eigen::MatrixXd p = r;
    double rs = scheme.level_norm2(r);
    double J = 0.0;

    while (std::sqrt(rs) > tol * b_norm) {
        require(result.iterations < max_iter, errc::numeric,
                fmt::format("conjugate gradients did not reach tolerance {:.3g} within {} "
                            "iterations; relative residual stalled at {:.3g}",
                            tol, max_iter, std::sqrt(rs) / b_norm));
        Eigen::MatrixXd Ap = gramian_apply(p, scheme) + eps * p;
        double pAp = scheme.level_inner(p, Ap);
        require(pAp > 0.0, errc::numeric,
                fmt::format("the penalized Gramian lost positive definiteness "
                            "(search-direction energy {:.3g})", pAp));
        double alpha = rs / pAp;
        double delta_J = -0.5 * alpha * rs;
        require(delta_J <= 0.0, errc::numeric,
                "the quadratic functional increased along a conjugate-gradient step");
        J += delta_J;
        result.z_star += alpha * p;
        r -= alpha * Ap;
        double rs_next = scheme.level_norm2(r);
        p = r + (rs_next / rs) * p;
        rs = rs_next;
        ++result.iterations;
    }
    result.residual = std::sqrt(rs) / b_norm;
    result.functional = J;
    return result;
}

double EpsRule::resolve(double h) const {
    if (fixed) {
        require(value > 0.0, errc::config,
                fmt::format("fixed penalty eps = {} must be positive", value));
        return value;
    }
    require(C > 0.0, errc::config,
            fmt::format("penalty rule constant C = {} must be positive", C));
    double eps = std::exp(-C / h);
    require(eps > 0.0, errc::numeric,
            fmt::format("penalty rule exp(-C/h) underflowed at C = {}, h = {}", C, h));
    return eps;
}

EpsRule EpsRule::fixed_value(double eps) { return EpsRule{true, eps, 0.0}; }
EpsRule EpsRule::mesh_rule(double C) { return EpsRule{false, 0.0, C}; }

HUMReport control_experiment(const Eigen::VectorXd& y0, const EpsRule& rule, double tol,
                             long max_iter, const SchemeConfig& scheme) {
    const NoiseTree& tree = scheme.tree;
    HUMReport report;
    report.N = scheme.mesh.N;
    report.h = scheme.mesh.h;
    report.K = tree.K;
    report.T = tree.T;
    report.eps = rule.resolve(scheme.mesh.h);
    report.initial_norm2 = scheme.mesh.h * y0.squaredNorm();
    require(report.initial_norm2 > 0.0, errc::config,
            "the initial state is identically zero; nothing to control");

    MinimizeResult opt = minimize_Jeps(y0, report.eps, tol, max_iter, scheme);
    report.cg_iterations = opt.iterations;
    report.cg_residual = opt.residual;

    ControlPair controls = extract_controls(opt.z_star, scheme);
    AdaptedField y = solve_forward(y0, controls, scheme);
    const Eigen::MatrixXd& yK = y.values[tree.K];

    report.terminal_norm2 = scheme.level_norm2(yK);
    report.penalty_norm2 = report.eps * report.eps * scheme.level_norm2(opt.z_star);

    // The optimality system forces y_K = eps z*; the re-simulated primal route
    // and the dual route must agree or the controls were extracted wrong.
    double scale = std::max({report.terminal_norm2, report.penalty_norm2, 1e-300});
    double discrepancy = std::abs(report.terminal_norm2 - report.penalty_norm2) / scale;
    require(discrepancy <= 1e-8, errc::verification,
            fmt::format("primal terminal energy {:.6g} and dual penalty energy {:.6g} disagree "
                        "by {:.3g} relative; the optimality identity y_K = eps z* failed",
                        report.terminal_norm2, report.penalty_norm2, discrepancy));

    double cost = 0.0;
    for (int k = 0; k < tree.K; ++k) {
        Eigen::MatrixXd masked = scheme.chi.asDiagonal() * controls.u.values[k];
        cost += tree.dt * (scheme.level_norm2(masked) + scheme.level_norm2(controls.v.values[k]));
    }
    report.control_cost = cost;

    Eigen::MatrixXd gap = yK - report.eps * opt.z_star;
    double denom = std::max(std::sqrt(report.penalty_norm2), std::sqrt(report.initial_norm2));
    report.certificate_residual = std::sqrt(scheme.level_norm2(gap)) / denom;
    return report;
}

} // namespace shum

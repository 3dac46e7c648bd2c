#include "carleman.hpp"

#include <cmath>
#include <fmt/format.h>

#include "error.hpp"

namespace shum {

CarlemanProbe make_probe(const Eigen::MatrixXd& z_terminal, const SchemeConfig& scheme) {
    BackwardSolution adj = solve_backward(z_terminal, scheme);
    const NoiseTree& tree = scheme.tree;
    long n = scheme.mesh.M.size();

    CarlemanProbe probe;
    probe.w = adj.z;
    probe.f = AdaptedField::zeros(scheme.mesh.M, tree, tree.K);
    probe.g = AdaptedField::zeros(scheme.mesh.M, tree, tree.K);

    // Centered edge increments recover the drift and diffusion parts of
    // dz = (D^4 z - f) dt - g dW exactly on the binary tree.
    for (int k = 0; k < tree.K; ++k) {
        const Eigen::MatrixXd& zk = adj.z.values[k];
        const Eigen::MatrixXd& znext = adj.z.values[k + 1];
        long parents = zk.cols();
        Eigen::MatrixXd drift(n, parents);
        Eigen::MatrixXd diff(n, parents);
        for (long j = 0; j < parents; ++j) {
            Eigen::VectorXd up = znext.col(2 * j) - zk.col(j);
            Eigen::VectorXd down = znext.col(2 * j + 1) - zk.col(j);
            drift.col(j) = (up + down) / (2.0 * tree.dt);
            diff.col(j) = (up - down) / (2.0 * tree.sqrt_dt);
        }
        probe.f.values[k] = scheme.op.matrix * zk - drift;
        probe.g.values[k] = -diff;
    }
    return probe;
}

namespace {

Eigen::VectorXd squared_weight(const NodeSet& set, const WeightParams& params, double s) {
    Eigen::VectorXd w(set.size());
    for (long i = 0; i < set.size(); ++i) {
        double exponent = 2.0 * s * eval_phi(set.point(i), params);
        require(exponent < 700.0, errc::numeric,
                fmt::format("weight exponent 2 s phi = {:.3g} exceeds the double range at x = {}; "
                            "choose a smaller lambda or a larger delta",
                            exponent, set.point(i)));
        w(i) = std::exp(exponent);
    }
    return w;
}

// Expectation of the h-weighted, e^{2 s phi}-weighted square of one level.
double weighted_energy(const Eigen::MatrixXd& level, const Eigen::VectorXd& weight, double h) {
    return h * (weight.asDiagonal() * level.cwiseAbs2()).sum()
           / static_cast<double>(level.cols());
}

struct Differences {
    Eigen::MatrixXd d1_star; // D_h w on the interior half nodes
    Eigen::MatrixXd d2_bar;  // D_h^2 w on the closed node set
    Eigen::MatrixXd d3_star; // D_h^3 w on the interior half nodes
};

// Successive staggered differences of the zero-extended state; the two ghost
// rows on each side encode the clamped-type boundary values.
Differences staggered_differences(const Eigen::MatrixXd& w, double h) {
    long n = w.rows();
    Eigen::MatrixXd ext = Eigen::MatrixXd::Zero(n + 4, w.cols());
    ext.middleRows(2, n) = w;
    Eigen::MatrixXd d1 = (ext.bottomRows(n + 3) - ext.topRows(n + 3)) / h;
    Differences d;
    d.d2_bar = (d1.bottomRows(n + 2) - d1.topRows(n + 2)) / h;
    d.d3_star = (d.d2_bar.bottomRows(n + 1) - d.d2_bar.topRows(n + 1)) / h;
    d.d1_star = d1.middleRows(1, n + 1);
    return d;
}

} // namespace

CarlemanTable carleman_functionals(const CarlemanProbe& probe, const WeightParams& params,
                                   const NoiseTree& tree, const Mesh& mesh,
                                   const Interval& observation_region) {
    require(probe.w.levels() == tree.K + 1 && probe.f.levels() == tree.K
                && probe.g.levels() == tree.K,
            errc::internal, "probe levels do not match the tree depth");
    require(probe.w.values[0].rows() == mesh.M.size(), errc::internal,
            "probe must live on the interior nodes");
    double regime = params.lambda * mesh.h / (params.delta * params.T * params.T);
    require(regime <= 1.0 + 1e-12, errc::numeric,
            fmt::format("lambda h / (delta T^2) = {:.4g} exceeds 1; the weighted functionals "
                        "are only meaningful in the admissible regime",
                        regime));

    long n = mesh.M.size();
    Eigen::VectorXd chi_obs = Eigen::VectorXd::Zero(n);
    for (long i = 0; i < n; ++i)
        if (observation_region.contains(mesh.M.point(i))) chi_obs(i) = 1.0;

    double lhs_w = 0.0, lhs_dw = 0.0, lhs_d2w = 0.0, lhs_d3w = 0.0;
    double rhs_obs = 0.0, rhs_f = 0.0, rhs_g = 0.0;

    for (int k = 0; k < tree.K; ++k) {
        double s = params.lambda * eval_theta(tree.t_at(k), params);
        Eigen::VectorXd wM = squared_weight(mesh.M, params, s);
        Eigen::VectorXd wMs = squared_weight(mesh.M_star, params, s);
        Eigen::VectorXd wMb = squared_weight(mesh.M_bar, params, s);

        const Eigen::MatrixXd& wk = probe.w.values[k];
        Differences diffs = staggered_differences(wk, mesh.h);

        lhs_w += tree.dt * std::pow(s, 7) * weighted_energy(wk, wM, mesh.h);
        lhs_dw += tree.dt * std::pow(s, 5) * weighted_energy(diffs.d1_star, wMs, mesh.h);
        lhs_d2w += tree.dt * std::pow(s, 3) * weighted_energy(diffs.d2_bar, wMb, mesh.h);
        lhs_d3w += tree.dt * s * weighted_energy(diffs.d3_star, wMs, mesh.h);

        rhs_obs += tree.dt * std::pow(s, 7)
                   * weighted_energy(chi_obs.asDiagonal() * wk, wM, mesh.h);
        rhs_f += tree.dt * weighted_energy(probe.f.values[k], wM, mesh.h);
        rhs_g += tree.dt * std::pow(s, 4) * weighted_energy(probe.g.values[k], wM, mesh.h);
    }

    double h4 = std::pow(mesh.h, 4);
    double s0 = params.lambda * eval_theta(0.0, params);
    double sT = params.lambda * eval_theta(params.T, params);
    double rhs_t0 = weighted_energy(probe.w.values[0], squared_weight(mesh.M, params, s0), mesh.h) / h4;
    double rhs_tT = weighted_energy(probe.w.values[tree.K], squared_weight(mesh.M, params, sT), mesh.h) / h4;

    CarlemanTable table;
    table.lhs = {{"s^7 |w|^2 on M", lhs_w},
                 {"s^5 |D_h w|^2 on M*", lhs_dw},
                 {"s^3 |D_h^2 w|^2 on closure", lhs_d2w},
                 {"s^1 |D_h^3 w|^2 on M*", lhs_d3w}};
    table.rhs = {{"s^7 |w|^2 on observation region", rhs_obs},
                 {"drift residual |f|^2", rhs_f},
                 {"s^4 diffusion residual |g|^2", rhs_g},
                 {"h^-4 |w(0)|^2", rhs_t0},
                 {"h^-4 |w(T)|^2", rhs_tT}};
    for (const auto& term : table.lhs) table.lhs_total += term.value;
    for (const auto& term : table.rhs) table.rhs_total += term.value;
    require(table.rhs_total > 0.0, errc::numeric,
            "the right-hand side of the weighted estimate vanished; the probe is zero");
    table.ratio = table.lhs_total / table.rhs_total;
    return table;
}

} // namespace shum

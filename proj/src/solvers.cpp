#include "solvers.hpp"

#include <cmath>
#include <fmt/format.h>
#include <random>

#include "error.hpp"

namespace shum {

CoefficientField make_coefficients(const std::function<double(double, double)>& a1,
                                   const std::function<double(double, double)>& a2,
                                   const Mesh& mesh, const NoiseTree& tree) {
    long n = mesh.M.size();
    CoefficientField field;
    field.a1_samples.resize(n, tree.K);
    field.a2_samples.resize(n, tree.K);
    double sup1 = 0.0, sup2 = 0.0;
    for (int k = 0; k < tree.K; ++k) {
        double t = tree.t_at(k);
        for (long i = 0; i < n; ++i) {
            double x = mesh.M.point(i);
            double v1 = a1(t, x);
            double v2 = a2(t, x);
            require(std::isfinite(v1) && std::isfinite(v2), errc::numeric,
                    fmt::format("coefficient sample at t = {}, x = {} is not finite", t, x));
            field.a1_samples(i, k) = v1;
            field.a2_samples(i, k) = v2;
            sup1 = std::max(sup1, std::abs(v1));
            sup2 = std::max(sup2, std::abs(v2));
        }
    }
    field.H_norm = sup1 + sup2;
    return field;
}

ControlPair zero_controls(const Mesh& mesh, const NoiseTree& tree) {
    ControlPair controls;
    controls.u = AdaptedField::zeros(mesh.M, tree, tree.K);
    controls.v = AdaptedField::zeros(mesh.M, tree, tree.K);
    return controls;
}

Eigen::MatrixXd SchemeConfig::apply_implicit(const Eigen::MatrixXd& rhs) const {
    Eigen::MatrixXd y = implicit_llt.solve(rhs);
    y += implicit_llt.solve(rhs - implicit_matrix * y);
    return y;
}

double SchemeConfig::level_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const {
    require(a.rows() == b.rows() && a.cols() == b.cols(), errc::internal,
            "level inner product needs matching shapes");
    return mesh.h * a.cwiseProduct(b).sum() / static_cast<double>(a.cols());
}

SchemeConfig make_scheme(const Mesh& mesh, const NoiseTree& tree,
                         const CoefficientField& coeffs, const Interval& control_region) {
    require(coeffs.a1_samples.rows() == mesh.M.size() && coeffs.a1_samples.cols() == tree.K,
            errc::internal, "coefficient samples do not match the mesh and tree");
    SchemeConfig scheme;
    scheme.mesh = mesh;
    scheme.tree = tree;
    scheme.coeffs = coeffs;
    scheme.control_region = control_region;
    scheme.op = assemble_biharmonic(mesh);

    long n = mesh.M.size();
    scheme.implicit_matrix = Eigen::MatrixXd::Identity(n, n) + tree.dt * scheme.op.matrix;
    scheme.implicit_llt.compute(scheme.implicit_matrix);
    require(scheme.implicit_llt.info() == Eigen::Success, errc::numeric,
            "Cholesky factorization of the implicit step operator failed");

    scheme.chi = Eigen::VectorXd::Zero(n);
    for (long i = 0; i < n; ++i)
        if (control_region.contains(mesh.M.point(i))) scheme.chi(i) = 1.0;

    // The refined solve has to reproduce the identity S(I + dt A) b = b well
    // below the tolerances the duality checks run at.
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int probe = 0; probe < 5; ++probe) {
        Eigen::VectorXd b(n);
        for (long i = 0; i < n; ++i) b(i) = unif(rng);
        Eigen::VectorXd y = scheme.apply_implicit(b);
        double rel = (scheme.implicit_matrix * y - b).norm() / b.norm();
        require(rel <= 1e-11, errc::numeric,
                fmt::format("implicit step solve residual {:.3g} exceeds 1e-11 at h = {}; "
                            "the factorization is too ill-conditioned for this mesh",
                            rel, mesh.h));
    }
    return scheme;
}

static void check_controls(const ControlPair& controls, const SchemeConfig& scheme) {
    require(controls.u.levels() == scheme.tree.K && controls.v.levels() == scheme.tree.K,
            errc::internal, "control pair does not cover levels 0..K-1");
    require(controls.u.values[0].rows() == scheme.mesh.M.size(), errc::internal,
            "controls must live on the interior nodes");
}

AdaptedField solve_forward(const Eigen::VectorXd& y0, const ControlPair& controls,
                           const SchemeConfig& scheme) {
    long n = scheme.mesh.M.size();
    require(y0.size() == n, errc::internal,
            fmt::format("initial state has {} entries, mesh has {} interior nodes", y0.size(), n));
    check_controls(controls, scheme);

    const NoiseTree& tree = scheme.tree;
    AdaptedField y = AdaptedField::zeros(scheme.mesh.M, tree, tree.K + 1);
    y.values[0].col(0) = y0;

    for (int k = 0; k < tree.K; ++k) {
        const Eigen::VectorXd a1 = scheme.coeffs.a1_samples.col(k);
        const Eigen::VectorXd a2 = scheme.coeffs.a2_samples.col(k);
        const Eigen::MatrixXd& yk = y.values[k];
        long parents = yk.cols();

        Eigen::MatrixXd drift = yk + tree.dt * (a1.asDiagonal() * yk
                                                + scheme.chi.asDiagonal() * controls.u.values[k]);
        Eigen::MatrixXd noise = a2.asDiagonal() * yk + controls.v.values[k];

        Eigen::MatrixXd rhs(n, 2 * parents);
        for (long j = 0; j < parents; ++j) {
            rhs.col(2 * j) = drift.col(j) + tree.sqrt_dt * noise.col(j);
            rhs.col(2 * j + 1) = drift.col(j) - tree.sqrt_dt * noise.col(j);
        }
        y.values[k + 1] = scheme.apply_implicit(rhs);
    }
    return y;
}

BackwardSolution solve_backward(const Eigen::MatrixXd& z_terminal, const SchemeConfig& scheme) {
    const NoiseTree& tree = scheme.tree;
    long n = scheme.mesh.M.size();
    require(z_terminal.rows() == n && z_terminal.cols() == tree.leaves(), errc::internal,
            fmt::format("terminal data must be {} x {}", n, tree.leaves()));

    BackwardSolution sol;
    sol.z = AdaptedField::zeros(scheme.mesh.M, tree, tree.K + 1);
    sol.m = AdaptedField::zeros(scheme.mesh.M, tree, tree.K);
    sol.zeta = AdaptedField::zeros(scheme.mesh.M, tree, tree.K);
    sol.z.values[tree.K] = z_terminal;

    for (int k = tree.K - 1; k >= 0; --k) {
        const Eigen::VectorXd a1 = scheme.coeffs.a1_samples.col(k);
        const Eigen::VectorXd a2 = scheme.coeffs.a2_samples.col(k);
        Eigen::MatrixXd mk = scheme.apply_implicit(cond_expectation(sol.z.values[k + 1]));
        Eigen::MatrixXd zk = scheme.apply_implicit(martingale_rep(sol.z.values[k + 1], tree.sqrt_dt));
        sol.m.values[k] = mk;
        sol.zeta.values[k] = zk;
        sol.z.values[k] = mk + scheme.tree.dt * (a1.asDiagonal() * mk + a2.asDiagonal() * zk);
    }
    return sol;
}

double duality_gap(const Eigen::VectorXd& y0, const Eigen::MatrixXd& z_terminal,
                   const ControlPair& controls, const SchemeConfig& scheme) {
    AdaptedField y = solve_forward(y0, controls, scheme);
    BackwardSolution adj = solve_backward(z_terminal, scheme);

    const NoiseTree& tree = scheme.tree;
    double terminal = scheme.level_inner(y.values[tree.K], z_terminal);
    double initial = scheme.mesh.h * y0.dot(adj.z.values[0].col(0));

    double pairing = 0.0;
    for (int k = 0; k < tree.K; ++k) {
        Eigen::MatrixXd masked_u = scheme.chi.asDiagonal() * controls.u.values[k];
        pairing += tree.dt * (scheme.level_inner(masked_u, adj.m.values[k])
                              + scheme.level_inner(controls.v.values[k], adj.zeta.values[k]));
    }
    return terminal - initial - pairing;
}

} // namespace shum

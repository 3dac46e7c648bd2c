#include <cmath>
#include <random>

#include "doctest.h"

#include "error.hpp"
#include "solvers.hpp"

using namespace shum;

namespace {

SchemeConfig desk_scheme(long N, int K, double a1_value, double a2_value, double T = 1.0) {
    Mesh mesh = build_mesh(N);
    NoiseTree tree = build_tree(K, T);
    CoefficientField coeffs = make_coefficients(
        [a1_value](double, double) { return a1_value; },
        [a2_value](double, double) { return a2_value; }, mesh, tree);
    return make_scheme(mesh, tree, coeffs, Interval{0.3, 0.8});
}

Eigen::MatrixXd random_matrix(long rows, long cols, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::MatrixXd out(rows, cols);
    for (long j = 0; j < cols; ++j)
        for (long i = 0; i < rows; ++i) out(i, j) = unif(rng);
    return out;
}

} // namespace

TEST_CASE("implicit step solves to rounding level") {
    SchemeConfig scheme = desk_scheme(10, 4, 0.0, 0.0);
    Eigen::MatrixXd b = random_matrix(scheme.mesh.M.size(), 3, 5);
    Eigen::MatrixXd y = scheme.apply_implicit(b);
    double rel = (scheme.implicit_matrix * y - b).norm() / b.norm();
    CHECK(rel <= 1e-12);
}

TEST_CASE("coefficient field samples and sup-norm") {
    Mesh mesh = build_mesh(6);
    NoiseTree tree = build_tree(3, 1.0);
    CoefficientField coeffs = make_coefficients(
        [](double t, double) { return 1.0 + t; }, [](double, double x) { return -2.0 * x; },
        mesh, tree);
    CHECK(coeffs.a1_samples.rows() == 6);
    CHECK(coeffs.a1_samples.cols() == 3);
    // Left-endpoint sampling: the largest a1 sample is 1 + t_{K-1}.
    double t_last = tree.t_at(2);
    double x_last = mesh.M.point(5);
    CHECK(coeffs.H_norm == doctest::Approx((1.0 + t_last) + 2.0 * x_last));
}

TEST_CASE("zero data stays zero and the uncontrolled noiseless energy contracts") {
    SchemeConfig scheme = desk_scheme(6, 4, 0.0, 0.0);
    ControlPair none = zero_controls(scheme.mesh, scheme.tree);
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(scheme.mesh.M.size());
    AdaptedField y = solve_forward(zero, none, scheme);
    CHECK(scheme.level_norm2(y.values[scheme.tree.K]) == 0.0);

    Eigen::VectorXd y0(scheme.mesh.M.size());
    for (long i = 0; i < y0.size(); ++i)
        y0(i) = std::sin(3.14159265358979 * scheme.mesh.M.point(i));
    AdaptedField flow = solve_forward(y0, none, scheme);
    double previous = scheme.mesh.h * y0.squaredNorm();
    for (int k = 1; k <= scheme.tree.K; ++k) {
        double energy = scheme.level_norm2(flow.values[k]);
        CHECK(energy <= previous * (1.0 + 1e-14));
        previous = energy;
    }
}

TEST_CASE("one noiseless implicit step matches the dense solve on both leaves") {
    SchemeConfig scheme = desk_scheme(6, 1, 0.0, 0.0);
    Eigen::VectorXd y0 = random_matrix(6, 1, 17);
    ControlPair none = zero_controls(scheme.mesh, scheme.tree);
    AdaptedField y = solve_forward(y0, none, scheme);
    Eigen::VectorXd direct = scheme.implicit_matrix.ldlt().solve(y0);
    CHECK((y.values[1].col(0) - direct).norm() <= 1e-11 * direct.norm());
    CHECK((y.values[1].col(1) - direct).norm() <= 1e-11 * direct.norm());
}

TEST_CASE("noise cancels in expectation when v = 0") {
    SchemeConfig scheme = desk_scheme(6, 3, 0.5, 0.8);
    ControlPair none = zero_controls(scheme.mesh, scheme.tree);
    Eigen::VectorXd y0 = random_matrix(6, 1, 23);
    AdaptedField y = solve_forward(y0, none, scheme);

    // The deterministic run drops the noise term entirely.
    Eigen::VectorXd mean = y0;
    for (int k = 0; k < scheme.tree.K; ++k) {
        Eigen::VectorXd a1 = scheme.coeffs.a1_samples.col(k);
        mean = scheme.apply_implicit(mean + scheme.tree.dt * a1.asDiagonal() * mean);
    }
    CHECK((expectation(y, scheme.tree.K) - mean).norm() <= 1e-12 * mean.norm());
}

TEST_CASE("backward of leaf-constant data is deterministic with zero martingale part") {
    SchemeConfig scheme = desk_scheme(6, 3, 0.0, 0.0);
    Eigen::VectorXd profile = random_matrix(6, 1, 31);
    Eigen::MatrixXd zT = profile.replicate(1, scheme.tree.leaves());
    BackwardSolution adj = solve_backward(zT, scheme);

    for (int k = 0; k < scheme.tree.K; ++k)
        CHECK(adj.zeta.values[k].norm() <= 1e-13 * profile.norm());

    Eigen::VectorXd expected = profile;
    for (int k = 0; k < scheme.tree.K; ++k) expected = scheme.apply_implicit(expected);
    CHECK((adj.z.values[0].col(0) - expected).norm() <= 1e-11 * expected.norm());
}

TEST_CASE("two-leaf backward splits mean and swing") {
    SchemeConfig scheme = desk_scheme(6, 1, 0.0, 0.0);
    double c = 0.7;
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(6);
    Eigen::MatrixXd zT(6, 2);
    zT.col(0) = c * ones;  // up leaf
    zT.col(1) = -c * ones; // down leaf
    BackwardSolution adj = solve_backward(zT, scheme);
    CHECK(adj.m.values[0].norm() <= 1e-14);
    Eigen::VectorXd zeta_expected =
        scheme.apply_implicit(Eigen::MatrixXd(c / scheme.tree.sqrt_dt * ones));
    CHECK((adj.zeta.values[0] - zeta_expected).norm() <= 1e-12 * zeta_expected.norm());
}

TEST_CASE("duality gap vanishes for random data with active coefficients") {
    SchemeConfig scheme = desk_scheme(6, 4, 1.0, 0.5);
    const NoiseTree& tree = scheme.tree;
    for (unsigned trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd y0 = random_matrix(6, 1, 100 + trial);
        Eigen::MatrixXd zT = random_matrix(6, tree.leaves(), 200 + trial);
        ControlPair controls = zero_controls(scheme.mesh, tree);
        for (int k = 0; k < tree.K; ++k) {
            controls.u.values[k] = random_matrix(6, tree.nodes_at(k), 300 + 16 * trial + k);
            controls.v.values[k] = random_matrix(6, tree.nodes_at(k), 400 + 16 * trial + k);
        }
        double gap = duality_gap(y0, zT, controls, scheme);
        CHECK(std::abs(gap) <= 1e-10);
    }
}

TEST_CASE("forward map and backward map are adjoint") {
    SchemeConfig scheme = desk_scheme(6, 4, 0.7, 0.4);
    ControlPair none = zero_controls(scheme.mesh, scheme.tree);
    for (unsigned trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd y0 = random_matrix(6, 1, 500 + trial);
        Eigen::MatrixXd zT = random_matrix(6, scheme.tree.leaves(), 600 + trial);
        AdaptedField y = solve_forward(y0, none, scheme);
        BackwardSolution adj = solve_backward(zT, scheme);
        double lhs = scheme.level_inner(y.values[scheme.tree.K], zT);
        double rhs = scheme.mesh.h * y0.dot(adj.z.values[0].col(0));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("shape mismatches are rejected") {
    SchemeConfig scheme = desk_scheme(6, 2, 0.0, 0.0);
    Eigen::VectorXd bad_y0 = Eigen::VectorXd::Zero(5);
    ControlPair none = zero_controls(scheme.mesh, scheme.tree);
    CHECK_THROWS_AS(solve_forward(bad_y0, none, scheme), error);
    Eigen::MatrixXd bad_zT = Eigen::MatrixXd::Zero(6, 3);
    CHECK_THROWS_AS(solve_backward(bad_zT, scheme), error);
}

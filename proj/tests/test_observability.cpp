#include <cmath>
#include <random>

#include "doctest.h"

#include "error.hpp"
#include "observability.hpp"

using namespace shum;

namespace {

SchemeConfig desk_scheme(long N, int K, double a1_value, double a2_value,
                         Interval region = {0.3, 0.8}) {
    Mesh mesh = build_mesh(N);
    NoiseTree tree = build_tree(K, 1.0);
    CoefficientField coeffs = make_coefficients(
        [a1_value](double, double) { return a1_value; },
        [a2_value](double, double) { return a2_value; }, mesh, tree);
    return make_scheme(mesh, tree, coeffs, region);
}

Eigen::MatrixXd random_leaves(const SchemeConfig& scheme, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::MatrixXd out(scheme.mesh.M.size(), scheme.tree.leaves());
    for (long j = 0; j < out.cols(); ++j)
        for (long i = 0; i < out.rows(); ++i) out(i, j) = unif(rng);
    return out;
}

} // namespace

TEST_CASE("quotient is scale invariant and positive") {
    SchemeConfig scheme = desk_scheme(6, 4, 1.0, 0.5);
    Eigen::MatrixXd zT = random_leaves(scheme, 5);
    double q = observability_quotient(zT, scheme, 1e-3);
    CHECK(q > 0.0);
    CHECK(std::isfinite(q));
    double q_scaled = observability_quotient(Eigen::MatrixXd(3.5 * zT), scheme, 1e-3);
    CHECK(std::abs(q_scaled - q) <= 1e-12 * q);
}

TEST_CASE("stronger terminal regularization lowers the quotient") {
    SchemeConfig scheme = desk_scheme(6, 4, 0.0, 0.0);
    Eigen::MatrixXd zT = random_leaves(scheme, 8);
    double q1 = observability_quotient(zT, scheme, 1e-4);
    double q2 = observability_quotient(zT, scheme, 1e-2);
    double q3 = observability_quotient(zT, scheme, 1.0);
    CHECK(q1 > q2);
    CHECK(q2 > q3);
}

TEST_CASE("enlarging the observation region cannot raise the quotient") {
    SchemeConfig narrow = desk_scheme(6, 4, 1.0, 0.5, Interval{0.4, 0.7});
    SchemeConfig wide = desk_scheme(6, 4, 1.0, 0.5, Interval{0.2, 0.9});
    Eigen::MatrixXd zT = random_leaves(narrow, 13);
    CHECK(observability_quotient(zT, wide, 1e-3)
          <= observability_quotient(zT, narrow, 1e-3) * (1.0 + 1e-12));
}

TEST_CASE("zero terminal data has no quotient") {
    SchemeConfig scheme = desk_scheme(6, 3, 1.0, 0.5);
    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(scheme.mesh.M.size(), scheme.tree.leaves());
    CHECK_THROWS_WITH_AS(observability_quotient(zero, scheme, 1e-3),
                         doctest::Contains("zero terminal data"), error);
    CHECK_THROWS_WITH_AS(observability_quotient(random_leaves(scheme, 1), scheme, 0.0),
                         doctest::Contains("must be positive"), error);
}

TEST_CASE("power iteration converges on a small problem and fills the report") {
    SchemeConfig scheme = desk_scheme(6, 4, 1.0, 0.5);
    ObservabilityReport report = estimate_Cobs(scheme, 1e-3, 1e-8, 0);
    CHECK(report.N == 6);
    CHECK(report.h == doctest::Approx(1.0 / 7.0));
    CHECK(report.K == 4);
    CHECK(report.T == 1.0);
    CHECK(report.H_norm == doctest::Approx(1.5));
    CHECK(report.eps_T == 1e-3);
    CHECK(report.converged);
    CHECK(report.iterations >= 1);
    CHECK(report.quotient > 0.0);
    CHECK(std::isfinite(report.fitted_C));

    // The converged quotient dominates the quotient of any particular probe.
    double probe = observability_quotient(random_leaves(scheme, 77), scheme, 1e-3);
    CHECK(report.quotient >= probe * (1.0 - 1e-6));
}

TEST_CASE("an iteration cap flags the report instead of throwing") {
    SchemeConfig scheme = desk_scheme(6, 4, 1.0, 0.5);
    ObservabilityReport report = estimate_Cobs(scheme, 1e-3, 1e-14, 1);
    CHECK_FALSE(report.converged);
    CHECK(report.iterations == 1);
    CHECK(report.quotient > 0.0);
}

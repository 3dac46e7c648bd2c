#include <cmath>

#include "doctest.h"

#include "error.hpp"
#include "mesh.hpp"
#include "weights.hpp"

using namespace shum;

namespace {

WeightParams desk_params(double lambda = 2.0, double mu = 0.1, double delta = 0.25,
                         double T = 1.0) {
    return make_weight_params(lambda, mu, delta, T, build_psi(Interval{0.55, 0.65}, 0.1));
}

} // namespace

TEST_CASE("psi profile: vertex, slopes, and off-core slope floor") {
    PsiFunction psi = build_psi(Interval{0.55, 0.65}, 0.1);
    CHECK(psi.x0 == doctest::Approx(0.6));
    CHECK(psi.dpsi(0.0) == doctest::Approx(1.2));
    CHECK(psi.dpsi(1.0) == doctest::Approx(-0.8));
    CHECK(psi.C0 == doctest::Approx(0.1));
    CHECK(psi.psi(psi.x0) == doctest::Approx(psi.K));
    CHECK(psi.psi(-0.1) > 0.0);
    CHECK(psi.psi(1.1) > 0.0);
}

TEST_CASE("psi rejects cores touching the domain boundary") {
    CHECK_THROWS_WITH_AS(build_psi(Interval{0.0, 0.4}, 0.1),
                         doctest::Contains("compactly contained"), error);
    CHECK_THROWS_AS(build_psi(Interval{0.6, 1.0}, 0.1), error);
    CHECK_THROWS_AS(build_psi(Interval{0.5, 0.6}, 0.0), error);
}

TEST_CASE("theta formula values and symmetry") {
    WeightParams p = desk_params();
    CHECK(eval_theta(0.5, p) == doctest::Approx(16.0 / 9.0));
    CHECK(eval_theta(0.0, p) == doctest::Approx(3.2));
    CHECK(eval_theta(0.0, p) == doctest::Approx(eval_theta(1.0, p)));
    CHECK_THROWS_AS(eval_theta(-0.01, p), error);
    CHECK_THROWS_AS(eval_theta(1.01, p), error);
}

TEST_CASE("theta floor bounds from the time-weight shape") {
    WeightParams p = desk_params();
    double T = p.T;
    double floor = 1.0 / (T * T);
    double mid = eval_theta(T / 2.0, p);
    for (int i = 0; i <= 1000; ++i) {
        double t = T * i / 1000.0;
        CHECK(eval_theta(t, p) >= mid - 1e-15);
        CHECK(eval_theta(t, p) >= floor);
    }
    CHECK(eval_theta(0.0, p) >= 0.5 / (p.delta * T * T));
    // On the middle half of the horizon theta stays below its quarter-time value.
    double quarter = eval_theta(T / 4.0, p);
    for (int i = 250; i <= 750; ++i)
        CHECK(eval_theta(T * i / 1000.0, p) <= quarter + 1e-15);
}

TEST_CASE("phi is negative and r, rho are exact reciprocals") {
    Mesh mesh = build_mesh(8);
    WeightParams p = desk_params();
    WeightSlice slice = eval_weights(0.37, p, mesh);
    CHECK(slice.nodes.size() == mesh.M_bar.size() + 1); // half nodes -h/2 .. 1+h/2
    for (Eigen::Index i = 0; i < slice.phi.size(); ++i) {
        CHECK(slice.phi[i] < 0.0);
        CHECK(slice.r[i] * slice.rho[i] == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(slice.varphi[i] > 0.0);
    }
}

TEST_CASE("r decreases pointwise as lambda grows") {
    Mesh mesh = build_mesh(8);
    double previous = -1.0;
    for (double lambda : {1.0, 2.0, 4.0}) {
        WeightParams p = desk_params(lambda);
        WeightSlice slice = eval_weights(0.5, p, mesh);
        double value = slice.r[3];
        if (previous >= 0.0) CHECK(value < previous);
        previous = value;
    }
}

TEST_CASE("weight overflow guard asks for smaller lambda or larger delta") {
    Mesh mesh = build_mesh(8);
    WeightParams p = desk_params(1e6, 0.1, 0.01, 1.0);
    CHECK_THROWS_WITH_AS(eval_weights(0.0, p, mesh), doctest::Contains("smaller lambda"), error);
}

TEST_CASE("parameter validation") {
    PsiFunction psi = build_psi(Interval{0.55, 0.65}, 0.1);
    CHECK_THROWS_WITH_AS(make_weight_params(2.0, 0.1, 0.6, 1.0, psi),
                         doctest::Contains("(0, 1/2)"), error);
    CHECK_THROWS_AS(make_weight_params(2.0, -0.1, 0.25, 1.0, psi), error);
    CHECK_THROWS_AS(make_weight_params(0.0, 0.1, 0.25, 1.0, psi), error);
}

TEST_CASE("regime report booleans, boundary-inclusive") {
    WeightParams p = desk_params(2.0); // T = 1: lambda0 (T+T^2) = 2 lambda0
    RegimeReport at_boundary = regime_check(p, 0.125, 1.0, 1.0, 1.0, 1.0, 0.0);
    CHECK(at_boundary.lambda_ok); // lambda = lambda0 (T+T^2) exactly
    CHECK(at_boundary.h_ok);
    CHECK(at_boundary.eps_ok); // lambda h / (delta T^2) = 1 = eps0 exactly
    CHECK(at_boundary.h1 == doctest::Approx(0.5));
    CHECK(at_boundary.h1_ok);
    CHECK(at_boundary.all());

    // A strict violation of the eps condition flips only that flag.
    RegimeReport violated = regime_check(p, 0.125 * (1.0 + 1e-6), 1.0, 1.0, 1.0, 1.0, 0.0);
    CHECK_FALSE(violated.eps_ok);

    RegimeReport small_lambda = regime_check(desk_params(1.9), 0.1, 1.0, 1.0, 1.0, 1.0, 0.0);
    CHECK_FALSE(small_lambda.lambda_ok);
}

TEST_CASE("stencil composition is exact on affine functions") {
    auto affine = [](double x) { return 2.5 * x - 0.75; };
    double d1 = stencil_compose(affine, 0.4, 1, 1, 0.05);
    CHECK(d1 == doctest::Approx(2.5).epsilon(1e-13));
    double d0 = stencil_compose(affine, 0.4, 2, 0, 0.05);
    CHECK(d0 == doctest::Approx(affine(0.4)).epsilon(1e-13));
}

TEST_CASE("fitted order detects the rounding floor on exact data") {
    auto linear_diff = [](double x, double h) {
        auto affine = [](double v) { return 3.0 * v; };
        return stencil_compose(affine, x, 1, 1, h);
    };
    OrderFit fit = fit_order(linear_diff, 3.0, 0.5, {1.0 / 16, 1.0 / 32, 1.0 / 64});
    CHECK(fit.exact_at_precision);
}

TEST_CASE("weight remainder orders are second order in h") {
    WeightParams p = desk_params();
    std::vector<double> h_list = {1.0 / 16, 1.0 / 32, 1.0 / 64};
    for (auto [m, n] : {std::pair{1, 1}, {2, 2}, {1, 3}}) {
        CAPTURE(m);
        CAPTURE(n);
        RemainderOrder order = remainder_order(p, m, n, 0.5, 0.5, h_list);
        if (!order.exact_plain) CHECK(order.order_plain == doctest::Approx(2.0).epsilon(0.15));
        if (!order.exact_weighted)
            CHECK(order.order_weighted == doctest::Approx(2.0).epsilon(0.15));
    }
}

TEST_CASE("remainder order enforces the admissible-regime precondition") {
    WeightParams p = desk_params(2.0, 0.1, 0.25, 1.0);
    // lambda h / (delta T^2) = 2 * 0.25 / 0.25 = 2 > 1 at h = 1/4.
    CHECK_THROWS_WITH_AS(remainder_order(p, 1, 1, 0.5, 0.5, {0.25, 0.125, 0.0625}),
                         doctest::Contains("admissible regime"), error);
    CHECK_THROWS_AS(remainder_order(p, 1, 1, 0.5, 0.5, {1.0 / 16, 1.0 / 32}), error);
    CHECK_THROWS_AS(remainder_order(p, 1, 1, 0.5, 0.5, {1.0 / 16, 1.0 / 24, 1.0 / 32}), error);
}

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"

#include "calculus.hpp"
#include "error.hpp"
#include "mesh.hpp"

using namespace shum;

TEST_CASE("difference and average land on the dual set") {
    Mesh mesh = build_mesh(5);
    GridFunction u = grid_from_fn(mesh.M_bar, [](double x) { return x * x; });
    GridFunction du = apply_Dh(u);
    GridFunction au = apply_Ah(u);
    CHECK(du.set.same_nodes(prime(mesh.M_bar)));
    CHECK(au.set.same_nodes(prime(mesh.M_bar)));
    // D_h of x^2 at a half node equals the exact centered slope 2x.
    for (std::size_t i = 0; i < du.set.size(); ++i)
        CHECK(du.values[i] == doctest::Approx(2.0 * du.set.point(i)));
    // A_h of x^2 at x equals x^2 + h^2/4 exactly.
    for (std::size_t i = 0; i < au.set.size(); ++i)
        CHECK(au.values[i]
              == doctest::Approx(au.set.point(i) * au.set.point(i) + mesh.h * mesh.h / 4.0));
}

TEST_CASE("linear functions differentiate exactly and average to themselves") {
    Mesh mesh = build_mesh(6);
    GridFunction u = grid_from_fn(mesh.M_ext, [](double x) { return 3.0 * x - 1.0; });
    GridFunction du = apply_Dh(u);
    GridFunction au = apply_Ah(u);
    CHECK(du.values.isApproxToConstant(3.0, 1e-14));
    for (std::size_t i = 0; i < au.set.size(); ++i)
        CHECK(au.values[i] == doctest::Approx(3.0 * au.set.point(i) - 1.0));
}

TEST_CASE("fourth difference power matches the assembled operator on interior nodes") {
    Mesh mesh = build_mesh(7);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::VectorXd w(mesh.M.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = unif(rng);

    GridFunction u(mesh.M, w);
    GridFunction ext = ghost_extend(u, mesh);
    GridFunction d4 = apply_Dh_pow(ext, 4);
    BiharmonicOperator op = assemble_biharmonic(mesh);
    Eigen::VectorXd via_matrix = op.matrix * w;

    GridFunction d4_on_M = restrict_to(d4, mesh.M);
    for (std::size_t i = 0; i < mesh.M.size(); ++i)
        CHECK(d4_on_M.values[i] == doctest::Approx(via_matrix[i]).epsilon(1e-12));
}

TEST_CASE("biharmonic stencil rows carry the clamped boundary closure") {
    Mesh mesh = build_mesh(5);
    BiharmonicOperator op = assemble_biharmonic(mesh);
    double h4 = std::pow(mesh.h, 4);
    CHECK(op.matrix(0, 0) == doctest::Approx(6.0 / h4));
    CHECK(op.matrix(0, 1) == doctest::Approx(-4.0 / h4));
    CHECK(op.matrix(0, 2) == doctest::Approx(1.0 / h4));
    CHECK(op.matrix(2, 0) == doctest::Approx(1.0 / h4));
    CHECK(op.matrix(2, 1) == doctest::Approx(-4.0 / h4));
    CHECK(op.matrix(2, 2) == doctest::Approx(6.0 / h4));
    CHECK(op.matrix.isApprox(op.matrix.transpose()));
}

TEST_CASE("the operator is the Gram matrix of the second difference") {
    Mesh mesh = build_mesh(6);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::VectorXd a(mesh.M.size()), b(mesh.M.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        a[i] = unif(rng);
        b[i] = unif(rng);
    }
    BiharmonicOperator op = assemble_biharmonic(mesh);

    GridFunction ya(mesh.M, a), yb(mesh.M, b);
    GridFunction d2a = apply_Dh_pow(ghost_extend(ya, mesh), 2);
    GridFunction d2b = apply_Dh_pow(ghost_extend(yb, mesh), 2);
    GridFunction d2a_bar = restrict_to(d2a, mesh.M_bar);
    GridFunction d2b_bar = restrict_to(d2b, mesh.M_bar);

    double lhs = mesh.h * double(a.transpose() * op.matrix * b);
    double rhs = inner_product(d2a_bar, d2b_bar);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("identity residuals vanish for seeded random fields") {
    for (long N : {5L, 9L}) {
        Mesh mesh = build_mesh(N);
        IdentityReport report = identity_suite(mesh, 50, 1234);
        REQUIRE(report.results.size() == 12);
        CHECK(report.all_within(1e-13));
    }
}

TEST_CASE("identity names cover the product, reconstruction, and exchange families") {
    Mesh mesh = build_mesh(5);
    IdentityReport report = identity_suite(mesh, 1, 1);
    std::vector<std::string> names;
    for (const auto& r : report.results) names.push_back(r.name);
    for (const char* expected :
         {"difference_product_rule", "average_product_rule", "average_square_reconstruction",
          "average_of_square", "difference_of_square", "difference_summation_by_parts",
          "average_summation_by_parts", "second_difference_exchange", "second_average_exchange",
          "average_difference_exchange", "average_difference_exchange_alt",
          "boundary_trace_identity"}) {
        CAPTURE(expected);
        CHECK(std::find(names.begin(), names.end(), expected) != names.end());
    }
}

TEST_CASE("identity residuals are scaled, not absolute") {
    // Scaling the inputs by 1e6 must not inflate the reported residuals.
    Mesh mesh = build_mesh(5);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    auto draw = [&](const NodeSet& set) {
        Eigen::VectorXd v(set.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = 1e6 * unif(rng);
        return GridFunction(set, v);
    };
    GridFunction u = draw(mesh.M_ext);
    GridFunction v = draw(mesh.M_bar);
    GridFunction w = draw(mesh.M_star);
    for (const IdentityResult& r : identity_residuals(mesh, u, v, w))
        CHECK(r.max_scaled_residual <= 1e-12);
}

TEST_CASE("derivative application rejects empty targets") {
    Mesh mesh = build_mesh(5);
    GridFunction u = grid_constant(mesh.dM, 1.0);
    // A two-point set h apart has no interior half nodes: prime is empty.
    CHECK_THROWS_AS(apply_Dh(u), error);
}

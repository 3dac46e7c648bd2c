#include "calculus.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <random>

namespace shum {

namespace {

enum class stencil { difference, average };

GridFunction apply_staggered(const GridFunction& u, const NodeSet& target, stencil op) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(target.size()));
    for (std::size_t i = 0; i < target.size(); ++i) {
        long index = target.idx[i];
        double up = u.at_index(index + 1);
        double down = u.at_index(index - 1);
        out[static_cast<Eigen::Index>(i)] =
            (op == stencil::difference) ? (up - down) / u.set.h : 0.5 * (up + down);
    }
    return GridFunction(target, std::move(out));
}

} // namespace

GridFunction apply_Dh_on(const GridFunction& u, const NodeSet& target) {
    return apply_staggered(u, target, stencil::difference);
}

GridFunction apply_Ah_on(const GridFunction& u, const NodeSet& target) {
    return apply_staggered(u, target, stencil::average);
}

GridFunction apply_Dh(const GridFunction& u) {
    NodeSet target = prime(u.set);
    require(!target.empty(), errc::config, "input set too small to difference");
    return apply_Dh_on(u, target);
}

GridFunction apply_Ah(const GridFunction& u) {
    NodeSet target = prime(u.set);
    require(!target.empty(), errc::config, "input set too small to average");
    return apply_Ah_on(u, target);
}

GridFunction apply_Dh_pow(const GridFunction& u, int k) {
    require(k >= 1 && k <= 4, errc::config, fmt::format("difference power k must be 1..4, got {}", k));
    GridFunction out = u;
    for (int i = 0; i < k; ++i) out = apply_Dh(out);
    return out;
}

BiharmonicOperator assemble_biharmonic(const Mesh& mesh) {
    const long N = mesh.N;
    const double h4 = std::pow(mesh.h, 4);
    static constexpr double coeff[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    // Ghost and boundary values y_{-1}, y_0, y_{N+1}, y_{N+2} are all zero under
    // the two boundary-condition families, so their stencil contributions drop.
    for (long i = 1; i <= N; ++i)
        for (long o = -2; o <= 2; ++o) {
            long j = i + o;
            if (j >= 1 && j <= N) A(i - 1, j - 1) += coeff[o + 2] / h4;
        }
    return {N, mesh.h, std::move(A)};
}

GridFunction ghost_extend(const GridFunction& u, const Mesh& mesh) {
    require(u.set.same_nodes(mesh.M), errc::config, "ghost extension expects a function on M");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.M_ext.size()));
    v.segment(2, mesh.N) = u.values;
    return GridFunction(mesh.M_ext, std::move(v));
}

double IdentityReport::worst() const {
    double w = 0.0;
    for (const auto& r : results) w = std::max(w, r.max_scaled_residual);
    return w;
}

bool IdentityReport::all_within(double tol) const { return worst() <= tol; }

namespace {

double linf(const GridFunction& u) { return u.values.size() ? u.values.cwiseAbs().maxCoeff() : 0.0; }

double scaled_gap(const GridFunction& a, const GridFunction& b) {
    double gap = (a.values - b.values).cwiseAbs().maxCoeff();
    return gap / std::max({1.0, linf(a), linf(b)});
}

double scaled_gap(double a, double b, double extra = 0.0) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b), std::abs(extra)});
}

GridFunction square(const GridFunction& u) { return cwise_product(u, u); }

} // namespace

std::vector<IdentityResult> identity_residuals(const Mesh& mesh, const GridFunction& u_ext,
                                               const GridFunction& v_bar, const GridFunction& w_star) {
    require(u_ext.set.same_nodes(mesh.M_ext), errc::config, "u must live on the twice-extended lattice");
    require(v_bar.set.same_nodes(mesh.M_bar), errc::config, "v must live on M̄");
    require(w_star.set.same_nodes(mesh.M_star), errc::config, "w must live on M*");

    const double h = mesh.h;
    const NodeSet& M = mesh.M;
    const NodeSet& Ms = mesh.M_star;
    const NodeSet& Mb = mesh.M_bar;
    const NodeSet Mbs = star(Mb); // carries D_h u, A_h u of the extended u

    GridFunction u_bar = restrict_to(u_ext, Mb);
    GridFunction u_M = restrict_to(u_ext, M);

    GridFunction Du = apply_Dh_on(u_bar, Ms);
    GridFunction Au = apply_Ah_on(u_bar, Ms);
    GridFunction Dv = apply_Dh_on(v_bar, Ms);
    GridFunction Av = apply_Ah_on(v_bar, Ms);
    GridFunction Du_wide = apply_Dh_on(u_ext, Mbs);
    GridFunction Au_wide = apply_Ah_on(u_ext, Mbs);

    std::vector<IdentityResult> out;
    auto push = [&out](std::string name, double resid) { out.push_back({std::move(name), resid}); };

    { // D_h(uv) = D_h u A_h v + A_h u D_h v on M*
        GridFunction lhs = apply_Dh_on(cwise_product(u_bar, v_bar), Ms);
        GridFunction rhs = cwise_product(Du, Av) + cwise_product(Au, Dv);
        push("difference_product_rule", scaled_gap(lhs, rhs));
    }
    { // A_h(uv) = A_h u A_h v + (h²/4) D_h u D_h v on M*
        GridFunction lhs = apply_Ah_on(cwise_product(u_bar, v_bar), Ms);
        GridFunction rhs = cwise_product(Au, Av) + (h * h / 4.0) * cwise_product(Du, Dv);
        push("average_product_rule", scaled_gap(lhs, rhs));
    }
    { // u = A_h² u − (h²/4) D_h² u on the double-dual interior
        GridFunction rhs = apply_Ah_on(Au, M) - (h * h / 4.0) * apply_Dh_on(Du, M);
        push("average_square_reconstruction", scaled_gap(u_M, rhs));
    }
    { // A_h(u²) = (A_h u)² + (h²/4)(D_h u)² on M*
        GridFunction lhs = apply_Ah_on(square(u_bar), Ms);
        GridFunction rhs = square(Au) + (h * h / 4.0) * square(Du);
        push("average_of_square", scaled_gap(lhs, rhs));
    }
    { // D_h(u²) = 2 D_h u A_h u on M*
        GridFunction lhs = apply_Dh_on(square(u_bar), Ms);
        GridFunction rhs = 2.0 * cwise_product(Du, Au);
        push("difference_of_square", scaled_gap(lhs, rhs));
    }
    auto u_at = [&](double x) { return u_ext.at_index(static_cast<long>(std::round(x / (h / 2)))); };
    auto sum_dM = [&](auto&& f) {
        double acc = 0.0;
        for (const auto& sig : boundary_signatures(M)) acc += f(sig);
        return acc;
    };
    auto sum_dMs = [&](auto&& f) {
        double acc = 0.0;
        for (const auto& sig : boundary_signatures(Ms)) acc += f(sig);
        return acc;
    };

    { // ∫_M u D_h w = −∫_{M*} D_h u w + ∮_{∂M} u t_r(w) ν
        double lhs = integrate(cwise_product(u_M, apply_Dh_on(w_star, M)));
        double interior = -integrate(cwise_product(Du, w_star));
        double bterm = sum_dM([&](const BoundarySignature& sig) {
            return u_at(sig.point) * trace(w_star, sig.point, M) * sig.nu;
        });
        push("difference_summation_by_parts", scaled_gap(lhs, interior + bterm, interior));
    }
    { // ∫_M u A_h w = ∫_{M*} A_h u w − (h/2) ∮_{∂M} u t_r(w)
        double lhs = integrate(cwise_product(u_M, apply_Ah_on(w_star, M)));
        double interior = integrate(cwise_product(Au, w_star));
        double bterm = sum_dM([&](const BoundarySignature& sig) {
            return u_at(sig.point) * trace(w_star, sig.point, M);
        });
        push("average_summation_by_parts", scaled_gap(lhs, interior - 0.5 * h * bterm, interior));
    }

    GridFunction D2v_M = apply_Dh_on(Dv, M);
    GridFunction A2v_M = apply_Ah_on(Av, M);
    GridFunction ADv_M = apply_Ah_on(Dv, M);
    GridFunction D2u_bar = apply_Dh_on(Du_wide, Mb);
    GridFunction A2u_bar = apply_Ah_on(Au_wide, Mb);
    GridFunction ADu_bar = apply_Ah_on(Du_wide, Mb);
    GridFunction Du_dMs = apply_Dh_on(u_ext, mesh.dM_star);
    GridFunction Au_dMs = apply_Ah_on(u_ext, mesh.dM_star);
    auto at_point = [&](const GridFunction& g, double x) {
        return g.at_index(static_cast<long>(std::round(x / (h / 2))));
    };

    { // ∫_M u D_h²v = ∫_{M̄} v D_h²u − ∮_{∂M*} D_h u t_r(v) ν + ∮_{∂M} u t_r(D_h v) ν
        double lhs = integrate(cwise_product(u_M, D2v_M));
        double interior = integrate(cwise_product(v_bar, D2u_bar));
        double b1 = sum_dMs([&](const BoundarySignature& sig) {
            return at_point(Du_dMs, sig.point) * trace(v_bar, sig.point, Ms) * sig.nu;
        });
        double b2 = sum_dM([&](const BoundarySignature& sig) {
            return u_at(sig.point) * trace(Dv, sig.point, M) * sig.nu;
        });
        push("second_difference_exchange", scaled_gap(lhs, interior - b1 + b2, interior));
    }
    { // ∫_M u A_h²v = ∫_{M̄} v A_h²u − (h/2) ∮_{∂M*} A_h u t_r(v) − (h/2) ∮_{∂M} u t_r(A_h v)
        double lhs = integrate(cwise_product(u_M, A2v_M));
        double interior = integrate(cwise_product(v_bar, A2u_bar));
        double b1 = sum_dMs([&](const BoundarySignature& sig) {
            return at_point(Au_dMs, sig.point) * trace(v_bar, sig.point, Ms);
        });
        double b2 = sum_dM([&](const BoundarySignature& sig) {
            return u_at(sig.point) * trace(Av, sig.point, M);
        });
        push("second_average_exchange",
             scaled_gap(lhs, interior - 0.5 * h * b1 - 0.5 * h * b2, interior));
    }
    { // ∫_M u A_hD_h v = −∫_{M̄} v A_hD_h u + (h/2) ∮_{∂M*} D_h u t_r(v) + ∮_{∂M} u t_r(A_h v) ν
        double lhs = integrate(cwise_product(u_M, ADv_M));
        double interior = -integrate(cwise_product(v_bar, ADu_bar));
        double b1 = sum_dMs([&](const BoundarySignature& sig) {
            return at_point(Du_dMs, sig.point) * trace(v_bar, sig.point, Ms);
        });
        double b2 = sum_dM([&](const BoundarySignature& sig) {
            return u_at(sig.point) * trace(Av, sig.point, M) * sig.nu;
        });
        push("average_difference_exchange", scaled_gap(lhs, interior + 0.5 * h * b1 + b2, interior));
    }
    { // second form: −∫_{M̄} v A_hD_h u − (h/2) ∮_{∂M} u t_r(D_h v) + ∮_{∂M*} A_h u t_r(v) ν
        double lhs = integrate(cwise_product(u_M, ADv_M));
        double interior = -integrate(cwise_product(v_bar, ADu_bar));
        double b1 = sum_dM([&](const BoundarySignature& sig) {
            return u_at(sig.point) * trace(Dv, sig.point, M);
        });
        double b2 = sum_dMs([&](const BoundarySignature& sig) {
            return at_point(Au_dMs, sig.point) * trace(v_bar, sig.point, Ms) * sig.nu;
        });
        push("average_difference_exchange_alt", scaled_gap(lhs, interior - 0.5 * h * b1 + b2, interior));
    }
    { // t_r(|A_h u|²)ν − (h²/4) t_r(|D_h u|²)ν = |u|²ν − h·u·t_r(D_h u) at each boundary node
        double worst = 0.0;
        for (const auto& sig : boundary_signatures(M)) {
            double lhs = trace(square(Au), sig.point, M) * sig.nu -
                         (h * h / 4.0) * trace(square(Du), sig.point, M) * sig.nu;
            double uval = u_at(sig.point);
            double rhs = uval * uval * sig.nu - h * uval * trace(Du, sig.point, M);
            worst = std::max(worst, scaled_gap(lhs, rhs));
        }
        push("boundary_trace_identity", worst);
    }
    return out;
}

IdentityReport identity_suite(const Mesh& mesh, int trials, unsigned seed) {
    require(trials >= 1, errc::config, "identity suite needs at least one trial");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    auto draw = [&](const NodeSet& s) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(s.size()));
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
        return GridFunction(s, std::move(v));
    };

    IdentityReport report;
    for (int t = 0; t < trials; ++t) {
        auto resids = identity_residuals(mesh, draw(mesh.M_ext), draw(mesh.M_bar), draw(mesh.M_star));
        if (report.results.empty()) {
            report.results = std::move(resids);
        } else {
            for (std::size_t i = 0; i < resids.size(); ++i)
                report.results[i].max_scaled_residual =
                    std::max(report.results[i].max_scaled_residual, resids[i].max_scaled_residual);
        }
    }
    return report;
}

} // namespace shum

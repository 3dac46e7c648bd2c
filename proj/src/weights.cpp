#include "weights.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace shum {

PsiFunction build_psi(Interval G2, double margin) {
    require(G2.lo < G2.hi, errc::config, "G2 must be a nonempty open interval");
    require(G2.lo > 0.0 && G2.hi < 1.0, errc::config,
            fmt::format("G2 = ({}, {}) must be compactly contained in (0, 1)", G2.lo, G2.hi));
    require(margin > 0.0, errc::config, "domain margin must be positive");

    PsiFunction psi;
    psi.x0 = G2.midpoint();
    psi.margin = margin;
    psi.K = (1.0 + margin + psi.x0) * (1.0 + margin + psi.x0) + 1.0;
    psi.C0 = 2.0 * std::min(psi.x0 - G2.lo, G2.hi - psi.x0);

    // The construction guarantees these, but the contract is the sampled check.
    const int samples = 10000;
    for (int i = 0; i <= samples; ++i) {
        double x = -margin + (1.0 + 2.0 * margin) * i / samples;
        require(psi.psi(x) > 0.0, errc::internal, "psi must be positive on the enlarged domain");
        bool inside_01 = x >= 0.0 && x <= 1.0;
        if (inside_01 && !G2.contains(x))
            require(std::abs(psi.dpsi(x)) >= psi.C0 - 1e-13, errc::internal,
                    "psi slope must dominate C0 away from G2");
    }
    require(psi.dpsi(0.0) > 0.0 && psi.dpsi(1.0) < 0.0, errc::internal,
            "psi must increase into the domain at 0 and decrease at 1");
    return psi;
}

WeightParams make_weight_params(double lambda, double mu, double delta, double T, PsiFunction psi) {
    require(lambda > 0.0, errc::config, fmt::format("lambda must be positive, got {}", lambda));
    require(mu > 0.0, errc::config, fmt::format("mu must be positive, got {}", mu));
    require(delta > 0.0 && delta < 0.5, errc::config,
            fmt::format("delta must lie in (0, 1/2), got {}", delta));
    require(T > 0.0, errc::config, fmt::format("time horizon T must be positive, got {}", T));
    return {lambda, mu, delta, T, psi};
}

double eval_theta(double t, const WeightParams& p) {
    require(t >= 0.0 && t <= p.T, errc::config,
            fmt::format("theta is defined on [0, T]; got t = {}, T = {}", t, p.T));
    return 1.0 / ((t + p.delta * p.T) * (p.T + p.delta * p.T - t));
}

double eval_varphi(double x, const WeightParams& p) {
    return std::exp(p.mu * (2.0 * p.psi.sup_norm() + p.psi.psi(x)));
}

double eval_phi(double x, const WeightParams& p) {
    return eval_varphi(x, p) - std::exp(4.0 * p.mu * p.psi.sup_norm());
}

WeightSlice eval_weights(double t, const WeightParams& p, const Mesh& mesh) {
    WeightSlice slice;
    slice.t = t;
    slice.theta = eval_theta(t, p);
    slice.s = p.lambda * slice.theta;
    slice.nodes = star(mesh.M_bar);
    auto n = static_cast<Eigen::Index>(slice.nodes.size());
    slice.phi.resize(n);
    slice.varphi.resize(n);
    slice.r.resize(n);
    slice.rho.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double x = slice.nodes.point(static_cast<std::size_t>(i));
        slice.varphi[i] = eval_varphi(x, p);
        slice.phi[i] = eval_phi(x, p);
        double exponent = slice.s * slice.phi[i];
        if (std::abs(exponent) > 700.0)
            fail_numeric(fmt::format(
                "weight exponent |s·phi| = {:.3g} exceeds the double range at x = {}; "
                "choose a smaller lambda or a larger delta",
                std::abs(exponent), x));
        slice.r[i] = std::exp(exponent);
        slice.rho[i] = std::exp(-exponent);
    }
    return slice;
}

RegimeReport regime_check(const WeightParams& p, double h, double lambda0, double eps0, double h0,
                          double C, double H) {
    RegimeReport rep;
    rep.lambda_ok = p.lambda >= lambda0 * (p.T + p.T * p.T);
    rep.h_ok = h <= h0;
    rep.eps_ok = p.lambda * h / (p.delta * p.T * p.T) <= eps0;
    rep.h1 = C / (1.0 + 1.0 / p.T + std::pow(H, 2.0 / 7.0));
    rep.h1_ok = h <= rep.h1;
    return rep;
}

namespace {

// ϕ^(k) by Leibniz with ψ' = −2(x−x0), ψ'' = −2, higher ψ derivatives zero.
struct PhiDerivs {
    double v0, v1, v2, v3, v4;
};

PhiDerivs phi_derivs(double x, const WeightParams& p) {
    PhiDerivs d{};
    d.v0 = eval_varphi(x, p);
    double p1 = p.psi.dpsi(x);
    double p2 = -2.0;
    d.v1 = p.mu * p1 * d.v0;
    d.v2 = p.mu * (p2 * d.v0 + p1 * d.v1);
    d.v3 = p.mu * (2.0 * p2 * d.v1 + p1 * d.v2);
    d.v4 = p.mu * (3.0 * p2 * d.v2 + p1 * d.v3);
    return d;
}

double rho_at(double x, double s, const WeightParams& p) {
    double exponent = -s * eval_phi(x, p);
    if (std::abs(exponent) > 700.0)
        fail_numeric(fmt::format("weight exponent |s·phi| = {:.3g} exceeds the double range at x = {}; "
                                 "choose a smaller lambda or a larger delta",
                                 std::abs(exponent), x));
    return std::exp(exponent);
}

// ρ^(n) built from ρ' = g₁ρ with g_k = −s·ϕ^(k).
double rho_deriv(double x, double s, int n, const WeightParams& p) {
    PhiDerivs d = phi_derivs(x, p);
    double g1 = -s * d.v1, g2 = -s * d.v2, g3 = -s * d.v3;
    double rho = rho_at(x, s, p);
    switch (n) {
    case 0: return rho;
    case 1: return g1 * rho;
    case 2: return (g2 + g1 * g1) * rho;
    case 3: return (g3 + 3.0 * g1 * g2 + g1 * g1 * g1) * rho;
    default: fail_config("rho derivatives implemented for n = 0..3");
    }
}

// d/dx of r·ρ^(n); the product is exponential-free, so this is plain algebra in ϕ derivatives.
double weighted_deriv_target(double x, double s, int n, const WeightParams& p) {
    PhiDerivs d = phi_derivs(x, p);
    switch (n) {
    case 1: return -s * d.v2;
    case 2: return -s * d.v3 + 2.0 * s * s * d.v1 * d.v2;
    case 3:
        return -s * d.v4 + 3.0 * s * s * (d.v2 * d.v2 + d.v1 * d.v3) -
               3.0 * s * s * s * d.v1 * d.v1 * d.v2;
    default: fail_config("weighted remainder targets implemented for n = 1..3");
    }
}

} // namespace

double stencil_compose(const std::function<double(double)>& f, double x, int m, int n, double h) {
    require(m >= 0 && n >= 0 && m + n >= 1 && m + n <= 8, errc::config,
            "stencil composition expects m, n >= 0 with 1 <= m+n <= 8");
    int w = m + n;
    std::vector<double> vals(static_cast<std::size_t>(2 * w + 1));
    for (int j = -w; j <= w; ++j) vals[static_cast<std::size_t>(j + w)] = f(x + j * h / 2.0);
    for (int pass = 0; pass < n; ++pass) {
        std::vector<double> next(vals.size() - 2);
        for (std::size_t i = 0; i < next.size(); ++i) next[i] = (vals[i + 2] - vals[i]) / h;
        vals = std::move(next);
    }
    for (int pass = 0; pass < m; ++pass) {
        std::vector<double> next(vals.size() - 2);
        for (std::size_t i = 0; i < next.size(); ++i) next[i] = 0.5 * (vals[i + 2] + vals[i]);
        vals = std::move(next);
    }
    return vals.front();
}

OrderFit fit_order(const std::function<double(double, double)>& value_at_h, double target, double x,
                   const std::vector<double>& h_list) {
    OrderFit fit;
    for (double h : h_list) {
        double err = std::abs(value_at_h(x, h) - target);
        fit.errors.push_back(err);
        if (err < 1e-14) fit.exact_at_precision = true;
    }
    if (fit.exact_at_precision) {
        fit.order = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }
    // least-squares slope of log err vs log h
    double n = static_cast<double>(h_list.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < h_list.size(); ++i) {
        double lx = std::log(h_list[i]);
        double ly = std::log(fit.errors[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    fit.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return fit;
}

RemainderOrder remainder_order(const WeightParams& p, int m, int n, double t, double x,
                               const std::vector<double>& h_list) {
    require(n >= 1 && n <= 3 && m >= 0 && m + n <= 8, errc::config,
            "remainder orders implemented for n in 1..3 and small m");
    require(h_list.size() >= 3, errc::config, "order fit needs at least three spacings");
    for (std::size_t i = 0; i + 1 < h_list.size(); ++i)
        require(std::abs(h_list[i + 1] - 0.5 * h_list[i]) <= 1e-12 * h_list[i], errc::config,
                "order fit expects each spacing to halve the previous one");
    double h_max = h_list.front();
    require(p.lambda * h_max / (p.delta * p.T * p.T) <= 1.0, errc::config,
            fmt::format("largest spacing violates the admissible regime: lambda*h/(delta*T^2) = {:.4g} > 1",
                        p.lambda * h_max / (p.delta * p.T * p.T)));

    double s = p.lambda * eval_theta(t, p);
    auto rho_fn = [&](double xx) { return rho_at(xx, s, p); };

    RemainderOrder out;
    OrderFit plain = fit_order(
        [&](double xx, double h) { return stencil_compose(rho_fn, xx, m, n, h); },
        rho_deriv(x, s, n, p), x, h_list);
    out.order_plain = plain.order;
    out.exact_plain = plain.exact_at_precision;

    OrderFit weighted = fit_order(
        [&](double xx, double h) {
            auto weighted_fn = [&](double xi) {
                return rho_at(xi, -s, p) * stencil_compose(rho_fn, xi, m, n, h); // r = e^{sφ} = ρ(−s)
            };
            return stencil_compose(weighted_fn, xx, 1, 1, h);
        },
        weighted_deriv_target(x, s, n, p), x, h_list);
    out.order_weighted = weighted.order;
    out.exact_weighted = weighted.exact_at_precision;
    return out;
}

} // namespace shum

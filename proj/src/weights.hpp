#pragma once

#include <functional>
#include <vector>

#include "mesh.hpp"

namespace shum {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    double midpoint() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return lo < x && x < hi; } // open interval
};

// ψ(x) = K − (x − x0)², the simplest C⁴ function that is positive on the
// enlarged domain, has its critical point inside G₂, and has |ψ'| bounded
// below away from G₂.
struct PsiFunction {
    double x0 = 0.0;
    double K = 0.0;
    double margin = 0.0;
    double C0 = 0.0;
    double psi(double x) const { return K - (x - x0) * (x - x0); }
    double dpsi(double x) const { return -2.0 * (x - x0); }
    double sup_norm() const { return K; } // attained at x0
};

PsiFunction build_psi(Interval G2, double margin);

struct WeightParams {
    double lambda = 0.0;
    double mu = 0.0;
    double delta = 0.0;
    double T = 0.0;
    PsiFunction psi;
};

WeightParams make_weight_params(double lambda, double mu, double delta, double T, PsiFunction psi);

double eval_theta(double t, const WeightParams& p); // 1 / ((t+δT)(T+δT−t))

// Time-independent spatial profiles.
double eval_varphi(double x, const WeightParams& p); // e^{μ(2|ψ|_C + ψ(x))}
double eval_phi(double x, const WeightParams& p);    // ϕ(x) − e^{4μ|ψ|_C}, negative everywhere

struct WeightSlice {
    double t = 0.0;
    double theta = 0.0;
    double s = 0.0;
    NodeSet nodes; // the M̄* extension: −h/2 .. 1+h/2
    Eigen::VectorXd phi, varphi, r, rho;
};

// Guard: |sφ| > 700 exceeds the double exponent range and raises a numeric error.
WeightSlice eval_weights(double t, const WeightParams& p, const Mesh& mesh);

struct RegimeReport {
    bool lambda_ok = false; // λ ≥ λ₀(T+T²)
    bool h_ok = false;      // h ≤ h₀
    bool eps_ok = false;    // λh(δT²)⁻¹ ≤ ε₀
    bool h1_ok = false;     // h ≤ h₁ = C (1 + 1/T + 𝓗^{2/7})⁻¹
    double h1 = 0.0;
    bool all() const { return lambda_ok && h_ok && eps_ok && h1_ok; }
};

RegimeReport regime_check(const WeightParams& p, double h, double lambda0, double eps0, double h0,
                          double C, double H);

struct RemainderOrder {
    double order_plain = 0.0;
    double order_weighted = 0.0;
    bool exact_plain = false;    // error under 1e-14 at some h: loss of significance
    bool exact_weighted = false;
};

// Fitted convergence order of the staggered average/difference composition
// A^m D^n toward the exact n-th derivative, for the weight ρ itself and for
// the r-weighted composition; both are second order in h.
RemainderOrder remainder_order(const WeightParams& p, int m, int n, double t, double x,
                               const std::vector<double>& h_list);

// Pointwise A^m D^n stencil of a callable on the h/2 lattice around x, and the
// least-squares order fit it feeds; exposed for direct tests against known
// functions (a linear f differentiates exactly, hitting the rounding floor).
double stencil_compose(const std::function<double(double)>& f, double x, int m, int n, double h);
struct OrderFit {
    double order = 0.0;
    bool exact_at_precision = false;
    std::vector<double> errors;
};
OrderFit fit_order(const std::function<double(double, double)>& value_at_h, // (x, h) -> value
                   double target, double x, const std::vector<double>& h_list);

} // namespace shum

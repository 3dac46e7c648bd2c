#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fmt/format.h>
#include <mutex>
#include <random>
#include <thread>

#include "calculus.hpp"
#include "carleman.hpp"
#include "hum.hpp"
#include "observability.hpp"
#include "solvers.hpp"

namespace shum {

namespace {

// Everything a single experiment point needs, built from one (N, T) choice.
struct Problem {
    Mesh mesh;
    NoiseTree tree;
    SchemeConfig scheme;
    Eigen::VectorXd y0;
};

Problem build_problem(const ExperimentConfig& cfg, long N, double T) {
    Problem p;
    p.mesh = build_mesh(N);
    p.tree = build_tree(cfg.K, T);
    auto a1 = [&cfg](double t, double x) { return cfg.a1_expr(t, x); };
    auto a2 = [&cfg](double t, double x) { return cfg.a2_expr(t, x); };
    CoefficientField coeffs = make_coefficients(a1, a2, p.mesh, p.tree);
    p.scheme = make_scheme(p.mesh, p.tree, coeffs, cfg.G0);
    p.y0.resize(p.mesh.M.size());
    for (long i = 0; i < p.mesh.M.size(); ++i) p.y0(i) = cfg.y0_expr(0.0, p.mesh.M.point(i));
    return p;
}

WeightParams build_params(const ExperimentConfig& cfg, double T) {
    return make_weight_params(cfg.lambda, cfg.mu, cfg.delta, T, build_psi(cfg.G2, cfg.margin));
}

EpsRule eps_rule(const ExperimentConfig& cfg) {
    return cfg.eps > 0.0 ? EpsRule::fixed_value(cfg.eps) : EpsRule::mesh_rule(cfg.C);
}

std::string control_header() {
    return "N,h,K,T,C,eps,cg_iters,terminal_ratio,cost_ratio,certificate_residual\n";
}

std::string control_row(const ExperimentConfig& cfg, const HUMReport& r) {
    return fmt::format("{},{:.12g},{},{:.12g},{:.12g},{:.12g},{},{:.12g},{:.12g},{:.12g}\n",
                       r.N, r.h, r.K, r.T, cfg.C, r.eps, r.cg_iterations, r.terminal_ratio(),
                       r.cost_ratio(), r.certificate_residual);
}

RunOutcome run_verify_identities(const ExperimentConfig& cfg) {
    Mesh mesh = build_mesh(cfg.N);
    IdentityReport report = identity_suite(mesh, cfg.trials, cfg.seed);
    RunOutcome outcome;
    outcome.output = fmt::format("{:<34} {:>13} {}\n", "identity", "residual", "status");
    for (const IdentityResult& r : report.results)
        outcome.output += fmt::format("{:<34} {:>13.3e} {}\n", r.name, r.max_scaled_residual,
                                      r.max_scaled_residual <= cfg.tol ? "PASS" : "FAIL");
    outcome.output += fmt::format("worst scaled residual {:.3e} over {} trials at N = {} "
                                  "(tolerance {:.3e})\n",
                                  report.worst(), cfg.trials, cfg.N, cfg.tol);
    if (!report.all_within(cfg.tol)) {
        outcome.status = errc::verification;
        outcome.message = fmt::format("identity verification failed: worst scaled residual "
                                      "{:.3e} exceeds {:.3e}",
                                      report.worst(), cfg.tol);
    }
    return outcome;
}

RunOutcome run_weights(const ExperimentConfig& cfg) {
    Mesh mesh = build_mesh(cfg.N);
    WeightParams params = build_params(cfg, cfg.T);
    RunOutcome outcome;
    outcome.output = "t,x,theta,s,phi,r\n";
    for (long j = 0; j < cfg.t_samples; ++j) {
        double t = cfg.T * static_cast<double>(j) / static_cast<double>(cfg.t_samples - 1);
        WeightSlice slice = eval_weights(t, params, mesh);
        for (long i = 0; i < slice.nodes.size(); ++i)
            outcome.output += fmt::format("{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g}\n",
                                          t, slice.nodes.point(i), slice.theta, slice.s,
                                          slice.phi(i), slice.r(i));
    }
    return outcome;
}

RunOutcome run_simulate(const ExperimentConfig& cfg) {
    Problem p = build_problem(cfg, cfg.N, cfg.T);
    ControlPair none = zero_controls(p.mesh, p.tree);
    AdaptedField y = solve_forward(p.y0, none, p.scheme);
    RunOutcome outcome;
    outcome.output = "k,t,energy\n";
    for (int k = 0; k <= p.tree.K; ++k)
        outcome.output += fmt::format("{},{:.12g},{:.12g}\n", k, p.tree.t_at(k),
                                      p.scheme.level_norm2(y.values[k]));
    return outcome;
}

RunOutcome run_control(const ExperimentConfig& cfg) {
    Problem p = build_problem(cfg, cfg.N, cfg.T);
    HUMReport report = control_experiment(p.y0, eps_rule(cfg), cfg.tol, cfg.max_iter, p.scheme);
    RunOutcome outcome;
    outcome.output = control_header() + control_row(cfg, report);
    return outcome;
}

RunOutcome run_observability(const ExperimentConfig& cfg) {
    Problem p = build_problem(cfg, cfg.N, cfg.T);
    double eps_T = cfg.eps_T > 0.0 ? cfg.eps_T : std::exp(-cfg.C / p.mesh.h);
    ObservabilityReport report = estimate_Cobs(p.scheme, eps_T, cfg.tol, cfg.max_iter);
    RunOutcome outcome;
    outcome.output = "N,h,K,T,H,epsT,quotient,iters\n";
    outcome.output += fmt::format("{},{:.12g},{},{:.12g},{:.12g},{:.12g},{:.12g},{}\n",
                                  report.N, report.h, report.K, report.T, report.H_norm,
                                  report.eps_T, report.quotient, report.iterations);
    if (!report.converged)
        outcome.output += fmt::format("# power iteration did not converge within {} iterations; "
                                      "the quotient is a lower bound\n",
                                      report.iterations);
    return outcome;
}

long sweep_workers(const ExperimentConfig& cfg, size_t jobs) {
    long workers = cfg.workers;
    if (workers <= 0) {
        if (const char* env = std::getenv("SHUM_WORKERS")) {
            char* end = nullptr;
            long parsed = std::strtol(env, &end, 10);
            if (end && *end == '\0' && parsed > 0) workers = parsed;
        }
    }
    if (workers <= 0) workers = static_cast<long>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
    return std::min<long>(workers, static_cast<long>(jobs));
}

RunOutcome run_sweep(const ExperimentConfig& cfg) {
    struct Job {
        long N;
        double T;
    };
    std::vector<Job> jobs;
    for (long N : cfg.N_list)
        for (double T : cfg.T_list) jobs.push_back({N, T});

    std::vector<std::string> rows(jobs.size());
    std::atomic<size_t> next{0};
    std::exception_ptr first_failure;
    std::mutex failure_mutex;

    auto work = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                Problem p = build_problem(cfg, jobs[i].N, jobs[i].T);
                HUMReport report =
                    control_experiment(p.y0, eps_rule(cfg), cfg.tol, cfg.max_iter, p.scheme);
                rows[i] = control_row(cfg, report);
            } catch (...) {
                std::scoped_lock lock(failure_mutex);
                if (!first_failure) first_failure = std::current_exception();
                return;
            }
        }
    };

    long workers = sweep_workers(cfg, jobs.size());
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (long w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& thread : pool) thread.join();
    if (first_failure) std::rethrow_exception(first_failure);

    RunOutcome outcome;
    outcome.output = control_header();
    for (const std::string& row : rows) outcome.output += row;
    return outcome;
}

RunOutcome run_carleman(const ExperimentConfig& cfg) {
    Problem p = build_problem(cfg, cfg.N, cfg.T);
    WeightParams params = build_params(cfg, cfg.T);

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::MatrixXd z_terminal(p.mesh.M.size(), p.tree.leaves());
    for (long j = 0; j < z_terminal.cols(); ++j)
        for (long i = 0; i < z_terminal.rows(); ++i) z_terminal(i, j) = unif(rng);

    CarlemanProbe probe = make_probe(z_terminal, p.scheme);
    CarlemanTable table = carleman_functionals(probe, params, p.tree, p.mesh, cfg.G0);
    RegimeReport regime = regime_check(params, p.mesh.h, cfg.lambda0, cfg.eps0, cfg.h0, cfg.C,
                                       p.scheme.coeffs.H_norm);

    RunOutcome outcome;
    outcome.output += "left-hand terms\n";
    for (const CarlemanTerm& term : table.lhs)
        outcome.output += fmt::format("  {:<36} {:.6e}\n", term.name, term.value);
    outcome.output += "right-hand terms\n";
    for (const CarlemanTerm& term : table.rhs)
        outcome.output += fmt::format("  {:<36} {:.6e}\n", term.name, term.value);
    outcome.output += fmt::format("lhs_total {:.6e}\nrhs_total {:.6e}\nratio {:.6e}\n",
                                  table.lhs_total, table.rhs_total, table.ratio);
    outcome.output += fmt::format(
        "regime lambda_ok={} h_ok={} eps_ok={} h1_ok={} (h1 = {:.6g})\n", regime.lambda_ok,
        regime.h_ok, regime.eps_ok, regime.h1_ok, regime.h1);
    return outcome;
}

} // namespace

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names = {
        "verify-identities", "weights", "simulate", "control",
        "observability",     "sweep",   "carleman"};
    return names;
}

RunOutcome run_subcommand(const std::string& name, const ExperimentConfig& cfg) {
    if (name == "verify-identities") return run_verify_identities(cfg);
    if (name == "weights") return run_weights(cfg);
    if (name == "simulate") return run_simulate(cfg);
    if (name == "control") return run_control(cfg);
    if (name == "observability") return run_observability(cfg);
    if (name == "sweep") return run_sweep(cfg);
    if (name == "carleman") return run_carleman(cfg);
    std::string known;
    for (const std::string& candidate : subcommand_names())
        known += (known.empty() ? "" : ", ") + candidate;
    fail_config(fmt::format("unknown subcommand '{}'; expected one of: {}", name, known));
}

} // namespace shum

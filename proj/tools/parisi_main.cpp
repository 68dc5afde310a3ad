// Command-line front end: evaluation, analytic gradients, minimization, and
// the inequality probes, all reproducible from (config file, seed).
//
// Exit codes: 0 success, 1 asserted-probe violation, 2 configuration error.

#include "parisi/io.hpp"
#include "parisi/lmnorm.hpp"
#include "parisi/model_file.hpp"
#include "parisi/optimize.hpp"
#include "parisi/parisi_eval.hpp"
#include "parisi/probes.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace parisi;

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    uint64_t seed = 1;
    int grid_points = 2049;
    int quad_order = 41;
    double safety_sigmas = 8.0;
    std::string step_m, step_q;  // inline override of the config file step
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_step) {
    cmd->add_option("--config", o.config_path, "model specification file")->required();
    cmd->add_option("--seed", o.seed, "random seed (default 1)");
    cmd->add_option("--grid-points", o.grid_points, "grid points, odd (default 2049)");
    cmd->add_option("--quad-order", o.quad_order, "Gauss-Hermite order (default 41)");
    cmd->add_option("--safety-sigmas", o.safety_sigmas, "grid half-width margin (default 8)");
    cmd->add_option("--out", o.out_dir, "directory for report files");
    if (needs_step) {
        cmd->add_option("--m", o.step_m, "inline step.m, overrides the config file");
        cmd->add_option("--q", o.step_q, "inline step.q, overrides the config file");
    }
}

struct Loaded {
    ModelSpec model;
    StepOrderParameter step;
    Grid grid;
    HermiteRule rule;
};

ParsedModel load_model(const CommonOpts& o) {
    if (o.grid_points < 5 || o.grid_points % 2 == 0)
        throw ConfigError("--grid-points must be odd and >= 5");
    if (o.quad_order < 1) throw ConfigError("--quad-order must be >= 1");
    ParsedModel parsed = parse_model_file(o.config_path);
    if (!o.step_m.empty() || !o.step_q.empty()) {
        if (o.step_m.empty() || o.step_q.empty())
            throw ConfigError("--m and --q must be given together");
        StepOrderParameter step{parse_real_list(o.step_m), parse_real_list(o.step_q)};
        StepValidation v = validate_step(step, /*require_top_one=*/false);
        if (!v.ok) throw ConfigError("--m/--q: " + v.violation);
        parsed.step = std::move(step);
    }
    return parsed;
}

Loaded load_with_step(const CommonOpts& o) {
    ParsedModel parsed = load_model(o);
    if (!parsed.step)
        throw ConfigError("this command needs a step (step.m/step.q in the config or --m/--q)");
    Loaded l{parsed.model, *parsed.step, build_grid(parsed.model, o.safety_sigmas, o.grid_points),
             hermite_rule(o.quad_order)};
    return l;
}

void write_out(const CommonOpts& o, const std::string& name, const std::string& content) {
    if (o.out_dir.empty()) return;
    std::filesystem::create_directories(o.out_dir);
    atomic_write_file((std::filesystem::path(o.out_dir) / name).string(), content);
}

// ============================================================================
// eval / grad
// ============================================================================

int run_eval(const CommonOpts& o) {
    Loaded l = load_with_step(o);
    EvalReport report = parisi_objective(l.model, l.step, l.grid, l.rule);
    json j = to_json(report);
    j["step"] = to_json(l.step);
    std::cout << j.dump(2) << "\n";
    write_out(o, "report.json", j.dump(2) + "\n");
    if (!o.out_dir.empty()) {
        RecursionStack stack = run_recursion(l.model, l.step, l.grid, l.rule);
        write_out(o, "phi0.csv", gridfunction_to_csv(stack.phis[0]));
    }
    return 0;
}

// central differences with one Richardson refinement; coordinates whose
// feasible headroom is too small for the stencil are skipped
struct FdCheck {
    double max_rel_err_q = 0.0;
    double max_rel_err_m = 0.0;
    std::vector<int> skipped_q, skipped_m;
};

double richardson_fd(const std::function<double(double)>& f, double x, double h) {
    auto central = [&](double hh) { return (f(x + hh) - f(x - hh)) / (2.0 * hh); };
    double d1 = central(h), d2 = central(0.5 * h);
    return (4.0 * d2 - d1) / 3.0;
}

FdCheck fd_check(const Loaded& l, const GradientReport& g) {
    FdCheck out;
    const int k = l.step.k();
    const double h0 = 1e-4;
    auto p_of = [&](const StepOrderParameter& s) { return parisi_p(l.model, s, l.grid, l.rule); };

    for (int idx = 1; idx <= k; ++idx) {
        double lo = l.step.q[idx] - l.step.q[idx - 1];
        double hi = l.step.q[idx + 1] - l.step.q[idx];
        if (std::min(lo, hi) < 2.0 * h0) {
            out.skipped_q.push_back(idx);
            continue;
        }
        double fd = richardson_fd(
            [&](double v) {
                StepOrderParameter s = l.step;
                s.q[idx] = v;
                return p_of(s);
            },
            l.step.q[idx], h0);
        if (std::fabs(fd) > 1e-8)
            out.max_rel_err_q =
                std::max(out.max_rel_err_q, std::fabs(g.dq[idx - 1] - fd) / std::fabs(fd));
    }
    for (int idx = 1; idx <= k; ++idx) {
        double lo = l.step.m[idx] - l.step.m[idx - 1];
        double hi = (idx < k ? l.step.m[idx + 1] : 1.0) - l.step.m[idx];
        if (std::min(lo, hi) < 2.0 * h0) {
            out.skipped_m.push_back(idx);
            continue;
        }
        double fd = richardson_fd(
            [&](double v) {
                StepOrderParameter s = l.step;
                s.m[idx] = v;
                return p_of(s);
            },
            l.step.m[idx], h0);
        if (std::fabs(fd) > 1e-8)
            out.max_rel_err_m =
                std::max(out.max_rel_err_m, std::fabs(g.dm[idx - 1] - fd) / std::fabs(fd));
    }
    return out;
}

int run_grad(const CommonOpts& o) {
    Loaded l = load_with_step(o);
    RecursionStack stack = run_recursion(l.model, l.step, l.grid, l.rule);
    GradientReport report = gradient_report(l.model, stack, l.rule);
    FdCheck fd = fd_check(l, report);

    json j = to_json(report);
    j["fd_check"] = {{"max_rel_err_q", fd.max_rel_err_q},
                     {"max_rel_err_m", fd.max_rel_err_m},
                     {"skipped_q", fd.skipped_q},
                     {"skipped_m", fd.skipped_m}};
    std::cout << j.dump(2) << "\n";
    write_out(o, "gradient.json", j.dump(2) + "\n");

    std::string csv = "level,dq,dm,u\n";
    char buf[128];
    for (size_t i = 0; i < report.dq.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", i + 1, report.dq[i],
                      report.dm[i], report.u_values[i]);
        csv += buf;
    }
    write_out(o, "gradient.csv", csv);
    return 0;
}

// ============================================================================
// minimize / sweep
// ============================================================================

int run_minimize(const CommonOpts& o, const OptimizerConfig& cfg_in) {
    ParsedModel parsed = load_model(o);
    OptimizerConfig cfg = cfg_in;
    cfg.n_points = o.grid_points;
    cfg.quad_order = o.quad_order;
    cfg.safety_sigmas = o.safety_sigmas;

    MinimizeResult res = minimize(parsed.model, cfg, o.seed);
    json j = to_json(res);
    std::cout << j.dump(2) << "\n";
    write_out(o, "minimize.json", j.dump(2) + "\n");
    write_out(o, "history.csv", history_csv(res));
    return 0;
}

int run_sweep(const CommonOpts& o, int k_max, const OptimizerConfig& cfg_in) {
    ParsedModel parsed = load_model(o);
    OptimizerConfig cfg = cfg_in;
    cfg.n_points = o.grid_points;
    cfg.quad_order = o.quad_order;
    cfg.safety_sigmas = o.safety_sigmas;

    std::vector<MinimizeResult> results = rsb_sweep(parsed.model, k_max, cfg, o.seed);
    json arr = json::array();
    for (size_t i = 0; i < results.size(); ++i) {
        json j = to_json(results[i]);
        j["k"] = static_cast<int>(i) + 1;
        arr.push_back(j);
        write_out(o, "history_k" + std::to_string(i + 1) + ".csv", history_csv(results[i]));
    }
    std::cout << arr.dump(2) << "\n";
    write_out(o, "sweep.json", arr.dump(2) + "\n");
    return 0;
}

// ============================================================================
// probe
// ============================================================================

int run_probe(const CommonOpts& o, const std::string& which, int trials, int k) {
    if (trials < 1) throw ConfigError("--trials must be >= 1");
    if (k < 1) throw ConfigError("--k must be >= 1");
    ParsedModel parsed = load_model(o);
    ProbeConfig cfg{o.grid_points, o.quad_order, o.safety_sigmas};

    StepOrderParameter step;
    if (parsed.step) {
        step = *parsed.step;
    } else {
        Rng rng = Rng::substream(o.seed, 0xfeed);
        step = random_step(k, rng);
    }
    Rng qrng = Rng::substream(o.seed, 0xbeef);
    std::vector<double> q_shared = parsed.step ? parsed.step->q : random_q(k, qrng);

    std::vector<ProbeReport> reports;
    if (which == "one_sided" || which == "all")
        reports.push_back(probe_one_sided_convexity(parsed.model, q_shared, trials, o.seed, cfg));
    if (which == "u_monotonicity" || which == "all")
        reports.push_back(probe_u_monotonicity(parsed.model, step, 0, trials, o.seed, cfg));
    if (which == "midpoint" || which == "all")
        reports.push_back(probe_midpoint_convexity(parsed.model, q_shared, trials, o.seed,
                                                   step.k() >= 2, cfg));
    if (which == "function_classes" || which == "all")
        reports.push_back(probe_function_classes(parsed.model, step, cfg));
    if (reports.empty())
        throw ConfigError("--probe must be one_sided, u_monotonicity, midpoint, "
                          "function_classes or all");

    std::string lines;
    bool violated = false;
    for (const ProbeReport& r : reports) {
        lines += to_json(r).dump() + "\n";
        if (!r.passed) violated = true;
        if (r.probe_name == "midpoint_convexity") {
            std::string csv = "trial,slack\n";
            char buf[64];
            for (size_t i = 0; i < r.slacks.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, r.slacks[i]);
                csv += buf;
            }
            write_out(o, "midpoint_slacks.csv", csv);
        }
    }
    std::cout << lines;
    write_out(o, "probes.jsonl", lines);
    return violated ? 1 : 0;
}

// ============================================================================
// lmnorm
// ============================================================================

int run_lmnorm(const CommonOpts& o, int dim, double m_max, double m_step, long mc_samples) {
    if (dim < 1) throw ConfigError("--dim must be >= 1");
    if (m_step <= 0.0 || m_max < m_step) throw ConfigError("--m-max/--m-step must be positive");
    if (mc_samples < 100000) throw ConfigError("--mc-samples must be >= 1e5");
    ParsedModel parsed = load_model(o);

    ScalarModel sm;
    sm.phi = parsed.model.phi;
    sm.h = parsed.model.h;
    sm.sigma = std::sqrt(std::max(parsed.model.xi.d1(1.0), 1e-12));  // sigma^2 = xi'(1)
    sm.n = dim;
    HermiteRule rule = hermite_rule(o.quad_order);

    std::vector<double> m_grid;
    for (double m = m_step; m <= m_max + 1e-12; m += m_step) m_grid.push_back(m);

    std::string csv = "m,f,f_second\n";
    char buf[96];
    for (double m : m_grid) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", m, f_of_m(sm, m, rule),
                      f_second_derivative(sm, m, rule));
        csv += buf;
    }
    std::cout << csv;
    write_out(o, "lmnorm.csv", csv);

    std::vector<double> lambdas;
    for (int i = 0; i <= 10; ++i) lambdas.push_back(0.1 * i);
    std::vector<ProbeReport> reports{
        check_log_convexity(sm, m_grid, rule),
        check_interpolation_bound(sm, lambdas, rule),
        check_concentration(sm, {0.5, 1.0, 1.5}, mc_samples, o.seed, rule),
    };
    {
        ProbeReport cum;
        cum.probe_name = "third_cumulant_nonnegative";
        cum.verdict = ProbeReport::Verdict::Asserted;
        double c3 = third_cumulant(sm, rule);
        cum.instances = 1;
        cum.worst_slack = c3;
        cum.slacks = {c3};
        cum.passed = c3 >= -1e-10;
        reports.push_back(std::move(cum));
    }

    std::string lines;
    bool violated = false;
    for (const ProbeReport& r : reports) {
        lines += to_json(r).dump() + "\n";
        if (!r.passed) violated = true;
    }
    std::cerr << lines;
    write_out(o, "lmnorm_probes.jsonl", lines);
    return violated ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parisi functional laboratory: step-order-parameter evaluation, analytic "
                 "gradients, minimization, and inequality probes"};
    app.require_subcommand(1);

    CommonOpts eval_o, grad_o, min_o, sweep_o, probe_o, lm_o;
    OptimizerConfig opt_cfg;
    int sweep_k_max = 3;
    std::string probe_which = "all";
    int probe_trials = 50;
    int probe_k = 2;
    int lm_dim = 1;
    double lm_m_max = 3.0, lm_m_step = 0.1;
    long lm_mc = 1000000;

    CLI::App* c_eval = app.add_subcommand("eval", "evaluate P and the objective");
    add_common(c_eval, eval_o, true);

    CLI::App* c_grad = app.add_subcommand("grad", "analytic gradients + finite-difference check");
    add_common(c_grad, grad_o, true);

    CLI::App* c_min = app.add_subcommand("minimize", "projected gradient descent over k levels");
    add_common(c_min, min_o, false);
    c_min->add_option("--k", opt_cfg.k, "number of levels (default 1)");
    c_min->add_option("--max-iters", opt_cfg.max_iters, "iteration cap (default 300)");
    c_min->add_option("--grad-tol", opt_cfg.grad_tol, "projected-gradient tolerance (default 1e-6)");
    c_min->add_option("--starts", opt_cfg.n_starts, "multi-start count (default 5)");
    c_min->add_flag("--relax-top", [&opt_cfg](int64_t) { opt_cfg.pin_top = false; },
                    "do not pin m_k = 1");

    CLI::App* c_sweep = app.add_subcommand("sweep", "minimize for k = 1..k_max with warm starts");
    add_common(c_sweep, sweep_o, false);
    c_sweep->add_option("--k-max", sweep_k_max, "largest k (default 3)");
    c_sweep->add_option("--max-iters", opt_cfg.max_iters, "iteration cap (default 300)");
    c_sweep->add_option("--grad-tol", opt_cfg.grad_tol, "projected-gradient tolerance");
    c_sweep->add_option("--starts", opt_cfg.n_starts, "multi-start count (default 5)");

    CLI::App* c_probe = app.add_subcommand("probe", "inequality probes (JSON lines)");
    add_common(c_probe, probe_o, true);
    c_probe->add_option("--probe", probe_which,
                        "one_sided | u_monotonicity | midpoint | function_classes | all");
    c_probe->add_option("--trials", probe_trials, "trials per probe (default 50)");
    c_probe->add_option("--k", probe_k, "levels for generated steps (default 2)");

    CLI::App* c_lm = app.add_subcommand(
        "lmnorm", "f(m), f''(m) table and the scalar-model inequality checks");
    add_common(c_lm, lm_o, false);
    c_lm->add_option("--dim", lm_dim, "dimension n of the Gaussian (default 1)");
    c_lm->add_option("--m-max", lm_m_max, "largest m in the table (default 3)");
    c_lm->add_option("--m-step", lm_m_step, "m increment (default 0.1)");
    c_lm->add_option("--mc-samples", lm_mc, "Monte Carlo samples for tails (default 1e6)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_eval->parsed()) return run_eval(eval_o);
        if (c_grad->parsed()) return run_grad(grad_o);
        if (c_min->parsed()) return run_minimize(min_o, opt_cfg);
        if (c_sweep->parsed()) return run_sweep(sweep_o, sweep_k_max, opt_cfg);
        if (c_probe->parsed()) return run_probe(probe_o, probe_which, probe_trials, probe_k);
        if (c_lm->parsed()) return run_lmnorm(lm_o, lm_dim, lm_m_max, lm_m_step, lm_mc);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

// Acceptance suite: one check per numbered criterion, each printed as a
// single PASS/FAIL line with the measured margin. Everything is closed-form
// or property-based at desk scale; tolerances are pinned in code.

#include "parisi/io.hpp"
#include "parisi/lmnorm.hpp"
#include "parisi/optimize.hpp"
#include "parisi/parisi_eval.hpp"
#include "parisi/probes.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace parisi;

namespace {

int g_failures = 0;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void record(int criterion, const std::string& name, bool ok, const std::string& detail,
            double seconds) {
    std::printf("[%2d] %-58s %s  %s  (%.1fs)\n", criterion, name.c_str(),
                ok ? "PASS" : "FAIL", detail.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), pattern, a, b);
    return buf;
}

ModelSpec sk_model(double beta, double h) {
    return {MixtureFunction::sk(beta), BoundaryFunction::logcosh(), h};
}

// ============================================================================
// 1. Closed-form evaluator check
// ============================================================================

void criterion_1() {
    Timer t;
    ModelSpec model = sk_model(1.0, 0.0);
    Grid grid = build_grid(model, 8.0, 2049);
    HermiteRule rule = hermite_rule(41);
    StepOrderParameter step{{0.0, 1.0}, {0.0, 0.0, 1.0}};
    EvalReport report = parisi_objective(model, step, grid, rule);

    double err_p = std::fabs(report.p_value - 0.5);
    double err_obj = std::fabs(report.parisi_value - (M_LN2 + 0.25));
    double elapsed = t.seconds();
    bool ok = err_p < 1e-6 && err_obj < 1e-6 && elapsed < 1.0;
    record(1, "closed-form evaluator (SK beta=1, h=0, m=1)", ok,
           fmt("|P-0.5|=%.1e |obj-log2-1/4|=%.1e", err_p, err_obj), elapsed);
}

// ============================================================================
// 2. Partition invariance
// ============================================================================

void criterion_2() {
    Timer t;
    HermiteRule rule = hermite_rule(41);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        Rng rng = Rng::substream(202, i);
        double beta = rng.uniform(0.5, 1.5);
        double h = rng.uniform(0.0, 1.0);
        double mu = rng.uniform(0.1, 1.0);
        ModelSpec model = sk_model(beta, h);
        Grid grid = build_grid(model, 8.0, 2049);

        StepOrderParameter one{{0.0, mu}, {0.0, 0.0, 1.0}};
        double reference = parisi_p(model, one, grid, rule);

        StepOrderParameter part;
        part.m = {0.0, mu, mu, mu, mu};
        part.q = {0.0, 0.0, rng.uniform(), rng.uniform(), rng.uniform(), 1.0};
        std::sort(part.q.begin(), part.q.end());
        worst = std::max(worst, std::fabs(parisi_p(model, part, grid, rule) - reference));
    }
    record(2, "partition invariance (constant m, k=4 vs k=1, 50 runs)", worst < 1e-8,
           fmt("max|dP|=%.1e", worst), t.seconds());
}

// ============================================================================
// 3. Oracle equivalence
// ============================================================================

void criterion_3() {
    Timer t;
    HermiteRule rule = hermite_rule(41);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        Rng rng = Rng::substream(303, i);
        ModelSpec model = i % 2 == 0
                              ? sk_model(rng.uniform(0.6, 1.4), rng.uniform(0.0, 1.0))
                              : ModelSpec{MixtureFunction::mixture({{2, 0.7}, {4, 0.5}}),
                                          BoundaryFunction::logcosh(), rng.uniform(0.0, 1.0)};
        Grid grid = build_grid(model, 8.0, 2049);
        StepOrderParameter step = testing::well_separated_step(2, rng);
        double via_grid = parisi_p(model, step, grid, rule);
        double via_oracle = testing::oracle_parisi_p(model, step, 201);
        worst = std::max(worst, std::fabs(via_grid - via_oracle));
    }
    double elapsed = t.seconds();
    record(3, "oracle equivalence (k=2 vs nested order-201 tensor, 10 runs)",
           worst < 1e-6 && elapsed < 30.0, fmt("max|dP|=%.1e", worst), elapsed);
}

// ============================================================================
// 4. Gradient correctness
// ============================================================================

void criterion_4() {
    Timer t;
    HermiteRule rule = hermite_rule(41);
    double worst_rel = 0.0;
    int checked = 0;
    for (int i = 0; i < 20; ++i) {
        Rng rng = Rng::substream(404, i);
        int k = 1 + static_cast<int>(rng.uniform() * 4.0) % 4;
        ModelSpec model = sk_model(rng.uniform(0.6, 1.4), rng.uniform(0.0, 1.0));
        Grid grid = build_grid(model, 8.0, 2049);
        StepOrderParameter step = testing::well_separated_step(k, rng);
        RecursionStack stack = run_recursion(model, step, grid, rule);
        std::vector<double> dq = grad_q(model, stack, rule);
        MGradient dm = grad_m(model, stack, rule);

        auto p_of = [&](const StepOrderParameter& s) { return parisi_p(model, s, grid, rule); };
        for (int l = 1; l <= k; ++l) {
            double fd = testing::fd_derivative(
                [&](double v) {
                    StepOrderParameter s = step;
                    s.q[l] = v;
                    return p_of(s);
                },
                step.q[l], 1e-4);
            if (std::fabs(fd) > 1e-8) {
                worst_rel = std::max(worst_rel, std::fabs(dq[l - 1] - fd) / std::fabs(fd));
                ++checked;
            }
        }
        for (int j = 1; j < k; ++j) {
            double fd = testing::fd_derivative(
                [&](double v) {
                    StepOrderParameter s = step;
                    s.m[j] = v;
                    return p_of(s);
                },
                step.m[j], 1e-4);
            if (std::fabs(fd) > 1e-8) {
                worst_rel = std::max(worst_rel, std::fabs(dm.dm[j - 1] - fd) / std::fabs(fd));
                ++checked;
            }
        }
    }
    record(4, "analytic gradients vs finite differences (20 runs, k<=4)",
           worst_rel < 1e-4 && checked > 0,
           fmt("max rel err=%.1e over %g coords", worst_rel, double(checked)), t.seconds());
}

// ============================================================================
// 5. One-sided convexity (proved theorem)
// ============================================================================

void criterion_5() {
    Timer t;
    ProbeConfig cfg{1025, 41, 8.0};
    double worst = HUGE_VAL;
    int pairs = 0;
    bool all_passed = true;
    int config_index = 0;
    for (int model_kind = 0; model_kind < 2; ++model_kind) {
        for (double h : {0.0, 0.3, 1.0}) {
            ModelSpec model = model_kind == 0
                                  ? sk_model(1.0, h)
                                  : ModelSpec{MixtureFunction::mixture({{2, 0.6}, {4, 0.5}}),
                                              BoundaryFunction::logcosh(), h};
            int k = 2 + config_index % 3;  // k in {2, 3, 4}
            Rng rng = Rng::substream(505, config_index);
            std::vector<double> q = random_q(k, rng);
            ProbeReport report =
                probe_one_sided_convexity(model, q, 34, 505 + config_index, cfg);
            worst = std::min(worst, report.worst_slack);
            pairs += report.instances;
            all_passed = all_passed && report.passed;
            ++config_index;
        }
    }
    record(5, "one-sided gradient inequality (" + std::to_string(pairs) + " ordered pairs)",
           all_passed && worst >= -1e-6, fmt("worst slack=%.2e", worst), t.seconds());
}

// ============================================================================
// 6. U_l monotonicity (proved theorem)
// ============================================================================

void criterion_6() {
    Timer t;
    ProbeConfig cfg{1025, 41, 8.0};
    double worst = HUGE_VAL;
    int instances = 0;
    bool all_passed = true;
    for (int i = 0; i < 100; ++i) {
        Rng rng = Rng::substream(606, i);
        int k = 2 + i % 2;
        ModelSpec model = i % 3 == 0
                              ? ModelSpec{MixtureFunction::mixture({{2, 0.8}, {4, 0.4}}),
                                          BoundaryFunction::logcosh(), rng.uniform(0.0, 1.0)}
                              : sk_model(rng.uniform(0.6, 1.4), rng.uniform(0.0, 1.0));
        StepOrderParameter step = random_step(k, rng);
        ProbeReport report = probe_u_monotonicity(model, step, 0, 1, 606 + i, cfg);
        worst = std::min(worst, report.worst_slack);
        instances += report.instances;
        all_passed = all_passed && report.passed;
    }
    record(6, "U_l nondecreasing in m (100 seeded instances)", all_passed && worst >= -1e-7,
           fmt("worst FD slope=%.2e over %g slopes", worst, double(instances)), t.seconds());
}

// ============================================================================
// 7. Scalar log-convexity and the f'' moment identity
// ============================================================================

void criterion_7() {
    Timer t;
    HermiteRule rule = hermite_rule(41);
    HermiteRule dense = hermite_rule(201);
    std::vector<double> m_grid;
    for (int i = 1; i <= 30; ++i) m_grid.push_back(0.1 * i);

    double worst_second = HUGE_VAL;
    double worst_rel = 0.0;
    const double hs[10] = {0.0, 0.3, 1.0, 0.5, 0.0, 0.8, 0.2, 1.2, 0.0, 0.6};
    const double sigmas[10] = {1.0, 1.0, 1.0, 1.2, 0.7, 0.9, 1.5, 0.8, 2.0, 1.1};
    for (int i = 0; i < 10; ++i) {
        ScalarModel sm{BoundaryFunction::logcosh(), hs[i], sigmas[i], 1};
        ProbeReport sweep = check_log_convexity(sm, m_grid, rule);
        worst_second = std::min(worst_second, sweep.worst_slack);
        for (double m : {0.5, 1.0, 2.0}) {
            double analytic = f_second_derivative(sm, m, dense);
            double fd = testing::fd_second(
                [&](double mm) { return f_of_m(sm, mm, dense); }, m, 1e-3);
            worst_rel = std::max(worst_rel,
                                 std::fabs(analytic - fd) / std::max(std::fabs(fd), 1e-12));
        }
    }
    record(7, "f(m) convex + f'' moment identity (10 scalar models)",
           worst_second >= -1e-8 && worst_rel < 1e-4,
           fmt("worst 2nd diff=%.2e, f'' rel err=%.1e", worst_second, worst_rel), t.seconds());
}

// ============================================================================
// 8. Radial reduction (n > 1) and the third cumulant
// ============================================================================

void criterion_8() {
    Timer t;
    HermiteRule rule = hermite_rule(41);
    HermiteRule dense = hermite_rule(201);
    std::vector<double> m_grid;
    for (int i = 1; i <= 30; ++i) m_grid.push_back(0.1 * i);

    double worst_second = HUGE_VAL;
    double worst_cumulant = HUGE_VAL;
    for (int n : {2, 3, 5}) {
        ScalarModel sm{BoundaryFunction::logcosh(), 0.5, 1.0, n};
        ProbeReport sweep = check_log_convexity(sm, m_grid, rule);
        worst_second = std::min(worst_second, sweep.worst_slack);
        worst_cumulant = std::min(worst_cumulant, third_cumulant(sm, rule));
    }
    worst_cumulant =
        std::min(worst_cumulant, third_cumulant({BoundaryFunction::logcosh(), 0.0, 1.0, 1}, dense));

    ScalarModel squared{testing::quadratic_boundary(), 0.0, 1.0, 1};
    double cumulant_sq = third_cumulant(squared, dense);
    double err_sq = std::fabs(cumulant_sq - 8.0);

    record(8, "radial log-convexity (n=2,3,5) + third cumulant (z^2 -> 8)",
           worst_second >= -1e-8 && worst_cumulant >= -1e-10 && err_sq < 1e-10,
           fmt("worst 2nd diff=%.2e, |c3-8|=%.1e", worst_second, err_sq), t.seconds());
}

// ============================================================================
// 9. Interpolation bound and concentration
// ============================================================================

void criterion_9() {
    Timer t;
    HermiteRule rule = hermite_rule(41);
    ScalarModel sm{BoundaryFunction::logcosh(), 0.0, 1.0, 1};

    std::vector<double> lambdas;
    for (int i = 0; i <= 10; ++i) lambdas.push_back(0.1 * i);
    ProbeReport interp = check_interpolation_bound(sm, lambdas, rule);
    double endpoint_err =
        std::max(std::fabs(interp.slacks.front()), std::fabs(interp.slacks.back()));

    ProbeReport conc = check_concentration(sm, {0.5, 1.0, 1.5}, 1000000, 909, rule);

    record(9, "interpolation bound + concentration vs Monte Carlo (1e6)",
           interp.passed && endpoint_err < 1e-12 && conc.passed,
           fmt("endpoint err=%.1e, tail margin=%.2e", endpoint_err, conc.worst_slack),
           t.seconds());
}

// ============================================================================
// 10. Optimizer sanity
// ============================================================================

void criterion_10() {
    Timer t;
    ModelSpec model = sk_model(0.8, 0.0);
    OptimizerConfig cfg;
    cfg.n_points = 1025;
    cfg.max_iters = 200;
    std::vector<MinimizeResult> sweep = rsb_sweep(model, 3, cfg, 1010);

    double value_err = std::fabs(sweep[0].value - (M_LN2 + 0.16));
    bool nonincreasing = true;
    for (size_t i = 1; i < sweep.size(); ++i)
        nonincreasing = nonincreasing && sweep[i].value <= sweep[i - 1].value + 1e-8;
    double final_err = std::fabs(sweep.back().value - (M_LN2 + 0.16));
    double elapsed = t.seconds();

    record(10, "optimizer reaches log2 + b^2/4 at b=0.8; sweep monotone (k<=3)",
           value_err < 1e-5 && final_err < 1e-5 && nonincreasing && elapsed < 300.0,
           fmt("|v-RS|=%.1e, k3 gap=%.1e", value_err, final_err), elapsed);
}

// ============================================================================
// 11. Open-question probe (reporting only)
// ============================================================================

void criterion_11() {
    Timer t;
    ModelSpec model = sk_model(1.0, 0.0);
    ProbeConfig cfg{1025, 41, 8.0};
    Rng rng = Rng::substream(1111, 0);
    std::vector<double> q = random_q(3, rng);
    ProbeReport report = probe_midpoint_convexity(model, q, 500, 1111, true, cfg);

    std::string csv = "trial,slack\n";
    char buf[64];
    for (size_t i = 0; i < report.slacks.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, report.slacks[i]);
        csv += buf;
    }
    atomic_write_file("midpoint_slacks.csv", csv);

    bool ok = report.verdict == ProbeReport::Verdict::Reported && report.passed &&
              report.instances == 500;
    record(11, "midpoint-convexity probe (500 crossing pairs, Reported)", ok,
           fmt("min slack=%.2e (finding, not a gate)", report.worst_slack), t.seconds());
}

}  // namespace

int main() {
    std::printf("=== acceptance suite ===\n");
    Timer total;
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    std::printf("=== %s: %d criterion(s) failed (%.1fs total) ===\n",
                g_failures == 0 ? "OK" : "FAILED", g_failures, total.seconds());
    return g_failures == 0 ? 0 : 1;
}

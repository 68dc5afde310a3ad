#include "parisi/parisi_eval.hpp"

#include <cmath>
#include <stdexcept>

namespace parisi {

namespace {

constexpr double kAnalyticMFloor = 1e-6;  // below this, dP/dm_j uses finite differences

// The recursion itself is well defined for any nonnegative m-vector;
// monotonicity of m is a feasibility constraint checked by the public entry
// point. Finite-difference bumps of single coordinates go through this core.
RecursionStack recursion_core(const ModelSpec& model, const StepOrderParameter& step,
                              const Grid& grid, const HermiteRule& rule) {
    const int k = step.k();
    RecursionStack stack;
    stack.step = step;
    stack.variances.resize(k + 1);
    for (int l = 0; l <= k; ++l) stack.variances[l] = level_variance(model.xi, step, l);

    stack.phis.resize(k + 2);
    stack.phis[k + 1] = sample_boundary(model.phi, grid);
    for (int l = k; l >= 0; --l)
        stack.phis[l] = smooth_tilt(stack.phis[l + 1], step.m[l], stack.variances[l], rule);
    return stack;
}

// Weighted downward propagation: starting from f on the grid at level l_top,
// applies tilt_weight_expectation through levels l_top-1 .. 0 and returns the
// value at h. Level 0 has m_0 = 0, so its weight is identically 1.
double propagate_down(const RecursionStack& stack, GridFunction f, int l_top,
                      const HermiteRule& rule, double h) {
    for (int p = l_top - 1; p >= 0; --p)
        f = tilt_weight_expectation(f, stack.phis[p + 1], stack.phis[p], stack.step.m[p],
                                    stack.variances[p], rule);
    return f.eval(h);
}

}  // namespace

RecursionStack run_recursion(const ModelSpec& model, const StepOrderParameter& step,
                             const Grid& grid, const HermiteRule& rule) {
    StepValidation v = validate_step(step, /*require_top_one=*/false);
    if (!v.ok) throw std::invalid_argument("run_recursion: invalid step: " + v.violation);

    RecursionStack stack = recursion_core(model, step, grid, rule);
    if (!std::isfinite(stack.phis[0].eval(model.h)))
        throw std::runtime_error("run_recursion: phi_0 not finite at h");
    return stack;
}

double parisi_p(const ModelSpec& model, const StepOrderParameter& step,
                const Grid& grid, const HermiteRule& rule) {
    return run_recursion(model, step, grid, rule).phis[0].eval(model.h);
}

EvalReport parisi_objective(const ModelSpec& model, const StepOrderParameter& step,
                            const Grid& grid, const HermiteRule& rule) {
    EvalReport report;
    report.grid = grid;
    report.p_value = parisi_p(model, step, grid, rule);
    report.parisi_value = M_LN2 + report.p_value - linear_term(model.xi, step);

    Grid fine{grid.half_width, 2 * grid.n_points - 1};
    double p_fine = parisi_p(model, step, fine, rule);
    report.refinement_error = std::fabs(report.p_value - p_fine);
    return report;
}

double compute_u(const ModelSpec& model, const RecursionStack& stack, int l,
                 const HermiteRule& rule) {
    if (l < 1 || l > stack.k()) throw std::invalid_argument("compute_u: l out of range");

    GridFunction f = differentiate(stack.phis[l]);
    for (double& v : f.values) v *= v;
    // slopes stay 0: (phi_l')^2 is asymptotically constant

    double u = propagate_down(stack, std::move(f), l, rule, model.h);
    if (u < -1e-10) throw std::runtime_error("compute_u: negative U_l beyond tolerance");
    return u;
}

std::vector<double> grad_q(const ModelSpec& model, const RecursionStack& stack,
                           const HermiteRule& rule) {
    const int k = stack.k();
    std::vector<double> dq(k);
    for (int l = 1; l <= k; ++l) {
        double prefactor = -0.5 * (stack.step.m[l] - stack.step.m[l - 1]) *
                           model.xi.d2(stack.step.q[l]);
        dq[l - 1] = prefactor == 0.0 ? 0.0 : prefactor * compute_u(model, stack, l, rule);
    }
    return dq;
}

MGradient grad_m(const ModelSpec& model, const RecursionStack& stack,
                 const HermiteRule& rule) {
    const int k = stack.k();
    const StepOrderParameter& step = stack.step;
    MGradient out;
    out.dm.resize(k);

    for (int j = 1; j <= k; ++j) {
        const double mj = step.m[j];
        const double s2 = stack.variances[j];

        if (s2 == 0.0) {
            out.dm[j - 1] = 0.0;  // degenerate level: P does not depend on m_j
            continue;
        }
        if (mj < kAnalyticMFloor) {
            // One-sided forward difference; the analytic identity divides by m_j.
            const double delta = 1e-4;
            StepOrderParameter bumped = step;
            bumped.m[j] = mj + delta;
            double p0 = stack.phis[0].eval(model.h);
            double p1 = recursion_core(model, bumped, stack.phis[0].grid, rule)
                            .phis[0].eval(model.h);
            out.dm[j - 1] = (p1 - p0) / delta;
            out.fd_fallback.push_back(j);
            continue;
        }

        // g_j(x) = E_j[ V_j (phi_{j+1}(x+z) - phi_j(x)) ] = m_j^{-1} E_j V_j log V_j.
        const double s = std::sqrt(s2);
        const GridFunction& phi_next = stack.phis[j + 1];
        const GridFunction& phi_cur = stack.phis[j];
        const int n = phi_cur.grid.n_points;

        GridFunction g;
        g.grid = phi_cur.grid;
        g.left_slope = 0.0;
        g.right_slope = 0.0;
        g.values.resize(n);
        for (int i = 0; i < n; ++i) {
            const double x = phi_cur.grid.node(i);
            const double b = mj * phi_cur.values[i];
            double acc = 0.0;
            for (int t = 0; t < rule.order; ++t) {
                const double y = x + s * rule.nodes[t];
                const double a = mj * phi_next.eval(y);
                acc += std::exp(rule.log_weights[t] + a - b) * (a - b);
            }
            g.values[i] = acc / mj;
        }

        out.dm[j - 1] = propagate_down(stack, std::move(g), j, rule, model.h) / mj;
    }
    return out;
}

GradientReport gradient_report(const ModelSpec& model, const RecursionStack& stack,
                               const HermiteRule& rule) {
    GradientReport report;
    const int k = stack.k();
    report.u_values.resize(k);
    report.dq.resize(k);
    for (int l = 1; l <= k; ++l) {
        report.u_values[l - 1] = compute_u(model, stack, l, rule);
        report.dq[l - 1] = -0.5 * (stack.step.m[l] - stack.step.m[l - 1]) *
                           model.xi.d2(stack.step.q[l]) * report.u_values[l - 1];
    }
    MGradient mg = grad_m(model, stack, rule);
    report.dm = std::move(mg.dm);
    report.dm_fd_fallback = std::move(mg.fd_fallback);
    return report;
}

}  // namespace parisi

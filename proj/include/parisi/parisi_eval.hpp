#pragma once

#include "parisi/model.hpp"
#include "parisi/numerics.hpp"

#include <vector>

namespace parisi {

// ============================================================================
// Smoothing recursion
// ============================================================================

// Level functions of the step recursion: phis[l] for l = 0..k+1, where
// phis[k+1] is the sampled boundary function and
// phis[l] = smooth_tilt(phis[l+1], m_l, xi'(q_{l+1}) - xi'(q_l)).
struct RecursionStack {
    std::vector<GridFunction> phis;   // size k+2
    std::vector<double> variances;    // size k+1
    StepOrderParameter step;

    int k() const { return step.k(); }
};

RecursionStack run_recursion(const ModelSpec& model, const StepOrderParameter& step,
                             const Grid& grid, const HermiteRule& rule);

// P = phi_0(h).
double parisi_p(const ModelSpec& model, const StepOrderParameter& step,
                const Grid& grid, const HermiteRule& rule);

struct EvalReport {
    double p_value = 0.0;
    double parisi_value = 0.0;      // log 2 + P - linear term
    double refinement_error = 0.0;  // |value| change when the grid is doubled
    Grid grid;
};

EvalReport parisi_objective(const ModelSpec& model, const StepOrderParameter& step,
                            const Grid& grid, const HermiteRule& rule);

// ============================================================================
// Analytic gradients
// ============================================================================

// U_l = E W_1..W_{l-1} (phi_l'(Z_l))^2 >= 0: squares the derivative of the
// level-l function and propagates it down through the weighted expectations
// of levels l-1 .. 0, then evaluates at h.
double compute_u(const ModelSpec& model, const RecursionStack& stack, int l,
                 const HermiteRule& rule);

// dP/dq_l = -1/2 (m_l - m_{l-1}) xi''(q_l) U_l, l = 1..k.
std::vector<double> grad_q(const ModelSpec& model, const RecursionStack& stack,
                           const HermiteRule& rule);

struct MGradient {
    std::vector<double> dm;            // dP/dm_j, j = 1..k
    std::vector<int> fd_fallback;      // indices j computed by one-sided differences
};

// dP/dm_j = (1/m_j) E W_1..W_j (X_{j+1} - X_j): the inner factor
// E_j W_j (X_{j+1} - X_j) = m_j^{-1} E_j W_j log W_j is built on the grid and
// propagated down. Coordinates with m_j below 1e-6 fall back to one-sided
// finite differences of P and are flagged.
MGradient grad_m(const ModelSpec& model, const RecursionStack& stack,
                 const HermiteRule& rule);

struct GradientReport {
    std::vector<double> dq;        // l = 1..k
    std::vector<double> dm;        // j = 1..k
    std::vector<double> u_values;  // l = 1..k
    std::vector<int> dm_fd_fallback;
};

GradientReport gradient_report(const ModelSpec& model, const RecursionStack& stack,
                               const HermiteRule& rule);

}  // namespace parisi

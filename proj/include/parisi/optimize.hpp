#pragma once

#include "parisi/model.hpp"
#include "parisi/parisi_eval.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace parisi {

struct OptimizerConfig {
    int k = 1;
    int max_iters = 300;
    double grad_tol = 1e-6;        // projected-gradient norm
    double step_init = 0.25;
    double backtrack_factor = 0.5;
    bool pin_top = true;           // m_k = 1
    int n_starts = 5;

    int n_points = 2049;
    int quad_order = 41;
    double safety_sigmas = 8.0;
};

struct MinimizeResult {
    StepOrderParameter step;
    double value = 0.0;
    int iterations = 0;
    double kkt_residual = 0.0;
    std::vector<std::pair<int, double>> history;  // (iteration, value), nonincreasing

    // Multi-start findings. Uniqueness of the minimizer is an open question,
    // so the spread of near-optimal minimizers is reported, never asserted:
    // minimizer_dispersion is the largest sup-norm distance from the best step
    // to any start that finished within 1e-6 of the best value.
    std::vector<double> start_values;
    double minimizer_dispersion = 0.0;

    bool line_search_stalled = false;
};

// Euclidean projection of raw (m, q) onto the feasible monotone box:
// pool-adjacent-violators on the free coordinates, then clipping to [0,1];
// endpoints pinned (m_0 = 0, q_0 = 0, q_{k+1} = 1, and m_k = 1 when pin_top).
StepOrderParameter project_feasible(std::vector<double> m_raw, std::vector<double> q_raw,
                                    bool pin_top);

// Nondecreasing least-squares fit (equal weights).
std::vector<double> pava_nondecreasing(std::vector<double> y);

// Projected gradient descent with backtracking line search on the objective
// log 2 + P - linear term, multi-start (deterministic from seed), best value
// wins with lexicographic tie-break on (m, q).
MinimizeResult minimize(const ModelSpec& model, const OptimizerConfig& cfg, uint64_t seed);

// minimize for k = 1..k_max, warm-starting each level by splitting the widest
// q-gap of the previous minimizer (value-preserving), so values are
// nonincreasing in k.
std::vector<MinimizeResult> rsb_sweep(const ModelSpec& model, int k_max, OptimizerConfig cfg,
                                      uint64_t seed);

}  // namespace parisi

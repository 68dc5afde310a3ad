#pragma once

#include "parisi/model.hpp"
#include "parisi/numerics.hpp"
#include "parisi/probes_report.hpp"

#include <cstdint>
#include <vector>

namespace parisi {

// ============================================================================
// Scalar model: eta = phi(h + sigma z) for n = 1, or eta = phi(|h_vec + sigma z_vec|)
// for n > 1 with |h_vec| = h and standard Gaussian z_vec in R^n (reduced to a
// 1-D radial integral against the noncentral-chi density).
// ============================================================================

struct ScalarModel {
    BoundaryFunction phi = BoundaryFunction::logcosh();
    double h = 0.0;
    double sigma = 1.0;  // sigma^2 plays the role of xi'(1)
    int n = 1;
};

// f(m) = (1/m) log E exp(m eta); f(0) = E eta by continuity. m may exceed 1.
// The rule is used for n = 1; n > 1 integrates the radial density with an
// internally refined Gauss-Legendre scheme.
double f_of_m(const ScalarModel& sm, double m, const HermiteRule& rule);

// f''(m) = m^{-3} (E V log^2 V - (E V log V)^2 - 2 E V log V),
// V = exp(m (eta - f(m))). Requires m > 0.
double f_second_derivative(const ScalarModel& sm, double m, const HermiteRule& rule);

// E eta^3 - 3 E eta^2 E eta + 2 (E eta)^3.
double third_cumulant(const ScalarModel& sm, const HermiteRule& rule);

// log E exp(lambda eta) <= lambda^2 log E exp(eta) + lambda (1-lambda) E eta,
// with equality at lambda = 0 and 1. Asserted.
ProbeReport check_interpolation_bound(const ScalarModel& sm,
                                      const std::vector<double>& lambdas,
                                      const HermiteRule& rule);

// Exponential tail bound from A = log E exp(eta - E eta):
// P(eta >= E eta + t) <= exp(-t^2/4A) for t <= 2A, exp(A - t) for t >= 2A.
// The empirical tail is estimated by seeded Monte Carlo and must stay below
// the bound plus three binomial standard errors. Asserted.
double concentration_bound(double a, double t);
ProbeReport check_concentration(const ScalarModel& sm, const std::vector<double>& t_grid,
                                long mc_samples, uint64_t seed, const HermiteRule& rule);

// Second differences of m -> f(m) on the grid must be >= -1e-8
// (log-convexity of the L_m norm of exp eta). Asserted.
ProbeReport check_log_convexity(const ScalarModel& sm, const std::vector<double>& m_grid,
                                const HermiteRule& rule);

// Density of |h_vec + z_vec| for |h_vec| = lambda and standard Gaussian z_vec
// in R^n, n >= 2. Exposed for direct validation of the radial reduction.
double noncentral_chi_density(int n, double lambda, double r);

}  // namespace parisi

#pragma once

#include <functional>
#include <vector>

namespace parisi {

// ============================================================================
// Uniform symmetric grid and sampled functions
// ============================================================================

struct Grid {
    double half_width = 10.0;
    int n_points = 2049;  // odd, so x = 0 is a node

    double dx() const { return 2.0 * half_width / (n_points - 1); }
    double node(int i) const { return -half_width + i * dx(); }
};

// Real function sampled on a Grid. Inside [-L, L] evaluation is 4-point
// Lagrange (cubic); outside it is the linear extension
// f(L) + right_slope * (x - L) and its mirror on the left.
struct GridFunction {
    Grid grid;
    std::vector<double> values;
    double left_slope = 0.0;
    double right_slope = 0.0;

    double eval(double x) const;

    // Lazy invariant check: stored slopes vs one-sided finite differences
    // at the boundary, tolerance tol_factor * dx.
    bool slopes_consistent(double tol_factor = 10.0) const;
};

GridFunction sample_on_grid(const Grid& g, const std::function<double(double)>& f,
                            double left_slope, double right_slope);

// ============================================================================
// Quadrature rules
// ============================================================================

// Gauss-Hermite rule for the standard Gaussian weight e^{-s^2/2}/sqrt(2 pi):
// sum_i weights[i] f(nodes[i]) ~ E f(z), z ~ N(0,1). Weights sum to 1,
// nodes are antisymmetric.
struct HermiteRule {
    int order = 0;
    std::vector<double> nodes;        // increasing
    std::vector<double> weights;
    std::vector<double> log_weights;  // cached for log-sum-exp accumulation
};

HermiteRule hermite_rule(int order);

// Gauss-Legendre rule on [-1, 1].
struct LegendreRule {
    int order = 0;
    std::vector<double> nodes;
    std::vector<double> weights;  // sum to 2
};

LegendreRule legendre_rule(int order);

// ============================================================================
// Smoothing operators
// ============================================================================

// x -> (1/m) log E exp(m f(x + z)), z ~ N(0, sigma2); for m = 0 the plain
// expectation x -> E f(x + z). sigma2 = 0 returns f unchanged. Output keeps
// the input extrapolation slopes (smoothing preserves linear tails).
// Accumulation is log-sum-exp with max-shift; a non-finite node throws.
// Variances above 1 are integrated as equal substeps (exact for the
// smoothing semigroup) to keep the quadrature converged at any sigma.
GridFunction smooth_tilt(const GridFunction& f, double m, double sigma2,
                         const HermiteRule& rule);

// x -> E[ V(x,z) f_next(x+z) ] with the change-of-density weight
// V(x,z) = exp(m (phi_next(x+z) - phi_cur(x))), z ~ N(0, sigma2).
// Requires phi_cur = smooth_tilt(phi_next, m, sigma2) on the same grid,
// which normalizes E V = 1. m = 0 degenerates to plain smoothing and
// sigma2 = 0 to the identity.
GridFunction tilt_weight_expectation(const GridFunction& f_next,
                                     const GridFunction& phi_next,
                                     const GridFunction& phi_cur,
                                     double m, double sigma2,
                                     const HermiteRule& rule);

// Fourth-order finite-difference derivative (one-sided at the boundary).
// Output slopes are 0: the derivative of a linear tail is the constant
// already carried by the boundary values.
GridFunction differentiate(const GridFunction& f);

// log cosh with no overflow for large |x|.
double log_cosh(double x);

}  // namespace parisi

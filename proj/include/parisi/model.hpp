#pragma once

#include "parisi/numerics.hpp"

#include <string>
#include <utility>
#include <vector>

namespace parisi {

// ============================================================================
// Mixture function xi
// ============================================================================

// xi(x) = sum_p beta_p^2 x^p over even p >= 2, or the dedicated SK form
// beta^2 x^2 / 2. Even powers with positive coefficients make xi symmetric
// and convex with xi' nondecreasing on [0, inf), so level variances are
// always nonnegative.
class MixtureFunction {
public:
    static MixtureFunction sk(double beta);                                // beta^2 x^2 / 2
    static MixtureFunction mixture(std::vector<std::pair<int, double>> terms);  // (p, beta_p)

    double value(double x) const;
    double d1(double x) const;
    double d2(double x) const;

    const std::vector<std::pair<int, double>>& monomials() const { return coeff_; }

private:
    MixtureFunction() = default;
    std::vector<std::pair<int, double>> coeff_;  // (p, c_p), xi = sum c_p x^p
};

double xi_eval(const MixtureFunction& xi, double x, int order);

// ============================================================================
// Boundary function phi
// ============================================================================

struct BoundaryFunction {
    enum class Kind { LogCosh, Tabulated };

    Kind kind = Kind::LogCosh;
    GridFunction table;  // Tabulated only

    double eval(double x) const;
    double left_slope() const;
    double right_slope() const;

    static BoundaryFunction logcosh();
    static BoundaryFunction tabulated(GridFunction f);  // validates symmetry/convexity/phi(0)=0
};

// ============================================================================
// Step order parameter and model
// ============================================================================

// m = (m_0 .. m_k), q = (q_0 .. q_{k+1}) with m_0 = 0, q_0 = 0, q_{k+1} = 1,
// both nondecreasing, values in [0,1]. m_k = 1 is required by default and can
// be relaxed. Degenerate levels (equal consecutive q or m) are valid.
struct StepOrderParameter {
    std::vector<double> m;
    std::vector<double> q;

    int k() const { return static_cast<int>(m.size()) - 1; }
};

struct StepValidation {
    bool ok = true;
    std::string violation;  // first violated constraint
};

StepValidation validate_step(const StepOrderParameter& step, bool require_top_one = true);

struct ModelSpec {
    MixtureFunction xi = MixtureFunction::sk(1.0);
    BoundaryFunction phi = BoundaryFunction::logcosh();
    double h = 0.0;
};

// E z_l^2 = xi'(q_{l+1}) - xi'(q_l), 0 <= l <= k.
double level_variance(const MixtureFunction& xi, const StepOrderParameter& step, int l);

// (1/2) int_0^1 m(q) q xi''(q) dq, exact per piece via the antiderivative
// q xi'(q) - xi(q).
double linear_term(const MixtureFunction& xi, const StepOrderParameter& step);

// L = |h| + safety_sigmas * sqrt(xi'(1)) + 2.
Grid build_grid(const ModelSpec& model, double safety_sigmas = 8.0, int n_points = 2049);

GridFunction sample_boundary(const BoundaryFunction& phi, const Grid& g);

}  // namespace parisi

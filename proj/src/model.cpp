#include "parisi/model.hpp"

#include <cmath>
#include <stdexcept>

namespace parisi {

// ============================================================================
// MixtureFunction
// ============================================================================

MixtureFunction MixtureFunction::sk(double beta) {
    if (beta < 0.0) throw std::invalid_argument("MixtureFunction::sk: beta must be >= 0");
    MixtureFunction xi;
    if (beta > 0.0) xi.coeff_.push_back({2, 0.5 * beta * beta});
    return xi;
}

MixtureFunction MixtureFunction::mixture(std::vector<std::pair<int, double>> terms) {
    MixtureFunction xi;
    for (auto& [p, beta] : terms) {
        if (p < 2 || p % 2 != 0)
            throw std::invalid_argument("MixtureFunction::mixture: powers must be even and >= 2");
        if (beta <= 0.0)
            throw std::invalid_argument("MixtureFunction::mixture: beta_p must be > 0");
        xi.coeff_.push_back({p, beta * beta});
    }
    return xi;
}

double MixtureFunction::value(double x) const {
    double acc = 0.0;
    for (auto& [p, c] : coeff_) acc += c * std::pow(x, p);
    return acc;
}

double MixtureFunction::d1(double x) const {
    double acc = 0.0;
    for (auto& [p, c] : coeff_) acc += c * p * std::pow(x, p - 1);
    return acc;
}

double MixtureFunction::d2(double x) const {
    double acc = 0.0;
    for (auto& [p, c] : coeff_) acc += c * p * (p - 1) * std::pow(x, p - 2);
    return acc;
}

double xi_eval(const MixtureFunction& xi, double x, int order) {
    switch (order) {
        case 0: return xi.value(x);
        case 1: return xi.d1(x);
        case 2: return xi.d2(x);
        default: throw std::invalid_argument("xi_eval: order must be 0, 1 or 2");
    }
}

// ============================================================================
// BoundaryFunction
// ============================================================================

BoundaryFunction BoundaryFunction::logcosh() {
    BoundaryFunction phi;
    phi.kind = Kind::LogCosh;
    return phi;
}

BoundaryFunction BoundaryFunction::tabulated(GridFunction f) {
    const int n = f.grid.n_points;
    if (n < 5 || n % 2 == 0)
        throw std::invalid_argument("BoundaryFunction::tabulated: grid must have odd size >= 5");
    if (static_cast<int>(f.values.size()) != n)
        throw std::invalid_argument("BoundaryFunction::tabulated: value count does not match grid");

    const double scale = 1.0 + std::fabs(f.values.front()) + std::fabs(f.values.back());
    if (std::fabs(f.values[n / 2]) > 1e-9 * scale)
        throw std::invalid_argument("BoundaryFunction::tabulated: phi(0) must be 0");
    for (int i = 0; i < n; ++i)
        if (std::fabs(f.values[i] - f.values[n - 1 - i]) > 1e-9 * scale)
            throw std::invalid_argument("BoundaryFunction::tabulated: phi must be even");
    for (int i = 1; i < n - 1; ++i)
        if (f.values[i + 1] - 2.0 * f.values[i] + f.values[i - 1] < -1e-9 * scale)
            throw std::invalid_argument("BoundaryFunction::tabulated: phi must be convex");
    if (!f.slopes_consistent())
        throw std::invalid_argument(
            "BoundaryFunction::tabulated: extrapolation slopes do not match the boundary "
            "finite differences");

    BoundaryFunction phi;
    phi.kind = Kind::Tabulated;
    phi.table = std::move(f);
    return phi;
}

double BoundaryFunction::eval(double x) const {
    return kind == Kind::LogCosh ? log_cosh(x) : table.eval(x);
}

double BoundaryFunction::left_slope() const {
    return kind == Kind::LogCosh ? -1.0 : table.left_slope;
}

double BoundaryFunction::right_slope() const {
    return kind == Kind::LogCosh ? 1.0 : table.right_slope;
}

// ============================================================================
// Step order parameter
// ============================================================================

StepValidation validate_step(const StepOrderParameter& step, bool require_top_one) {
    auto fail = [](std::string msg) { return StepValidation{false, std::move(msg)}; };

    const int k = step.k();
    if (k < 0 || step.m.empty()) return fail("m is empty");
    if (static_cast<int>(step.q.size()) != k + 2)
        return fail("q must have exactly one more entry than m");

    if (step.m[0] != 0.0) return fail("m_0 must be 0");
    for (int j = 0; j <= k; ++j) {
        if (step.m[j] < 0.0 || step.m[j] > 1.0) return fail("m values must lie in [0,1]");
        if (j > 0 && step.m[j] < step.m[j - 1]) return fail("m must be nondecreasing");
    }
    if (require_top_one && step.m[k] != 1.0) return fail("m_k must be 1");

    if (step.q[0] != 0.0) return fail("q_0 must be 0");
    if (step.q[k + 1] != 1.0) return fail("q_{k+1} must be 1");
    for (int l = 0; l <= k + 1; ++l) {
        if (step.q[l] < 0.0 || step.q[l] > 1.0) return fail("q values must lie in [0,1]");
        if (l > 0 && step.q[l] < step.q[l - 1]) return fail("q must be nondecreasing");
    }
    return {};
}

double level_variance(const MixtureFunction& xi, const StepOrderParameter& step, int l) {
    if (l < 0 || l > step.k()) throw std::invalid_argument("level_variance: l out of range");
    double v = xi.d1(step.q[l + 1]) - xi.d1(step.q[l]);
    if (v < -1e-12)
        throw std::logic_error("level_variance: negative variance (xi' not nondecreasing)");
    return v;
}

double linear_term(const MixtureFunction& xi, const StepOrderParameter& step) {
    auto anti = [&xi](double q) { return q * xi.d1(q) - xi.value(q); };  // d/dq = q xi''(q)
    double acc = 0.0;
    for (int l = 0; l <= step.k(); ++l)
        acc += step.m[l] * (anti(step.q[l + 1]) - anti(step.q[l]));
    return 0.5 * acc;
}

// ============================================================================
// Grid construction
// ============================================================================

Grid build_grid(const ModelSpec& model, double safety_sigmas, int n_points) {
    if (safety_sigmas <= 0.0) throw std::invalid_argument("build_grid: safety_sigmas must be > 0");
    if (n_points < 5 || n_points % 2 == 0)
        throw std::invalid_argument("build_grid: n_points must be odd and >= 5");
    Grid g;
    g.half_width = std::fabs(model.h) + safety_sigmas * std::sqrt(model.xi.d1(1.0)) + 2.0;
    g.n_points = n_points;
    return g;
}

GridFunction sample_boundary(const BoundaryFunction& phi, const Grid& g) {
    return sample_on_grid(
        g, [&phi](double x) { return phi.eval(x); }, phi.left_slope(), phi.right_slope());
}

}  // namespace parisi

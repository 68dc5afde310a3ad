#include "parisi/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace parisi {

double log_cosh(double x) {
    double a = std::fabs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - M_LN2;
}

double GridFunction::eval(double x) const {
    const double L = grid.half_width;
    const int n = grid.n_points;
    const double h = grid.dx();
    if (x <= -L) return values.front() + left_slope * (x + L);
    if (x >= L) return values.back() + right_slope * (x - L);

    double u = (x + L) / h;
    int j = static_cast<int>(u);           // x in [node_j, node_{j+1})
    int base = std::clamp(j - 1, 0, n - 4);  // 4-point stencil, clamped at edges
    double t = u - (base + 1);             // position relative to stencil's 2nd node

    // Lagrange basis on nodes at offsets -1, 0, 1, 2.
    double w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    double w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    double w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    double w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    return w0 * values[base] + w1 * values[base + 1] + w2 * values[base + 2] +
           w3 * values[base + 3];
}

bool GridFunction::slopes_consistent(double tol_factor) const {
    const double h = grid.dx();
    const double tol = tol_factor * h;
    double left_fd = (values[1] - values[0]) / h;
    double right_fd = (values[values.size() - 1] - values[values.size() - 2]) / h;
    return std::fabs(left_fd - left_slope) <= tol && std::fabs(right_fd - right_slope) <= tol;
}

GridFunction sample_on_grid(const Grid& g, const std::function<double(double)>& f,
                            double left_slope, double right_slope) {
    GridFunction out;
    out.grid = g;
    out.left_slope = left_slope;
    out.right_slope = right_slope;
    out.values.resize(g.n_points);
    for (int i = 0; i < g.n_points; ++i) out.values[i] = f(g.node(i));
    return out;
}

namespace {

// Largest variance integrated in one Gauss-Hermite pass. Wider kernels lose
// quadrature accuracy (the integrand's analyticity strip shrinks like 1/sigma),
// so bigger steps are split into equal substeps; the split is exact for the
// smoothing semigroup.
constexpr double kMaxStepVariance = 1.0;

int substep_count(double sigma2) {
    return std::max(1, static_cast<int>(std::ceil(sigma2 / kMaxStepVariance)));
}

GridFunction smooth_tilt_once(const GridFunction& f, double m, double sigma2,
                              const HermiteRule& rule) {
    const double s = std::sqrt(sigma2);
    const int n = f.grid.n_points;
    const int K = rule.order;

    GridFunction out;
    out.grid = f.grid;
    out.left_slope = f.left_slope;
    out.right_slope = f.right_slope;
    out.values.resize(n);

    std::vector<double> a(K);
    for (int i = 0; i < n; ++i) {
        const double x = f.grid.node(i);
        if (m == 0.0) {
            double acc = 0.0;
            for (int k = 0; k < K; ++k) acc += rule.weights[k] * f.eval(x + s * rule.nodes[k]);
            out.values[i] = acc;
        } else {
            double amax = -HUGE_VAL;
            for (int k = 0; k < K; ++k) {
                a[k] = rule.log_weights[k] + m * f.eval(x + s * rule.nodes[k]);
                amax = std::max(amax, a[k]);
            }
            double acc = 0.0;
            for (int k = 0; k < K; ++k) acc += std::exp(a[k] - amax);
            out.values[i] = (amax + std::log(acc)) / m;
        }
        if (!std::isfinite(out.values[i]))
            throw std::runtime_error("smooth_tilt: non-finite value (growth/overflow misconfiguration)");
    }
    return out;
}

GridFunction tilt_weight_expectation_once(const GridFunction& f_next,
                                          const GridFunction& phi_next,
                                          const GridFunction& phi_cur,
                                          double m, double sigma2,
                                          const HermiteRule& rule) {
    const double s = std::sqrt(sigma2);
    const int n = f_next.grid.n_points;
    const int K = rule.order;

    GridFunction out;
    out.grid = f_next.grid;
    out.left_slope = f_next.left_slope;
    out.right_slope = f_next.right_slope;
    out.values.resize(n);

    for (int i = 0; i < n; ++i) {
        const double x = phi_cur.grid.node(i);
        // b = log E exp(m phi_next(x+z)); every summand below is exp(<= 0) in
        // magnitude, so the tilt cannot overflow.
        const double b = m * phi_cur.values[i];
        double acc = 0.0;
        for (int k = 0; k < K; ++k) {
            const double y = x + s * rule.nodes[k];
            acc += std::exp(rule.log_weights[k] + m * phi_next.eval(y) - b) * f_next.eval(y);
        }
        out.values[i] = acc;
        if (!std::isfinite(acc))
            throw std::runtime_error("tilt_weight_expectation: non-finite value");
    }
    return out;
}

}  // namespace

GridFunction smooth_tilt(const GridFunction& f, double m, double sigma2,
                         const HermiteRule& rule) {
    if (m < 0.0) throw std::invalid_argument("smooth_tilt: m must be >= 0");
    if (sigma2 < 0.0) throw std::invalid_argument("smooth_tilt: sigma2 must be >= 0");
    if (sigma2 == 0.0) return f;

    const int nsub = substep_count(sigma2);
    GridFunction out = smooth_tilt_once(f, m, sigma2 / nsub, rule);
    for (int i = 1; i < nsub; ++i) out = smooth_tilt_once(out, m, sigma2 / nsub, rule);
    return out;
}

GridFunction tilt_weight_expectation(const GridFunction& f_next,
                                     const GridFunction& phi_next,
                                     const GridFunction& phi_cur,
                                     double m, double sigma2,
                                     const HermiteRule& rule) {
    if (m < 0.0) throw std::invalid_argument("tilt_weight_expectation: m must be >= 0");
    if (sigma2 < 0.0) throw std::invalid_argument("tilt_weight_expectation: sigma2 must be >= 0");
    if (sigma2 == 0.0) return f_next;  // z = 0 and V = 1
    if (m == 0.0) return smooth_tilt(f_next, 0.0, sigma2, rule);

    const int nsub = substep_count(sigma2);
    if (nsub == 1) return tilt_weight_expectation_once(f_next, phi_next, phi_cur, m, sigma2, rule);

    // The tilted kernel composes across substeps exactly like the smoothing
    // semigroup: rebuild the intermediate smoothed functions (the same
    // sequence smooth_tilt used to produce phi_cur) and chain through them.
    const double s2 = sigma2 / nsub;
    std::vector<GridFunction> ladder(nsub + 1);
    ladder[0] = phi_next;
    for (int i = 1; i < nsub; ++i) ladder[i] = smooth_tilt_once(ladder[i - 1], m, s2, rule);
    ladder[nsub] = phi_cur;

    GridFunction g = f_next;
    for (int i = 1; i <= nsub; ++i)
        g = tilt_weight_expectation_once(g, ladder[i - 1], ladder[i], m, s2, rule);
    return g;
}

GridFunction differentiate(const GridFunction& f) {
    const int n = f.grid.n_points;
    const double h = f.grid.dx();
    const std::vector<double>& v = f.values;

    GridFunction out;
    out.grid = f.grid;
    out.left_slope = 0.0;
    out.right_slope = 0.0;
    out.values.resize(n);

    out.values[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h);
    out.values[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * h);
    for (int i = 2; i < n - 2; ++i)
        out.values[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
    out.values[n - 2] =
        (3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] + 6.0 * v[n - 4] - v[n - 5]) / (12.0 * h);
    out.values[n - 1] =
        (25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4] + 3.0 * v[n - 5]) / (12.0 * h);
    return out;
}

}  // namespace parisi

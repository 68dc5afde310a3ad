#include "parisi/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace parisi {

namespace {

// Orthonormal polynomials for the weight e^{-x^2/2}/sqrt(2 pi):
// p0 = 1, p1 = x, p_{j+1} = (x p_j - sqrt(j) p_{j-1}) / sqrt(j+1).
// Fills seq[0..n]. Returns the number of sign changes in the sequence,
// which equals the number of roots of p_n greater than x.
int hermite_seq(int n, double x, std::vector<double>& seq) {
    seq[0] = 1.0;
    if (n >= 1) seq[1] = x;
    for (int j = 1; j < n; ++j)
        seq[j + 1] = (x * seq[j] - std::sqrt(double(j)) * seq[j - 1]) / std::sqrt(double(j + 1));

    int changes = 0;
    double prev = seq[0];
    for (int j = 1; j <= n; ++j) {
        double cur = seq[j];
        if (cur == 0.0) cur = -prev;  // roots of consecutive p_j never coincide
        if ((cur > 0) != (prev > 0)) ++changes;
        prev = cur;
    }
    return changes;
}

}  // namespace

HermiteRule hermite_rule(int order) {
    if (order < 1) throw std::invalid_argument("hermite_rule: order must be >= 1");
    const int n = order;
    HermiteRule rule;
    rule.order = n;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    rule.log_weights.resize(n);

    std::vector<double> seq(n + 1);
    const double bound = std::sqrt(4.0 * n + 2.0) + 1.0;  // all roots inside

    // Sturm bisection: root i (ascending) is where the count of roots > x
    // drops below n - i.
    for (int i = 0; i < n; ++i) {
        double lo = -bound, hi = bound;
        for (int it = 0; it < 120 && hi - lo > 1e-15 * bound; ++it) {
            double mid = 0.5 * (lo + hi);
            if (hermite_seq(n, mid, seq) >= n - i)
                lo = mid;
            else
                hi = mid;
        }
        double x = 0.5 * (lo + hi);
        // Newton polish: p_n'(x) = sqrt(n) p_{n-1}(x).
        for (int it = 0; it < 4; ++it) {
            hermite_seq(n, x, seq);
            double deriv = std::sqrt(double(n)) * seq[n - 1];
            if (deriv == 0.0) break;
            x -= seq[n] / deriv;
        }
        rule.nodes[i] = x;
    }

    // Enforce exact antisymmetry.
    for (int i = 0; i < n / 2; ++i) {
        double v = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
        rule.nodes[i] = -v;
        rule.nodes[n - 1 - i] = v;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;

    // Christoffel weights: w_i = 1 / sum_{j<n} p_j(x_i)^2 (first moment is 1).
    for (int i = 0; i < n; ++i) {
        hermite_seq(n, rule.nodes[i], seq);
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += seq[j] * seq[j];
        rule.weights[i] = 1.0 / s;
    }
    for (int i = 0; i < n / 2; ++i) {
        double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
        rule.weights[i] = rule.weights[n - 1 - i] = w;
    }
    for (int i = 0; i < n; ++i) rule.log_weights[i] = std::log(rule.weights[i]);
    return rule;
}

LegendreRule legendre_rule(int order) {
    if (order < 1) throw std::invalid_argument("legendre_rule: order must be >= 1");
    const int n = order;
    LegendreRule rule;
    rule.order = n;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double step = p1 / dp;
            x -= step;
            if (std::fabs(step) < 1e-15) break;
        }
        rule.nodes[i] = -x;  // guesses enumerate from the largest root
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace parisi

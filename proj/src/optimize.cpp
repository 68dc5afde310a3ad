#include "parisi/optimize.hpp"

#include "parisi/random.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace parisi {

namespace {

// Variable layout: x = (m_1..m_{k_free}, q_1..q_k), k_free = k-1 when the top
// is pinned.
struct Layout {
    int k;
    bool pin_top;
    int n_m() const { return pin_top ? k - 1 : k; }
    int dim() const { return n_m() + k; }

    StepOrderParameter to_step(const std::vector<double>& x) const {
        std::vector<double> m(k + 1), q(k + 2);
        m[0] = 0.0;
        for (int j = 1; j <= n_m(); ++j) m[j] = x[j - 1];
        if (pin_top) m[k] = 1.0;
        q[0] = 0.0;
        q[k + 1] = 1.0;
        for (int l = 1; l <= k; ++l) q[l] = x[n_m() + l - 1];
        return {std::move(m), std::move(q)};
    }

    std::vector<double> from_step(const StepOrderParameter& s) const {
        std::vector<double> x(dim());
        for (int j = 1; j <= n_m(); ++j) x[j - 1] = s.m[j];
        for (int l = 1; l <= k; ++l) x[n_m() + l - 1] = s.q[l];
        return x;
    }

    std::vector<double> project(const std::vector<double>& x) const {
        StepOrderParameter s = to_step(x);
        s = project_feasible(std::move(s.m), std::move(s.q), pin_top);
        return from_step(s);
    }
};

double norm2(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

struct Objective {
    const ModelSpec& model;
    Grid grid;
    HermiteRule rule;

    double value(const StepOrderParameter& s) const {
        return M_LN2 + parisi_p(model, s, grid, rule) - linear_term(model.xi, s);
    }

    // d(objective)/dq_l = 1/2 (m_l - m_{l-1}) xi''(q_l) (q_l - U_l)
    // d(objective)/dm_j = dP/dm_j - 1/2 (T(q_{j+1}) - T(q_j)), T = q xi' - xi
    std::vector<double> gradient(const StepOrderParameter& s, const Layout& lay) const {
        RecursionStack stack = run_recursion(model, s, grid, rule);
        GradientReport g = gradient_report(model, stack, rule);
        auto anti = [this](double q) { return q * model.xi.d1(q) - model.xi.value(q); };

        std::vector<double> out(lay.dim());
        for (int j = 1; j <= lay.n_m(); ++j)
            out[j - 1] = g.dm[j - 1] - 0.5 * (anti(s.q[j + 1]) - anti(s.q[j]));
        for (int l = 1; l <= lay.k; ++l)
            out[lay.n_m() + l - 1] =
                g.dq[l - 1] + 0.5 * (s.m[l] - s.m[l - 1]) * model.xi.d2(s.q[l]) * s.q[l];
        return out;
    }
};

MinimizeResult descend(const Objective& obj, const Layout& lay, std::vector<double> x,
                       const OptimizerConfig& cfg) {
    MinimizeResult res;
    x = lay.project(x);
    double fx = obj.value(lay.to_step(x));
    res.history.push_back({0, fx});

    double t = cfg.step_init;
    int it = 0;
    for (; it < cfg.max_iters; ++it) {
        std::vector<double> g = obj.gradient(lay.to_step(x), lay);

        // projected-gradient residual at unit step
        std::vector<double> probe(x.size());
        for (size_t i = 0; i < x.size(); ++i) probe[i] = x[i] - g[i];
        probe = lay.project(probe);
        res.kkt_residual = norm2(x, probe);
        if (res.kkt_residual < cfg.grad_tol) break;

        // backtracking: f(x+) <= f(x) - 1e-4/t ||x+ - x||^2
        bool accepted = false;
        while (t >= 1e-14) {
            std::vector<double> cand(x.size());
            for (size_t i = 0; i < x.size(); ++i) cand[i] = x[i] - t * g[i];
            cand = lay.project(cand);
            double fc = obj.value(lay.to_step(cand));
            double dist = norm2(x, cand);
            if (fc <= fx - 1e-4 / t * dist * dist) {
                x = std::move(cand);
                fx = fc;
                accepted = true;
                break;
            }
            t *= cfg.backtrack_factor;
        }
        if (!accepted) {
            res.line_search_stalled = true;
            break;
        }
        res.history.push_back({it + 1, fx});
        t = std::min(t * 2.0, 4.0 * cfg.step_init);
    }

    if (it == cfg.max_iters) {  // residual above is one step stale
        std::vector<double> g = obj.gradient(lay.to_step(x), lay);
        std::vector<double> probe(x.size());
        for (size_t i = 0; i < x.size(); ++i) probe[i] = x[i] - g[i];
        res.kkt_residual = norm2(x, lay.project(probe));
    }

    res.step = lay.to_step(x);
    res.value = fx;
    res.iterations = it;
    return res;
}

bool lexicographic_less(const StepOrderParameter& a, const StepOrderParameter& b) {
    if (a.m != b.m) return a.m < b.m;
    return a.q < b.q;
}

void check_config(const OptimizerConfig& cfg) {
    if (cfg.k < 1) throw std::invalid_argument("OptimizerConfig: k must be >= 1");
    if (cfg.max_iters < 1) throw std::invalid_argument("OptimizerConfig: max_iters must be >= 1");
    if (cfg.grad_tol <= 0.0) throw std::invalid_argument("OptimizerConfig: grad_tol must be > 0");
    if (cfg.step_init <= 0.0) throw std::invalid_argument("OptimizerConfig: step_init must be > 0");
    if (cfg.backtrack_factor <= 0.0 || cfg.backtrack_factor >= 1.0)
        throw std::invalid_argument("OptimizerConfig: backtrack_factor must be in (0,1)");
    if (cfg.n_starts < 1) throw std::invalid_argument("OptimizerConfig: n_starts must be >= 1");
}

std::vector<std::vector<double>> build_starts(const Layout& lay, const OptimizerConfig& cfg,
                                              uint64_t seed,
                                              const StepOrderParameter* warm) {
    std::vector<std::vector<double>> starts;
    const int k = lay.k;

    if (warm) starts.push_back(lay.from_step(*warm));

    // replica-symmetric start: constant m = 1 with all interior q collapsed
    {
        StepOrderParameter s;
        s.m.assign(k + 1, 1.0);
        s.m[0] = 0.0;
        s.q.assign(k + 2, 0.0);
        s.q[k + 1] = 1.0;
        starts.push_back(lay.from_step(s));
    }
    // linear ramp
    {
        StepOrderParameter s;
        s.m.resize(k + 1);
        s.q.resize(k + 2);
        for (int j = 0; j <= k; ++j) s.m[j] = double(j) / k;
        for (int l = 0; l <= k + 1; ++l) s.q[l] = double(l) / (k + 1);
        starts.push_back(lay.from_step(s));
    }
    const size_t want = static_cast<size_t>(cfg.n_starts) + (warm ? 1 : 0);
    for (uint64_t i = 0; starts.size() < want; ++i) {
        Rng rng = Rng::substream(seed, i);
        std::vector<double> x(lay.dim());
        for (double& v : x) v = rng.uniform();
        starts.push_back(lay.project(x));
    }
    if (starts.size() > want) starts.resize(want);
    return starts;
}

MinimizeResult minimize_impl(const ModelSpec& model, const OptimizerConfig& cfg, uint64_t seed,
                             const StepOrderParameter* warm) {
    check_config(cfg);
    Layout lay{cfg.k, cfg.pin_top};
    Objective obj{model, build_grid(model, cfg.safety_sigmas, cfg.n_points),
                  hermite_rule(cfg.quad_order)};

    std::vector<MinimizeResult> runs;
    for (const std::vector<double>& x0 : build_starts(lay, cfg, seed, warm))
        runs.push_back(descend(obj, lay, x0, cfg));

    size_t best = 0;
    for (size_t i = 1; i < runs.size(); ++i) {
        if (runs[i].value < runs[best].value ||
            (runs[i].value == runs[best].value &&
             lexicographic_less(runs[i].step, runs[best].step)))
            best = i;
    }

    MinimizeResult result = runs[best];
    for (const MinimizeResult& r : runs) {
        result.start_values.push_back(r.value);
        if (r.value <= result.value + 1e-6) {
            double d = 0.0;
            for (int j = 0; j <= cfg.k; ++j)
                d = std::max(d, std::fabs(r.step.m[j] - result.step.m[j]));
            for (int l = 0; l <= cfg.k + 1; ++l)
                d = std::max(d, std::fabs(r.step.q[l] - result.step.q[l]));
            result.minimizer_dispersion = std::max(result.minimizer_dispersion, d);
        }
    }
    return result;
}

}  // namespace

std::vector<double> pava_nondecreasing(std::vector<double> y) {
    const size_t n = y.size();
    if (n == 0) return y;
    std::vector<double> mean(n), count(n);
    size_t blocks = 0;
    for (size_t i = 0; i < n; ++i) {
        mean[blocks] = y[i];
        count[blocks] = 1.0;
        ++blocks;
        while (blocks > 1 && mean[blocks - 2] >= mean[blocks - 1]) {
            double c = count[blocks - 2] + count[blocks - 1];
            mean[blocks - 2] = (mean[blocks - 2] * count[blocks - 2] +
                                mean[blocks - 1] * count[blocks - 1]) / c;
            count[blocks - 2] = c;
            --blocks;
        }
    }
    size_t i = 0;
    for (size_t b = 0; b < blocks; ++b)
        for (size_t c = 0; c < static_cast<size_t>(count[b]); ++c) y[i++] = mean[b];
    return y;
}

StepOrderParameter project_feasible(std::vector<double> m_raw, std::vector<double> q_raw,
                                    bool pin_top) {
    const int k = static_cast<int>(m_raw.size()) - 1;
    if (k < 0 || static_cast<int>(q_raw.size()) != k + 2)
        throw std::invalid_argument("project_feasible: inconsistent lengths");

    auto clip01 = [](double v) { return std::clamp(v, 0.0, 1.0); };

    const int top = pin_top ? k - 1 : k;
    if (top >= 1) {
        std::vector<double> inner(m_raw.begin() + 1, m_raw.begin() + top + 1);
        inner = pava_nondecreasing(std::move(inner));
        for (int j = 1; j <= top; ++j) m_raw[j] = clip01(inner[j - 1]);
    }
    m_raw[0] = 0.0;
    if (pin_top && k >= 1) m_raw[k] = 1.0;

    if (k >= 1) {
        std::vector<double> inner(q_raw.begin() + 1, q_raw.begin() + k + 1);
        inner = pava_nondecreasing(std::move(inner));
        for (int l = 1; l <= k; ++l) q_raw[l] = clip01(inner[l - 1]);
    }
    q_raw[0] = 0.0;
    q_raw[k + 1] = 1.0;

    return {std::move(m_raw), std::move(q_raw)};
}

MinimizeResult minimize(const ModelSpec& model, const OptimizerConfig& cfg, uint64_t seed) {
    return minimize_impl(model, cfg, seed, nullptr);
}

std::vector<MinimizeResult> rsb_sweep(const ModelSpec& model, int k_max, OptimizerConfig cfg,
                                      uint64_t seed) {
    if (k_max < 1) throw std::invalid_argument("rsb_sweep: k_max must be >= 1");
    std::vector<MinimizeResult> results;

    for (int k = 1; k <= k_max; ++k) {
        cfg.k = k;
        if (results.empty()) {
            results.push_back(minimize(model, cfg, seed));
            continue;
        }
        // split the widest q-gap of the previous minimizer; duplicating the
        // level's m value preserves the objective exactly
        const StepOrderParameter& prev = results.back().step;
        int widest = 0;
        for (int l = 1; l <= k - 1; ++l)
            if (prev.q[l + 1] - prev.q[l] > prev.q[widest + 1] - prev.q[widest]) widest = l;

        StepOrderParameter warm;
        warm.m = prev.m;
        warm.q = prev.q;
        warm.m.insert(warm.m.begin() + widest + 1, prev.m[widest]);
        warm.q.insert(warm.q.begin() + widest + 1,
                      0.5 * (prev.q[widest] + prev.q[widest + 1]));
        results.push_back(minimize_impl(model, cfg, seed, &warm));
    }
    return results;
}

}  // namespace parisi

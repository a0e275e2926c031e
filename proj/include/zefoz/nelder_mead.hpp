#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace zefoz {

struct SimplexOptions {
    int max_iterations = 20000;
    double x_tolerance = 1e-12;   // simplex diameter
    double f_tolerance = 0.0;     // optional spread tolerance, 0 disables
};

struct SimplexResult {
    std::vector<double> x;
    double fmin = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Derivative-free Nelder-Mead simplex minimization with the standard
/// reflection/expansion/contraction/shrink coefficients (1, 2, 0.5, 0.5).
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 const std::vector<double>& x0,
                                 const std::vector<double>& initial_step,
                                 const SimplexOptions& opts = {}) {
    const size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    for (size_t i = 0; i < n; ++i) pts[i + 1][i] += initial_step[i];

    std::vector<double> fv(n + 1);
    for (size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

    SimplexResult res;
    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        std::vector<size_t> order(n + 1);
        std::iota(order.begin(), order.end(), size_t{0});
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return fv[a] < fv[b]; });

        size_t best = order[0], worst = order[n], second = order[n - 1];

        double diameter = 0.0;
        for (size_t i = 1; i <= n; ++i)
            for (size_t d = 0; d < n; ++d)
                diameter = std::max(diameter, std::abs(pts[order[i]][d] - pts[best][d]));
        double spread = std::abs(fv[worst] - fv[best]);
        if (diameter <= opts.x_tolerance || (opts.f_tolerance > 0.0 && spread <= opts.f_tolerance)) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (size_t d = 0; d < n; ++d) centroid[d] += pts[i][d] / double(n);
        }

        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (size_t d = 0; d < n; ++d) p[d] = centroid[d] + coef * (pts[worst][d] - centroid[d]);
            return p;
        };

        std::vector<double> reflected = blend(-1.0);
        double fr = f(reflected);
        if (fr < fv[best]) {
            std::vector<double> expanded = blend(-2.0);
            double fe = f(expanded);
            if (fe < fr) { pts[worst] = std::move(expanded); fv[worst] = fe; }
            else { pts[worst] = std::move(reflected); fv[worst] = fr; }
        } else if (fr < fv[second]) {
            pts[worst] = std::move(reflected);
            fv[worst] = fr;
        } else {
            std::vector<double> contracted = blend(fr < fv[worst] ? -0.5 : 0.5);
            double fc = f(contracted);
            if (fc < std::min(fr, fv[worst])) {
                pts[worst] = std::move(contracted);
                fv[worst] = fc;
            } else {
                for (size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (size_t d = 0; d < n; ++d)
                        pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
                    fv[i] = f(pts[i]);
                }
            }
        }
    }

    size_t best = 0;
    for (size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    res.x = pts[best];
    res.fmin = fv[best];
    res.iterations = iter;
    return res;
}

}  // namespace zefoz

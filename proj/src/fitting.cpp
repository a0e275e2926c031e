#include "zefoz/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "zefoz/nelder_mead.hpp"

namespace zefoz {
namespace {

// Solves the 3x3 system M x = b by Gaussian elimination with partial
// pivoting. Throws if the matrix is numerically singular.
std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> b) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 3; ++row) {
            if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
        }
        if (std::abs(m[pivot][col]) < 1e-300) {
            throw std::runtime_error("singular normal equations in fit");
        }
        std::swap(m[col], m[pivot]);
        std::swap(b[col], b[pivot]);
        for (int row = col + 1; row < 3; ++row) {
            const double f = m[row][col] / m[col][col];
            for (int k = col; k < 3; ++k) m[row][k] -= f * m[col][k];
            b[row] -= f * b[col];
        }
    }
    std::array<double, 3> x{};
    for (int row = 2; row >= 0; --row) {
        double sum = b[row];
        for (int k = row + 1; k < 3; ++k) sum -= m[row][k] * x[k];
        x[row] = sum / m[row][row];
    }
    return x;
}

Cov3 invert3(const Cov3& m) {
    Cov3 inv{};
    for (int col = 0; col < 3; ++col) {
        std::array<double, 3> e{};
        e[col] = 1.0;
        const auto x = solve3(m, e);
        for (int row = 0; row < 3; ++row) inv[row][col] = x[row];
    }
    return inv;
}

struct LmProblem {
    // Fills weighted residuals and the weighted Jacobian (row-major, n x 3)
    // at the given parameters. Returns false if the parameters are outside
    // the feasible region.
    std::function<bool(const std::array<double, 3>&, std::vector<double>&,
                       std::vector<std::array<double, 3>>&)>
        evaluate;
    int max_iterations = 400;
    double step_tolerance = 1e-13;
};

struct LmOutcome {
    std::array<double, 3> params{};
    Cov3 covariance{};
    double chi2 = 0.0;
    int iterations = 0;
    bool converged = false;
    std::size_t point_count = 0;
};

double sum_squares(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

LmOutcome levenberg_marquardt(const LmProblem& problem, std::array<double, 3> p) {
    std::vector<double> residuals;
    std::vector<std::array<double, 3>> jacobian;
    if (!problem.evaluate(p, residuals, jacobian)) {
        throw std::invalid_argument("infeasible initial guess for fit");
    }
    LmOutcome out;
    out.point_count = residuals.size();
    double chi2 = sum_squares(residuals);
    const double chi2_floor = 1e-22 * (chi2 + 1e-300);
    double lambda = 1e-3;

    std::vector<double> trial_r;
    std::vector<std::array<double, 3>> trial_j;
    for (int iter = 0; iter < problem.max_iterations; ++iter) {
        out.iterations = iter + 1;
        Cov3 jtj{};
        std::array<double, 3> jtr{};
        for (std::size_t i = 0; i < residuals.size(); ++i) {
            for (int a = 0; a < 3; ++a) {
                jtr[a] += jacobian[i][a] * residuals[i];
                for (int b = 0; b < 3; ++b) jtj[a][b] += jacobian[i][a] * jacobian[i][b];
            }
        }

        bool accepted = false;
        for (int attempt = 0; attempt < 40 && !accepted; ++attempt) {
            Cov3 damped = jtj;
            for (int a = 0; a < 3; ++a) {
                damped[a][a] += lambda * std::max(jtj[a][a], 1e-300);
            }
            std::array<double, 3> step{};
            try {
                step = solve3(damped, {-jtr[0], -jtr[1], -jtr[2]});
            } catch (const std::runtime_error&) {
                lambda *= 10.0;
                continue;
            }
            const std::array<double, 3> trial{p[0] + step[0], p[1] + step[1], p[2] + step[2]};
            if (problem.evaluate(trial, trial_r, trial_j)) {
                const double trial_chi2 = sum_squares(trial_r);
                if (trial_chi2 <= chi2) {
                    double step_scale = 0.0;
                    for (int a = 0; a < 3; ++a) {
                        step_scale = std::max(
                            step_scale, std::abs(step[a]) / std::max(std::abs(trial[a]), 1e-300));
                    }
                    p = trial;
                    residuals = trial_r;
                    jacobian = trial_j;
                    const double improvement = chi2 - trial_chi2;
                    chi2 = trial_chi2;
                    lambda = std::max(lambda * 0.3, 1e-12);
                    accepted = true;
                    if (step_scale < problem.step_tolerance ||
                        improvement <= 1e-14 * (chi2 + 1e-300) || chi2 <= chi2_floor) {
                        out.converged = true;
                    }
                    break;
                }
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            // No downhill step found at any damping: treat the current
            // point as a (possibly rough) optimum.
            out.converged = true;
        }
        if (out.converged) break;
    }

    // Covariance of the parameters, scaled by the reduced chi-square so
    // that unweighted fits still report a meaningful spread.
    Cov3 jtj{};
    for (const auto& row : jacobian) {
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) jtj[a][b] += row[a] * row[b];
        }
    }
    const double dof = static_cast<double>(residuals.size()) - 3.0;
    const double scale = dof > 0.0 ? chi2 / dof : 1.0;
    try {
        out.covariance = invert3(jtj);
        for (auto& row : out.covariance) {
            for (double& v : row) v *= scale;
        }
    } catch (const std::runtime_error&) {
        for (auto& row : out.covariance) row.fill(std::numeric_limits<double>::quiet_NaN());
    }
    out.params = p;
    out.chi2 = chi2;
    return out;
}

}  // namespace

void DecayCurve::validate() const {
    if (tau_s.size() != amplitude.size()) {
        throw std::invalid_argument("decay curve: tau and amplitude sizes differ");
    }
    if (!sigma.empty() && sigma.size() != tau_s.size()) {
        throw std::invalid_argument("decay curve: sigma size mismatch");
    }
    if (tau_s.size() < 5) {
        throw std::invalid_argument("decay curve: need at least 5 points");
    }
    for (std::size_t i = 0; i < tau_s.size(); ++i) {
        if (!std::isfinite(tau_s[i]) || !std::isfinite(amplitude[i]) || tau_s[i] < 0.0) {
            throw std::invalid_argument("decay curve: non-finite or negative entries");
        }
        if (i > 0 && tau_s[i] <= tau_s[i - 1]) {
            throw std::invalid_argument("decay curve: tau must be strictly increasing");
        }
        if (!sigma.empty() && !(sigma[i] > 0.0)) {
            throw std::invalid_argument("decay curve: sigma must be positive");
        }
    }
    const auto [lo, hi] = std::minmax_element(amplitude.begin(), amplitude.end());
    if (*hi - *lo <= 0.0) {
        throw std::invalid_argument("decay curve: amplitudes are constant");
    }
}

double stretched_exp_model(double tau_s, double e0, double t2_s, double m) {
    return e0 * std::exp(-std::pow(2.0 * tau_s / t2_s, m));
}

std::array<double, 3> stretched_exp_partials(double tau_s, double e0, double t2_s, double m) {
    const double x = 2.0 * tau_s / t2_s;
    if (x <= 0.0) {
        // tau = 0: the model is exactly E0 and only dE/dE0 survives (the
        // m-derivative involves ln x and vanishes in the limit for m > 0).
        return {1.0, 0.0, 0.0};
    }
    const double xm = std::pow(x, m);
    const double f = e0 * std::exp(-xm);
    return {f / e0, f * m * xm / t2_s, -f * xm * std::log(x)};
}

double t2_field_model(double b_tesla, double t2_zero_s, double kappa_hz_per_t, double b0_tesla) {
    const double pi = 3.14159265358979323846;
    return 1.0 / (1.0 / t2_zero_s + pi * kappa_hz_per_t * std::abs(b_tesla - b0_tesla));
}

std::array<double, 3> t2_field_partials(double b_tesla, double t2_zero_s, double kappa_hz_per_t,
                                        double b0_tesla) {
    const double pi = 3.14159265358979323846;
    const double d = b_tesla - b0_tesla;
    const double t2 = t2_field_model(b_tesla, t2_zero_s, kappa_hz_per_t, b0_tesla);
    const double t2sq = t2 * t2;
    const double sign = d >= 0.0 ? 1.0 : -1.0;
    return {t2sq / (t2_zero_s * t2_zero_s), -t2sq * pi * std::abs(d),
            t2sq * pi * kappa_hz_per_t * sign};
}

StretchedExpFit fit_stretched_exponential(const DecayCurve& curve,
                                          std::optional<StretchedExpGuess> guess) {
    curve.validate();
    const std::size_t n = curve.tau_s.size();

    StretchedExpGuess g{};
    if (guess) {
        g = *guess;
    } else {
        g.e0 = curve.amplitude.front();
        if (!(g.e0 > 0.0)) {
            g.e0 = *std::max_element(curve.amplitude.begin(), curve.amplitude.end());
        }
        // T2 guess: the model crosses E0/e where 2 tau = T2.
        const double target = g.e0 / std::exp(1.0);
        double tau_e = curve.tau_s.back();
        for (std::size_t i = 0; i < n; ++i) {
            if (curve.amplitude[i] <= target) {
                tau_e = curve.tau_s[i];
                break;
            }
        }
        g.t2_s = 2.0 * tau_e;
        g.mims_m = 1.0;
    }
    if (!(g.e0 > 0.0) || !(g.t2_s > 0.0) || !(g.mims_m > 0.0)) {
        throw std::invalid_argument("stretched-exponential fit: bad initial guess");
    }

    LmProblem problem;
    problem.evaluate = [&curve, n](const std::array<double, 3>& p, std::vector<double>& r,
                                   std::vector<std::array<double, 3>>& j) {
        const double e0 = p[0], t2 = p[1], m = p[2];
        if (!(e0 > 0.0) || !(t2 > 0.0) || m < 0.05 || m > 10.0) return false;
        r.resize(n);
        j.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double w = curve.sigma.empty() ? 1.0 : 1.0 / curve.sigma[i];
            r[i] = w * (stretched_exp_model(curve.tau_s[i], e0, t2, m) - curve.amplitude[i]);
            auto dp = stretched_exp_partials(curve.tau_s[i], e0, t2, m);
            for (auto& v : dp) v *= w;
            j[i] = dp;
        }
        return true;
    };

    const auto out = levenberg_marquardt(problem, {g.e0, g.t2_s, g.mims_m});
    StretchedExpFit fit;
    fit.e0 = out.params[0];
    fit.t2_s = out.params[1];
    fit.mims_m = out.params[2];
    fit.covariance = out.covariance;
    fit.residual_norm = std::sqrt(out.chi2);
    fit.iterations = out.iterations;
    fit.converged = out.converged;
    return fit;
}

T2FieldFit fit_t2_vs_field(const std::vector<T2FieldPoint>& points) {
    if (points.size() < 4) {
        throw std::invalid_argument("t2-vs-field fit: need at least 4 points");
    }
    for (const auto& p : points) {
        if (!std::isfinite(p.b_tesla) || !(p.t2_s > 0.0) || p.sigma_s < 0.0) {
            throw std::invalid_argument("t2-vs-field fit: invalid point");
        }
    }
    const std::size_t n = points.size();

    // Initial guesses from the data shape: the peak of T2(B) sits at B0.
    std::size_t peak = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (points[i].t2_s > points[peak].t2_s) peak = i;
    }
    double b0 = points[peak].b_tesla;
    const double t2_zero = points[peak].t2_s;

    // Release B0 only if points exist strictly on both sides of the peak.
    bool left = false, right = false;
    for (const auto& p : points) {
        if (p.b_tesla < b0) left = true;
        if (p.b_tesla > b0) right = true;
    }
    const bool b0_free = left && right;
    if (!b0_free) b0 = 0.0;

    // Slope guess from the point farthest from B0.
    std::size_t far = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(points[i].b_tesla - b0) > std::abs(points[far].b_tesla - b0)) far = i;
    }
    const double pi = 3.14159265358979323846;
    double kappa = (1.0 / points[far].t2_s - 1.0 / t2_zero) /
                   (pi * std::max(std::abs(points[far].b_tesla - b0), 1e-12));
    kappa = std::max(kappa, 1e-6);

    const auto evaluate = [&points, n, b0_free, b0](const std::array<double, 3>& p,
                                                    std::vector<double>& r,
                                                    std::vector<std::array<double, 3>>& j) {
        const double t20 = p[0], kap = p[1];
        const double b0p = b0_free ? p[2] : b0;
        if (!(t20 > 0.0) || !(kap > 0.0)) return false;
        r.resize(n);
        j.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double w = points[i].sigma_s > 0.0 ? 1.0 / points[i].sigma_s : 1.0;
            r[i] = w * (t2_field_model(points[i].b_tesla, t20, kap, b0p) - points[i].t2_s);
            auto dp = t2_field_partials(points[i].b_tesla, t20, kap, b0p);
            for (auto& v : dp) v *= w;
            if (!b0_free) dp[2] = 0.0;
            j[i] = dp;
        }
        return true;
    };

    LmProblem problem;
    problem.evaluate = evaluate;
    auto out = levenberg_marquardt(problem, {t2_zero, kappa, b0});

    if (b0_free) {
        // Derivative-free polish for the |B - B0| kink, in scaled
        // coordinates so the result is unit independent.
        const std::array<double, 3> scale{std::max(out.params[0], 1e-12),
                                          std::max(out.params[1], 1e-12),
                                          std::max(std::abs(out.params[2]), 1e-9)};
        std::vector<double> r;
        std::vector<std::array<double, 3>> j;
        const auto objective = [&](const std::vector<double>& u) {
            const std::array<double, 3> p{u[0] * scale[0], u[1] * scale[1], u[2] * scale[2]};
            if (!evaluate(p, r, j)) return 1e30;
            double s = 0.0;
            for (double v : r) s += v * v;
            return s;
        };
        const std::vector<double> u0{out.params[0] / scale[0], out.params[1] / scale[1],
                                     out.params[2] / scale[2]};
        SimplexOptions opts;
        opts.max_iterations = 4000;
        opts.x_tolerance = 1e-12;
        const std::vector<double> steps{0.05, 0.05, 0.05};
        const auto polished = nelder_mead(objective, u0, steps, opts);
        if (polished.fmin <= out.chi2) {
            out.params = std::array<double, 3>{polished.x[0] * scale[0], polished.x[1] * scale[1],
                                               polished.x[2] * scale[2]};
            out.chi2 = polished.fmin;
            out.iterations += polished.iterations;
            // Recompute the covariance at the polished optimum.
            evaluate(out.params, r, j);
            Cov3 jtj{};
            for (const auto& row : j) {
                for (int a = 0; a < 3; ++a) {
                    for (int b = 0; b < 3; ++b) jtj[a][b] += row[a] * row[b];
                }
            }
            const double dof = static_cast<double>(n) - 3.0;
            try {
                out.covariance = invert3(jtj);
                const double cscale = dof > 0.0 ? out.chi2 / dof : 1.0;
                for (auto& row : out.covariance) {
                    for (double& v : row) v *= cscale;
                }
            } catch (const std::runtime_error&) {
                for (auto& row : out.covariance) {
                    row.fill(std::numeric_limits<double>::quiet_NaN());
                }
            }
        }
    }

    T2FieldFit fit;
    fit.t2_zero_s = out.params[0];
    fit.kappa_hz_per_t = out.params[1];
    fit.b0_tesla = b0_free ? out.params[2] : b0;
    fit.covariance = out.covariance;
    fit.residual_norm = std::sqrt(out.chi2);
    fit.iterations = out.iterations;
    fit.converged = out.converged;
    fit.b0_fixed = !b0_free;
    return fit;
}

double resonator_q(double f0_hz, double fwhm_hz) {
    if (!(f0_hz > 0.0) || !(fwhm_hz > 0.0)) {
        throw std::invalid_argument("resonator_q: frequencies must be positive");
    }
    return f0_hz / fwhm_hz;
}

}  // namespace zefoz

#pragma once

#include <array>
#include <optional>
#include <vector>

namespace zefoz {

/// Sampled echo-decay curve; tau strictly increasing, at least 5 points for
/// fitting. `sigma` may be empty (unweighted) or per-point.
struct DecayCurve {
    std::vector<double> tau_s;
    std::vector<double> amplitude;
    std::vector<double> sigma;

    void validate() const;
};

using Cov3 = std::array<std::array<double, 3>, 3>;

struct StretchedExpFit {
    double e0 = 0.0;
    double t2_s = 0.0;
    double mims_m = 0.0;
    Cov3 covariance{};           // order (E0, T2, m)
    double residual_norm = 0.0;  // sqrt(chi^2)
    int iterations = 0;
    bool converged = false;
};

struct T2FieldPoint {
    double b_tesla = 0.0;
    double t2_s = 0.0;
    double sigma_s = 0.0;  // 0 means unweighted
};

struct T2FieldFit {
    double t2_zero_s = 0.0;
    double kappa_hz_per_t = 0.0;
    double b0_tesla = 0.0;
    Cov3 covariance{};           // order (T2(0), kappa, B0)
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    bool b0_fixed = false;       // set when the data spans one side only
};

struct StretchedExpGuess {
    double e0;
    double t2_s;
    double mims_m;
};

/// E(tau) = E0 exp(-(2 tau / T2)^m) and its partial derivatives.
double stretched_exp_model(double tau_s, double e0, double t2_s, double m);
std::array<double, 3> stretched_exp_partials(double tau_s, double e0, double t2_s, double m);

/// T2(B) = 1/(1/T2(0) + pi kappa |B - B0|) and its partials (subgradient
/// sign convention at the kink).
double t2_field_model(double b_tesla, double t2_zero_s, double kappa_hz_per_t, double b0_tesla);
std::array<double, 3> t2_field_partials(double b_tesla, double t2_zero_s, double kappa_hz_per_t,
                                        double b0_tesla);

/// Weighted least squares over (E0, T2, m); Levenberg-Marquardt with
/// analytic Jacobians. Throws on degenerate input; non-convergence is
/// reported on the result.
StretchedExpFit fit_stretched_exponential(const DecayCurve& curve,
                                          std::optional<StretchedExpGuess> guess = std::nullopt);

/// Fits the empirical coherence-time law. B0 is released only when the data
/// spans both sides of the kink; the non-smooth point is handled by a
/// derivative-free polish after the damped Gauss-Newton stage.
T2FieldFit fit_t2_vs_field(const std::vector<T2FieldPoint>& points);

/// Q = f0 / FWHM.
double resonator_q(double f0_hz, double fwhm_hz);

}  // namespace zefoz

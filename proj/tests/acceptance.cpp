// Acceptance harness: one pass/fail line per shipped criterion, nonzero
// exit when any criterion fails. Uses the library directly plus the
// shipped default configuration for the host-nucleus bath.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "zefoz/config.hpp"
#include "zefoz/dynamics.hpp"
#include "zefoz/eseem.hpp"
#include "zefoz/fitting.hpp"
#include "zefoz/units.hpp"
#include "zefoz/zeeman.hpp"

using namespace zefoz;

namespace {

using Clock = std::chrono::steady_clock;

int g_failures = 0;

void report(int index, const std::string& name, bool ok, double seconds, double budget_s,
            const std::string& detail) {
    const bool timed_ok = seconds < budget_s;
    if (!ok || !timed_ok) ++g_failures;
    std::printf("[%s] criterion %d: %s (%.2f s%s) %s\n", (ok && timed_ok) ? "PASS" : "FAIL", index,
                name.c_str(), seconds, timed_ok ? "" : ", over budget", detail.c_str());
}

struct Timer {
    Clock::time_point start = Clock::now();
    double seconds() const {
        return std::chrono::duration<double>(Clock::now() - start).count();
    }
};

const std::vector<std::pair<int, int>> kAllPairs{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
constexpr std::pair<int, int> kClockPair{1, 3};

// Estimates a revival time as the midpoint of the two deep envelope dips
// flanking it; the dips sit roughly half a period on either side.
double revival_estimate(const std::vector<double>& tau, const std::vector<double>& v,
                        double t_mid, double period) {
    double left = -1.0, right = -1.0;
    double left_v = 2.0, right_v = 2.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (tau[i] > t_mid - 0.75 * period && tau[i] < t_mid && v[i] < left_v) {
            left_v = v[i];
            left = tau[i];
        }
        if (tau[i] > t_mid && tau[i] < t_mid + 0.75 * period && v[i] < right_v) {
            right_v = v[i];
            right = tau[i];
        }
    }
    if (left < 0.0 || right < 0.0) return -1.0;
    return 0.5 * (left + right);
}

}  // namespace

int main() {
    RunConfig config;
    try {
        config = load_config(ZEFOZ_DEFAULT_CONFIG);
    } catch (const std::exception& e) {
        std::printf("[FAIL] cannot load default configuration: %s\n", e.what());
        return 1;
    }
    const SpinSystem& sys = config.system;

    // 1. Zero-field transition ladder.
    {
        Timer timer;
        const TransitionTable table =
            transition_table(diagonalize(build_hamiltonian(sys, Level::ground, {})), sys,
                             Level::ground, {});
        const double expected[] = {528e6, 655e6, 1841e6, 2496.55e6, 3024.55e6};
        bool ok = table.size() == 6;
        for (double f : expected) {
            bool found = false;
            for (const Transition& t : table) {
                if (std::abs(t.frequency_hz - f) <= 1e6) found = true;
            }
            ok = ok && found;
        }
        // Telescoping consistency of the ladder.
        auto freq = [&](int k, int l) {
            for (const Transition& t : table) {
                if (t.lower == k && t.upper == l) return t.frequency_hz;
            }
            return -1.0;
        };
        ok = ok && std::abs(freq(0, 1) + freq(1, 2) + freq(2, 3) - freq(0, 3)) <= 1.0;
        char detail[128];
        std::snprintf(detail, sizeof detail, "f(2,4) = %.2f MHz", freq(1, 3) / 1e6);
        report(1, "zero-field transition ladder", ok, timer.seconds(), 1.0, detail);
    }

    // 2. Zero gradient at zero field; randomized search convergence.
    {
        Timer timer;
        const double scale = 1e-6 * kBohrMagnetonHzPerT * 6.53;
        bool ok = true;
        for (const auto& pair : kAllPairs) {
            const S1Result s1 = s1_transition_gradient(sys, Level::ground, pair, {});
            ok = ok && s1.norm_hz_per_t < scale;
        }
        std::mt19937_64 rng(2026);
        std::uniform_real_distribution<double> uni(-500e-6, 500e-6);
        ZefozResult best;
        best.s1_norm_hz_per_t = 1e30;
        best.field = FieldVector{1.0, 1.0, 1.0};
        for (int s = 0; s < 10; ++s) {
            const FieldVector init{uni(rng), uni(rng), uni(rng)};
            const ZefozResult r = zefoz_search(sys, Level::ground, kClockPair, init, 500e-6);
            if (r.converged && r.s1_norm_hz_per_t < best.s1_norm_hz_per_t) best = r;
        }
        ok = ok && best.field.magnitude() < 0.1e-6;
        char detail[128];
        std::snprintf(detail, sizeof detail, "search minimum |B| = %.3g uT",
                      best.field.magnitude() * 1e6);
        report(2, "zero-gradient point and randomized search", ok, timer.seconds(), 10.0, detail);
    }

    // 3. Analytic gradients against finite differences.
    {
        Timer timer;
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        bool ok = true;
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            Vec3 dir{uni(rng), uni(rng), uni(rng)};
            const double len = norm(dir);
            if (len < 1e-3) continue;
            const double mag = 1e-3 * (0.1 + 0.9 * std::abs(uni(rng)));
            const FieldVector field{dir[0] / len * mag, dir[1] / len * mag, dir[2] / len * mag};
            for (int level = 0; level < 4; ++level) {
                const LevelGradient g = level_gradient(sys, Level::ground, level, field);
                const double ref = std::max(norm(g.gradient_fd_hz_per_t), 1.0);
                const double diff = norm(g.gradient_hz_per_t - g.gradient_fd_hz_per_t) / ref;
                worst = std::max(worst, diff);
                ok = ok && diff <= 1e-6;
            }
        }
        char detail[128];
        std::snprintf(detail, sizeof detail, "worst relative deviation %.2e", worst);
        report(3, "gradient law against finite differences", ok, timer.seconds(), 30.0, detail);
    }

    // 4. In-plane angle of the gradient minimum.
    {
        Timer timer;
        const double angle = s1_minimum_angle(sys, Level::ground, kClockPair, Axis::d1, Axis::d2,
                                              200e-6) * 180.0 / kPi;
        const bool ok = std::abs(angle - 55.9) <= 0.5;
        char detail[128];
        std::snprintf(detail, sizeof detail, "minimum at %.2f deg", angle);
        report(4, "angle of minimum in-plane gradient", ok, timer.seconds(), 30.0, detail);
    }

    // 5. Envelope revivals at the host Larmor period; quenched modulation
    //    on the minimum-gradient line.
    {
        Timer timer;
        const FieldVector field{-248e-6, -65e-6, 0.0};
        const std::vector<double> tau = config.eseem->tau.grid();
        const Vec3 moment = transition_moment_difference(sys, Level::ground, kClockPair, field);
        const EseemEnvelope env = two_pulse_envelope(config.nuclei, field, moment, tau);
        const double period = larmor_period(field.magnitude(), sys.gamma_host_hz_per_t);

        bool ok = true;
        double worst = 0.0;
        for (int n = 1; n <= 3; ++n) {
            const double est = revival_estimate(env.tau_s, env.values, n * period, period);
            const double err = est > 0.0 ? std::abs(est - n * period) / (n * period) : 1.0;
            worst = std::max(worst, err);
            ok = ok && err <= 0.01;
        }

        // 200 uT along the in-plane minimum-gradient direction.
        const double angle = s1_minimum_angle(sys, Level::ground, kClockPair, Axis::d1, Axis::d2,
                                              200e-6);
        const FieldVector quiet{200e-6 * std::cos(angle), 200e-6 * std::sin(angle), 0.0};
        const Vec3 m2 = transition_moment_difference(sys, Level::ground, kClockPair, quiet);
        const EseemEnvelope quiet_env = two_pulse_envelope(config.nuclei, quiet, m2, tau);
        double depth = 0.0;
        for (double v : quiet_env.values) depth = std::max(depth, 1.0 - v);
        ok = ok && depth < 0.01;

        char detail[128];
        std::snprintf(detail, sizeof detail,
                      "worst revival error %.2f%%, quiet-line depth %.3f%%", worst * 100.0,
                      depth * 100.0);
        report(5, "envelope revivals and quenching", ok, timer.seconds(), 30.0, detail);
    }

    // 6. Fit recovery on synthetic noisy data.
    {
        Timer timer;
        std::mt19937_64 rng(99);
        std::normal_distribution<double> gauss(0.0, 1.0);
        int decay_ok = 0;
        for (int trial = 0; trial < 100; ++trial) {
            DecayCurve curve;
            for (int i = 1; i <= 80; ++i) {
                const double t = 30e-3 * i / 80.0;
                curve.tau_s.push_back(t);
                curve.amplitude.push_back(stretched_exp_model(t, 1.0, 10.3e-3, 1.3) +
                                          0.02 * gauss(rng));
                curve.sigma.push_back(0.02);
            }
            const StretchedExpFit fit = fit_stretched_exponential(curve);
            if (fit.converged && std::abs(fit.t2_s - 10.3e-3) <= 0.05 * 10.3e-3 &&
                std::abs(fit.mims_m - 1.3) <= 0.10 * 1.3) {
                ++decay_ok;
            }
        }

        int law_ok = 0;
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<T2FieldPoint> pts;
            for (int i = -15; i <= 15; ++i) {
                const double b = 20e-6 * i;
                const double t2 = t2_field_model(b, 10.3e-3, 1.48e6, 14.1e-6);
                pts.push_back({b, t2 * (1.0 + 0.05 * gauss(rng)), 0.05 * t2});
            }
            const T2FieldFit fit = fit_t2_vs_field(pts);
            if (fit.converged && std::abs(fit.t2_zero_s - 10.3e-3) <= 0.10 * 10.3e-3 &&
                std::abs(fit.kappa_hz_per_t - 1.48e6) <= 0.10 * 1.48e6 &&
                std::abs(fit.b0_tesla - 14.1e-6) <= 0.10 * 14.1e-6) {
                ++law_ok;
            }
        }
        const bool ok = decay_ok >= 95 && law_ok >= 90;
        char detail[128];
        std::snprintf(detail, sizeof detail, "decay fits %d/100, field-law fits %d/100", decay_ok,
                      law_ok);
        report(6, "fit parameter recovery under noise", ok, timer.seconds(), 60.0, detail);
    }

    // 7. Driven-oscillation timing and broadening-induced contrast loss.
    {
        Timer timer;
        const double omega = 2.0 * kPi * 560e3;
        std::vector<double> t(8001);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = 2e-6 * i / (t.size() - 1);
        const RabiTrace sharp = rabi_trace(omega, 0.0, t);
        double t_peak = -1.0;
        for (std::size_t i = 1; i + 1 < t.size(); ++i) {
            if (sharp.population[i] > sharp.population[i - 1] &&
                sharp.population[i] >= sharp.population[i + 1]) {
                // Parabolic refinement around the sampled maximum.
                const double ym = sharp.population[i - 1], y0 = sharp.population[i],
                             yp = sharp.population[i + 1];
                const double denom = ym - 2.0 * y0 + yp;
                const double shift = denom != 0.0 ? 0.5 * (ym - yp) / denom : 0.0;
                t_peak = t[i] + shift * (t[1] - t[0]);
                break;
            }
        }
        bool ok = t_peak > 0.0 && std::abs(t_peak - kPi / omega) <= 1e-3 * (kPi / omega);

        const double period = 1.0 / 560e3;
        std::vector<double> t5;
        for (int i = 0; i <= 400; ++i) t5.push_back(4.0 * period + period * i / 400.0);
        const RabiTrace broad = rabi_trace(omega, 680e3, t5);
        double lo = 1.0, hi = 0.0;
        for (double p : broad.population) {
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        ok = ok && (hi - lo) < 0.2;
        char detail[128];
        std::snprintf(detail, sizeof detail,
                      "first peak %.4f us (target %.4f us), fifth-period contrast %.3f",
                      t_peak * 1e6, kPi / omega * 1e6, hi - lo);
        report(7, "oscillation timing and contrast decay", ok, timer.seconds(), 30.0, detail);
    }

    // 8. Structural checks on the decay map: determinism, revival ridge
    //    tracking the Larmor period, and dominance of the quietest column.
    {
        Timer timer;
        EchoModel model;
        model.system = sys;
        model.pair = kClockPair;
        model.nuclei = config.nuclei;
        model.t2_zero_s = config.model.t2_zero_s;
        model.kappa_hz_per_t = config.model.kappa_hz_per_t;
        model.mims_m = config.model.mims_m;

        std::vector<double> sweep, tau;
        for (int i = 0; i < 16; ++i) sweep.push_back(-300e-6 + 150e-6 * i / 15.0);
        for (int i = 0; i <= 2400; ++i) tau.push_back(4e-3 * i / 2400.0);
        const EchoMap a = echo_map(model, Axis::d1, sweep, Axis::d2, -65e-6, tau);
        const EchoMap b = echo_map(model, Axis::d1, sweep, Axis::d2, -65e-6, tau);
        bool ok = a.amplitude == b.amplitude;

        // Per-row first-revival estimate vs the Larmor period of the total
        // field: regression through the origin with slope within 1% of one.
        double num = 0.0, den = 0.0;
        int rows_used = 0;
        for (std::size_t i = 0; i < sweep.size(); ++i) {
            const double bmag = std::hypot(sweep[i], 65e-6);
            const double period = larmor_period(bmag, sys.gamma_host_hz_per_t);
            if (period > tau.back() / 1.75) continue;
            const double t2 =
                t2_of_field(model.t2_zero_s, model.kappa_hz_per_t, model.b0_tesla, bmag);
            std::vector<double> env(tau.size());
            for (std::size_t j = 0; j < tau.size(); ++j) {
                const double decay =
                    model.e0 * std::exp(-std::pow(2.0 * tau[j] / t2, model.mims_m));
                env[j] = decay > 0.0 ? a.at(i, j) / decay : 1.0;
            }
            const double est = revival_estimate(tau, env, period, period);
            if (est < 0.0) continue;
            num += est * period;
            den += period * period;
            ++rows_used;
        }
        const double slope = den > 0.0 ? num / den : 0.0;
        ok = ok && rows_used >= 8 && std::abs(slope - 1.0) <= 0.01;

        // The column whose total field is smallest decays slowest and so
        // carries the largest integrated amplitude.
        std::size_t best_area = 0, quietest = 0;
        double area_max = -1.0, field_min = 1e9;
        for (std::size_t i = 0; i < sweep.size(); ++i) {
            double area = 0.0;
            for (std::size_t j = 0; j < tau.size(); ++j) area += a.at(i, j);
            if (area > area_max) {
                area_max = area;
                best_area = i;
            }
            const double bmag = std::hypot(sweep[i], 65e-6);
            if (bmag < field_min) {
                field_min = bmag;
                quietest = i;
            }
        }
        ok = ok && best_area == quietest;

        char detail[128];
        std::snprintf(detail, sizeof detail, "ridge slope %.4f over %d rows", slope, rows_used);
        report(8, "decay-map structure", ok, timer.seconds(), 120.0, detail);
    }

    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria failed\n", g_failures);
    return 1;
}

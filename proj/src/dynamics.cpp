#include "zefoz/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zefoz {

std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("quadrature needs at least one node");

    // Golub-Welsch: the nodes are the eigenvalues of the symmetric
    // tridiagonal Jacobi matrix (zero diagonal, off-diagonals sqrt(k/2))
    // and the weights are sqrt(pi) times the squared first components of
    // the eigenvectors. Implicit-shift QL, accumulating only the first row
    // of the eigenvector matrix; stable for any practical node count.
    std::vector<double> d(n, 0.0), e(n, 0.0), z(n, 0.0);
    for (int k = 1; k < n; ++k) e[k - 1] = std::sqrt(0.5 * k);
    z[0] = 1.0;

    for (int l = 0; l < n; ++l) {
        for (int iter = 0; iter < 50; ++iter) {
            int m = l;
            for (; m < n - 1; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-16 * dd) break;
            }
            if (m == l) break;

            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            for (int i = m - 1; i >= l; --i) {
                double f = s * e[i];
                double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                double zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });

    std::vector<double> nodes(n), weights(n);
    const double sqrt_pi = std::sqrt(kPi);
    for (int i = 0; i < n; ++i) {
        nodes[i] = d[order[i]];
        weights[i] = sqrt_pi * z[order[i]] * z[order[i]];
    }
    // Enforce the exact even symmetry of the rule.
    for (int i = 0; i < n / 2; ++i) {
        double x = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        double w = 0.5 * (weights[i] + weights[n - 1 - i]);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) nodes[n / 2] = 0.0;
    return {nodes, weights};
}

RabiTrace rabi_trace(double omega_rad_per_s, double sigma_hz, const std::vector<double>& time_s,
                     int quadrature_nodes) {
    if (!(omega_rad_per_s > 0.0)) throw std::invalid_argument("Rabi frequency must be positive");
    if (sigma_hz < 0.0) throw std::invalid_argument("detuning spread must be non-negative");
    if (time_s.empty()) throw std::invalid_argument("empty time grid");
    for (double t : time_s)
        if (!(t >= 0.0)) throw std::invalid_argument("time grid must be non-negative");
    if (quadrature_nodes < 64) quadrature_nodes = 64;

    RabiTrace trace;
    trace.time_s = time_s;
    trace.omega_rad_per_s = omega_rad_per_s;
    trace.sigma_hz = sigma_hz;
    trace.population.assign(time_s.size(), 0.0);

    if (sigma_hz == 0.0) {
        for (size_t i = 0; i < time_s.size(); ++i) {
            double s = std::sin(0.5 * omega_rad_per_s * time_s[i]);
            trace.population[i] = s * s;
        }
        return trace;
    }

    auto [nodes, weights] = gauss_hermite(quadrature_nodes);
    double sigma_rad = 2.0 * kPi * sigma_hz;
    double inv_sqrt_pi = 1.0 / std::sqrt(kPi);
    double o2 = omega_rad_per_s * omega_rad_per_s;

    for (size_t i = 0; i < time_s.size(); ++i) {
        double acc = 0.0;
        for (int q = 0; q < quadrature_nodes; ++q) {
            double detuning = std::sqrt(2.0) * sigma_rad * nodes[q];
            double eff2 = o2 + detuning * detuning;
            double s = std::sin(0.5 * std::sqrt(eff2) * time_s[i]);
            acc += weights[q] * (o2 / eff2) * s * s;
        }
        trace.population[i] = std::clamp(inv_sqrt_pi * acc, 0.0, 1.0);
    }
    return trace;
}

double t2_of_field(double t2_zero_s, double kappa_hz_per_t, double b0_tesla, double b_tesla) {
    if (!(t2_zero_s > 0.0)) throw std::invalid_argument("T2(0) must be positive");
    return 1.0 / (1.0 / t2_zero_s + kPi * kappa_hz_per_t * std::abs(b_tesla - b0_tesla));
}

double echo_amplitude(const EchoModel& model, double tau_s, const FieldVector& field) {
    if (!(tau_s >= 0.0)) throw std::invalid_argument("tau must be non-negative");

    double b = field.magnitude();
    double t2 = t2_of_field(model.t2_zero_s, model.kappa_hz_per_t, model.b0_tesla, b);
    double decay = std::exp(-std::pow(2.0 * tau_s / t2, model.mims_m));

    Vec3 moment = transition_moment_difference(model.system, model.level, model.pair, field);
    EseemEnvelope env = two_pulse_envelope(model.nuclei, field, moment, {tau_s});
    return model.e0 * decay * env.values[0];
}

EchoMap echo_map(const EchoModel& model, Axis swept_axis, const std::vector<double>& sweep_tesla,
                 Axis offset_axis, double offset_tesla, const std::vector<double>& tau_s) {
    if (swept_axis == offset_axis) throw std::invalid_argument("sweep and offset axes must differ");
    if (sweep_tesla.empty() || tau_s.empty()) throw std::invalid_argument("empty sweep or tau grid");

    EchoMap map;
    map.field_tesla = sweep_tesla;
    map.tau_s = tau_s;
    map.amplitude.assign(sweep_tesla.size() * tau_s.size(), 0.0);

    for (size_t i = 0; i < sweep_tesla.size(); ++i) {
        Vec3 b{};
        b[static_cast<int>(swept_axis)] = sweep_tesla[i];
        b[static_cast<int>(offset_axis)] = offset_tesla;
        FieldVector field = FieldVector::from_components(b);

        // Model field magnitude sqrt(offset^2 + B^2) enters both the
        // coherence-time law and the nuclear Larmor frequency via |field|.
        double t2 = t2_of_field(model.t2_zero_s, model.kappa_hz_per_t, model.b0_tesla,
                                field.magnitude());
        Vec3 moment = transition_moment_difference(model.system, model.level, model.pair, field);
        EseemEnvelope env = two_pulse_envelope(model.nuclei, field, moment, tau_s);

        for (size_t j = 0; j < tau_s.size(); ++j) {
            double decay = std::exp(-std::pow(2.0 * tau_s[j] / t2, model.mims_m));
            map.amplitude[i * tau_s.size() + j] = model.e0 * decay * env.values[j];
        }
    }
    return map;
}

}  // namespace zefoz

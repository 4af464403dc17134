#pragma once

// Channel-gain statistics under i.i.d. Rayleigh fading across N_t antennas
// (g ~ Gamma(N_t, 1)), the proactive-dropping probability and its
// closed-form upper bound, and the average transmit power of the
// truncated channel-inversion policy.

#include "urllc/core_model.hpp"

namespace urllc {

/// Gamma(n, 1) density.
double gain_pdf(double g, int n);

/// Gamma(n, 1) CDF, i.e. the regularized lower incomplete gamma P(n, g).
double gain_cdf(double g, int n);

/// Closed-form upper bound on the dropping probability:
///   F = int_0^G (1 - g/G) f_{n-1}(g) dg
///     = (1 - m/G) P(m, G) + e^-G G^(m-1)/(m-1)!,   m = n - 1.
/// For G < m the bracketed form cancels badly and the equivalent positive
/// series e^-G sum_{i>=m} G^i/i! (i+1-m)/(i+1) is summed instead.
double drop_bound_F(double g_th, int n);

/// Dropping probability approximation
///   B = int_0^G [1 - ln(1 + g*gamma/G)/ln(1 + gamma)] f_n(g) dg
/// by adaptive quadrature (absolute error <= 1e-12).
double drop_prob_B(double g_th, double gamma, int n);

struct GainThreshold {
    double g_th = 0.0;
    int antennas = 0;
    double eps_target = 0.0;
};

/// Largest threshold G with drop_bound_F(G, n) <= eps_target.
GainThreshold solve_gain_threshold(int n, double eps_target);

/// Average transmit power of the truncated channel-inversion policy when the
/// threshold is pinned at F = eps_target:
///   N_0 W gamma (1 - eps_target) / (alpha (n - 1)).
double mean_tx_power(double bandwidth, double gamma, double alpha, int n, double eps_target,
                     const SystemConfig& cfg);

}  // namespace urllc

#pragma once

// Finite-blocklength service rate (normal approximation) and the SNR a
// user needs to sustain a target rate at a given decoding error.

#include "urllc/core_model.hpp"

namespace urllc {

/// Upper-tail standard normal probability Q(x) = P(Z > x).
double gaussian_q(double x);

/// Inverse of gaussian_q on (0, 1).
double inv_gaussian_q(double p);

/// V = 1 - 1/(1+snr)^2.
double channel_dispersion(double snr);

/// Packets per frame deliverable with power `tx_power` over `bandwidth` Hz
/// at channel gain `alpha * g` and decoding error `eps_c`. The result is
/// NOT clamped and goes negative when the dispersion penalty dominates.
double achievable_rate(double tx_power, double bandwidth, double alpha, double g, double eps_c,
                       const SystemConfig& cfg);

/// Same, expressed directly in terms of the received SNR.
double achievable_rate_at_snr(double snr, double bandwidth, double eps_c, const SystemConfig& cfg);

struct SnrRequirementCoeffs {
    double l = 0.0;  // [Hz]
    double v = 0.0;  // [Hz^(1/2)]
};

/// Queueing coefficient l (from the effective bandwidth of the user's
/// arrivals) and dispersion coefficient v = Q^-1(eps_c)/sqrt(phi).
SnrRequirementCoeffs snr_coeffs(double eps_c, double eps_q, double lambda, const SystemConfig& cfg,
                                const QosBudget& qos);

/// Coefficients for a known effective bandwidth (packets/frame).
SnrRequirementCoeffs snr_coeffs_from_eb(double effective_bandwidth, double eps_c, const SystemConfig& cfg);

/// Conservative (V = 1) SNR target: exp(l/W + v/sqrt(W)) - 1.
double required_snr(double bandwidth, const SnrRequirementCoeffs& coeffs);

}  // namespace urllc

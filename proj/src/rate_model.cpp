#include "urllc/rate_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "urllc/traffic.hpp"

namespace urllc {

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

namespace {

// Acklam's rational approximation of the lower-tail normal quantile
// (relative error ~1.15e-9 before refinement).
double normal_quantile_seed(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double inv_gaussian_q(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("inv_gaussian_q: p must lie in (0, 1)");
    if (p == 0.5) return 0.0;
    // 1 - p is exact for p >= 0.5, so the upper half reuses the small-p path.
    if (p > 0.5) return -inv_gaussian_q(1.0 - p);

    // Q^-1(p) = Phi^-1(1 - p); seed with the lower-tail quantile of 1 - p
    // computed by symmetry so small p keeps full precision.
    double x = -normal_quantile_seed(p);
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    for (int it = 0; it < 2; ++it) {
        const double density = inv_sqrt_2pi * std::exp(-0.5 * x * x);
        const double u = (gaussian_q(x) - p) / density;
        x += u / (1.0 - 0.5 * x * u);  // Halley step
    }
    return x;
}

double channel_dispersion(double snr) {
    if (!(snr >= 0.0)) throw std::invalid_argument("channel_dispersion: snr must be >= 0");
    if (std::isinf(snr)) return 1.0;
    const double r = 1.0 / (1.0 + snr);
    return 1.0 - r * r;
}

double achievable_rate_at_snr(double snr, double bandwidth, double eps_c, const SystemConfig& cfg) {
    const double blocklength = cfg.dl_fraction * bandwidth;
    const double dispersion = channel_dispersion(snr);
    const double nats = std::log1p(snr) - std::sqrt(dispersion / blocklength) * inv_gaussian_q(eps_c);
    return blocklength / (cfg.packet_bits * std::numbers::ln2) * nats;
}

double achievable_rate(double tx_power, double bandwidth, double alpha, double g, double eps_c,
                       const SystemConfig& cfg) {
    if (!(tx_power >= 0.0 && bandwidth > 0.0 && alpha > 0.0 && g >= 0.0))
        throw std::invalid_argument("achievable_rate: arguments must be positive");
    if (!(eps_c > 0.0 && eps_c <= 0.5)) throw std::invalid_argument("achievable_rate: eps_c must lie in (0, 0.5]");
    const double snr = alpha * tx_power * g / (cfg.noise_psd * bandwidth);
    return achievable_rate_at_snr(snr, bandwidth, eps_c, cfg);
}

SnrRequirementCoeffs snr_coeffs_from_eb(double effective_bandwidth, double eps_c, const SystemConfig& cfg) {
    if (!(eps_c > 0.0 && eps_c < 1.0)) throw std::invalid_argument("snr_coeffs: eps_c must lie in (0, 1)");
    SnrRequirementCoeffs c;
    c.l = effective_bandwidth * cfg.packet_bits * std::numbers::ln2 / cfg.dl_fraction;
    c.v = inv_gaussian_q(eps_c) / std::sqrt(cfg.dl_fraction);
    return c;
}

SnrRequirementCoeffs snr_coeffs(double eps_c, double eps_q, double lambda, const SystemConfig& cfg,
                                const QosBudget& qos) {
    const auto eb = effective_bandwidth(lambda, eps_q, qos.queue_delay_frames);
    return snr_coeffs_from_eb(eb.value, eps_c, cfg);
}

double required_snr(double bandwidth, const SnrRequirementCoeffs& coeffs) {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("required_snr: bandwidth must be > 0");
    if (std::isinf(bandwidth)) return 0.0;
    return std::expm1(coeffs.l / bandwidth + coeffs.v / std::sqrt(bandwidth));
}

}  // namespace urllc

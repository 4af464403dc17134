#include "urllc/fading.hpp"

#include <cmath>
#include <stdexcept>

#include "urllc/quadrature.hpp"

namespace urllc {

namespace {

// e^-g g^i / i!, evaluated in log space.
double poisson_term(double g, int i) {
    if (i == 0) return std::exp(-g);
    return std::exp(i * std::log(g) - g - std::lgamma(i + 1.0));
}

// e^-g sum_{i < m} g^i/i!  (the regularized upper incomplete gamma Q(m, g)),
// summed downward from the largest index; used only when g >= m - 1 so the
// terms shrink in the summation direction.
double upper_tail_sum(double g, int m) {
    double term = poisson_term(g, m - 1);
    double sum = 0.0;
    for (int i = m - 1; i >= 0 && term > 0.0; --i) {
        sum += term;
        term *= i / g;
    }
    return sum;
}

// e^-g sum_{i >= m} g^i/i! * weight(i); converges geometrically for g < m+1.
template <class Weight>
double lower_series(double g, int m, Weight weight) {
    double term = poisson_term(g, m);
    double sum = 0.0;
    for (int i = m; term > 0.0; ++i) {
        const double contrib = term * weight(i);
        sum += contrib;
        if (contrib <= 1e-17 * sum) break;
        term *= g / (i + 1);
    }
    return sum;
}

}  // namespace

double gain_pdf(double g, int n) {
    if (n < 1) throw std::invalid_argument("gain_pdf: n must be >= 1");
    if (!(g >= 0.0)) throw std::invalid_argument("gain_pdf: g must be >= 0");
    if (g == 0.0) return n == 1 ? 1.0 : 0.0;
    if (std::isinf(g)) return 0.0;
    return std::exp((n - 1) * std::log(g) - g - std::lgamma(static_cast<double>(n)));
}

double gain_cdf(double g, int n) {
    if (n < 1) throw std::invalid_argument("gain_cdf: n must be >= 1");
    if (!(g >= 0.0)) throw std::invalid_argument("gain_cdf: g must be >= 0");
    if (g == 0.0) return 0.0;
    if (std::isinf(g)) return 1.0;
    if (g < n) return lower_series(g, n, [](int) { return 1.0; });
    return 1.0 - upper_tail_sum(g, n);
}

double drop_bound_F(double g_th, int n) {
    if (n < 2) throw std::invalid_argument("drop_bound_F: n must be >= 2");
    if (!(g_th > 0.0)) throw std::invalid_argument("drop_bound_F: g_th must be > 0");
    if (std::isinf(g_th)) return 1.0;
    const int m = n - 1;
    const double G = g_th;
    if (G < m) return lower_series(G, m, [m](int i) { return static_cast<double>(i + 1 - m) / (i + 1); });
    const double cdf_m = 1.0 - upper_tail_sum(G, m);
    return (1.0 - m / G) * cdf_m + poisson_term(G, m - 1);
}

double drop_prob_B(double g_th, double gamma, int n) {
    if (n < 2) throw std::invalid_argument("drop_prob_B: n must be >= 2");
    if (!(g_th > 0.0)) throw std::invalid_argument("drop_prob_B: g_th must be > 0");
    if (!(gamma > 0.0)) throw std::invalid_argument("drop_prob_B: gamma must be > 0");
    const double log_full = std::log1p(gamma);
    auto integrand = [&](double g) {
        const double shortfall = 1.0 - std::log1p(g * gamma / g_th) / log_full;
        return shortfall * gain_pdf(g, n);
    };
    return quad::integrate(integrand, 0.0, g_th, 1e-13).value;
}

GainThreshold solve_gain_threshold(int n, double eps_target) {
    if (n < 2) throw std::invalid_argument("solve_gain_threshold: n must be >= 2");
    if (!(eps_target > 0.0 && eps_target < 1.0))
        throw std::invalid_argument("solve_gain_threshold: eps_target must lie in (0, 1)");

    double hi = 1.0;
    while (drop_bound_F(hi, n) < eps_target) hi *= 2.0;
    double lo = hi / 2.0;
    while (lo > 1e-300 && drop_bound_F(lo, n) >= eps_target) lo /= 2.0;

    // F spans many decades at small G, so bisect geometrically.
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        const double f = drop_bound_F(mid, n);
        if (f == eps_target) {
            lo = hi = mid;
            break;
        }
        (f < eps_target ? lo : hi) = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    return {lo, n, eps_target};
}

double mean_tx_power(double bandwidth, double gamma, double alpha, int n, double eps_target,
                     const SystemConfig& cfg) {
    if (n < 2) throw std::invalid_argument("mean_tx_power: n must be >= 2");
    if (!(bandwidth > 0.0 && gamma >= 0.0 && alpha > 0.0))
        throw std::invalid_argument("mean_tx_power: arguments must be positive");
    return cfg.noise_psd * bandwidth * gamma * (1.0 - eps_target) / (alpha * (n - 1));
}

}  // namespace urllc

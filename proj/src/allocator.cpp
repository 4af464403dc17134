#include "urllc/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "urllc/fading.hpp"
#include "urllc/traffic.hpp"

namespace urllc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double exponent(double W, const YFunction& f) { return f.l / W + f.v / std::sqrt(W); }

void check_exponent(double x, double W) {
    if (!(x <= kMaxExponent))
        throw InfeasibleError(BindingConstraint::Bandwidth,
                              fmt::format("bandwidth {:.6g} Hz is too small to meet the QoS target", W));
}

// c = l/W + v/(2 sqrt W); y' = (1 - c) e^x - 1 = (1 - c) expm1(x) - c.
double y_prime_unchecked(double W, const YFunction& f) {
    const double x = exponent(W, f);
    const double c = f.l / W + 0.5 * f.v / std::sqrt(W);
    if (x > kMaxExponent) return c >= 1.0 ? -kInf : kInf;
    return (1.0 - c) * std::expm1(x) - c;
}

double geometric_mid(double lo, double hi) { return lo > 0.0 ? std::sqrt(lo) * std::sqrt(hi) : 0.5 * (lo + hi); }

// Root of y'(W)/alpha = -nu on (0, upper] where y' is increasing.
double bandwidth_at_multiplier(const YFunction& f, double nu, double upper, double scale_hint) {
    const double target = -nu * f.alpha;
    double hi = upper;
    if (std::isinf(hi)) {
        hi = std::max(scale_hint, f.l);
        while (y_prime_unchecked(hi, f) <= target) hi *= 2.0;
    }
    double lo = std::min(hi, scale_hint) * 0.5;
    while (y_prime_unchecked(lo, f) >= target) lo *= 0.5;
    for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = geometric_mid(lo, hi);
        (y_prime_unchecked(mid, f) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double y_value(double W, const YFunction& f) {
    if (!(W > 0.0)) throw std::invalid_argument("y_value: bandwidth must be > 0");
    if (std::isinf(W)) return f.l;
    const double x = exponent(W, f);
    check_exponent(x, W);
    return W * std::expm1(x);
}

YDerivatives y_derivatives(double W, const YFunction& f) {
    if (!(W > 0.0)) throw std::invalid_argument("y_derivatives: bandwidth must be > 0");
    const double x = exponent(W, f);
    check_exponent(x, W);
    YDerivatives d;
    d.first = y_prime_unchecked(W, f);
    d.second = inflection_polynomial(W, f) * std::exp(x) / (4.0 * W * W * W);
    return d;
}

double inflection_polynomial(double W, const YFunction& f) {
    const double s = std::sqrt(W);
    return -f.v * W * s + f.v * f.v * W + 4.0 * f.l * f.v * s + 4.0 * f.l * f.l;
}

double find_bandwidth_minimizer(const YFunction& f) {
    if (!(f.l > 0.0) || !(f.v >= 0.0))
        throw std::invalid_argument("find_bandwidth_minimizer: need l > 0 and v >= 0");
    if (f.v == 0.0) return kInf;

    // y'(l) < 0 because 1 - l/W - v/(2 sqrt W) <= -v/(2 sqrt W) there.
    double lo = f.l;
    double hi = 2.0 * f.l;
    while (y_prime_unchecked(hi, f) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (std::isinf(hi))
            throw InfeasibleError(BindingConstraint::Bandwidth, "find_bandwidth_minimizer: no sign change of y'");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (y_prime_unchecked(mid, f) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

SignStructure sign_structure_witness(const YFunction& f) {
    if (!(f.v > 0.0)) throw std::invalid_argument("sign_structure_witness: v must be > 0");
    // With t = sqrt(W): x'(t) = v (-3 t^2 + 2 v t + 4 l).
    const double t1 = (f.v + std::sqrt(f.v * f.v + 12.0 * f.l)) / 3.0;
    SignStructure s;
    s.argmax_x = t1 * t1;
    double lo = t1;
    double hi = 2.0 * t1;
    while (inflection_polynomial(hi * hi, f) > 0.0) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (inflection_polynomial(mid * mid, f) > 0.0 ? lo : hi) = mid;
    }
    const double t0 = 0.5 * (lo + hi);
    s.root_x = t0 * t0;
    return s;
}

BandwidthSolution allocate_bandwidth(std::span<const YFunction> users, double total_bandwidth) {
    if (users.empty()) throw std::invalid_argument("allocate_bandwidth: no users");
    if (!(total_bandwidth > 0.0)) throw std::invalid_argument("allocate_bandwidth: W_max must be > 0");
    const std::size_t K = users.size();

    BandwidthSolution sol;
    sol.minimizer.resize(K);
    for (std::size_t k = 0; k < K; ++k) sol.minimizer[k] = find_bandwidth_minimizer(users[k]);

    const double demand = std::accumulate(sol.minimizer.begin(), sol.minimizer.end(), 0.0);
    if (demand <= total_bandwidth) {
        sol.case_tag = BandwidthCase::SufficientBandwidth;
        sol.bandwidth = sol.minimizer;
        for (std::size_t k = 0; k < K; ++k) sol.objective += y_value(sol.bandwidth[k], users[k]) / users[k].alpha;
        return sol;
    }

    sol.case_tag = BandwidthCase::BandwidthLimited;
    const double equal_share = total_bandwidth / static_cast<double>(K);
    for (std::size_t k = 0; k < K; ++k) {
        if (exponent(std::min(equal_share, sol.minimizer[k]), users[k]) > kMaxExponent)
            throw InfeasibleError(BindingConstraint::Bandwidth,
                                  fmt::format("W_max = {:.6g} Hz cannot carry {} users at the QoS target",
                                              total_bandwidth, K));
    }

    auto allocation_at = [&](double nu, std::vector<double>& W) {
        double sum = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            W[k] = bandwidth_at_multiplier(users[k], nu, sol.minimizer[k], equal_share);
            sum += W[k];
        }
        return sum;
    };

    std::vector<double> W(K);
    // At nu = max_k -y_k'(share_k)/alpha_k no user exceeds the equal share.
    double nu_hi = 0.0;
    for (std::size_t k = 0; k < K; ++k)
        nu_hi = std::max(nu_hi, -y_prime_unchecked(std::min(equal_share, sol.minimizer[k]), users[k]) / users[k].alpha);
    if (!std::isfinite(nu_hi))
        throw InfeasibleError(BindingConstraint::Bandwidth,
                              fmt::format("W_max = {:.6g} Hz cannot carry {} users at the QoS target", total_bandwidth, K));
    while (allocation_at(nu_hi, W) > total_bandwidth) nu_hi *= 2.0;
    double nu_lo = nu_hi;
    while (allocation_at(nu_lo, W) < total_bandwidth) nu_lo *= 0.5;

    for (int it = 0; it < 400 && nu_hi - nu_lo > 1e-15 * nu_hi; ++it) {
        const double mid = std::sqrt(nu_lo) * std::sqrt(nu_hi);
        (allocation_at(mid, W) > total_bandwidth ? nu_lo : nu_hi) = mid;
    }
    const double nu = 0.5 * (nu_lo + nu_hi);
    const double sum = allocation_at(nu, W);

    sol.bandwidth = W;
    sol.kkt_multiplier = nu;
    sol.primal_residual = std::abs(sum - total_bandwidth) / total_bandwidth;
    for (std::size_t k = 0; k < K; ++k) {
        const auto& f = users[k];
        sol.objective += y_value(W[k], f) / f.alpha;
        const double grad = y_derivatives(W[k], f).first / f.alpha;
        sol.stationarity_residual = std::max(sol.stationarity_residual, std::abs(grad + nu) / nu);
    }
    return sol;
}

int optimal_antennas(double weighted_y, double eps_h, const SystemConfig& cfg) {
    if (!(weighted_y >= 0.0)) throw std::invalid_argument("optimal_antennas: weighted_y must be >= 0");
    const double ratio =
        4.0 * cfg.noise_psd * (1.0 - eps_h) * weighted_y / (cfg.amplifier_efficiency * cfg.circuit_power_per_antenna);
    int n = std::max(2, static_cast<int>(std::ceil(0.5 * (1.0 + std::sqrt(1.0 + ratio)))));
    // The ceiling is the smallest n with 4 n (n - 1) >= ratio; undo a
    // rounding overshoot at exact ties.
    if (n > 2 && 4.0 * (n - 1.0) * (n - 2.0) >= ratio) --n;
    return n;
}

double mean_total_power(double weighted_y, int antennas, double eps_h, const SystemConfig& cfg) {
    if (antennas < 2) throw std::invalid_argument("mean_total_power: antennas must be >= 2");
    return cfg.noise_psd * weighted_y * (1.0 - eps_h) / (cfg.amplifier_efficiency * (antennas - 1)) +
           cfg.circuit_power_per_antenna * antennas + cfg.fixed_circuit_power;
}

PowerThresholds power_thresholds(const BandwidthSolution& sol, std::span<const YFunction> users, int antennas,
                                 double eps_h, const SystemConfig& cfg) {
    PowerThresholds out;
    out.gain_threshold = solve_gain_threshold(antennas, eps_h).g_th;
    out.power_cap.resize(users.size());
    for (std::size_t k = 0; k < users.size(); ++k) {
        const double y = y_value(sol.bandwidth[k], users[k]);  // W_k * gamma_k
        out.power_cap[k] = cfg.noise_psd * y / (users[k].alpha * out.gain_threshold);
        out.total += out.power_cap[k];
    }
    return out;
}

std::vector<YFunction> build_y_functions(const SystemConfig& cfg, const QosBudget& qos,
                                         std::span<const UserProfile> users) {
    std::vector<YFunction> out;
    out.reserve(users.size());
    for (const auto& u : users) {
        const auto c = snr_coeffs(qos.eps_c, qos.eps_q, u.arrival_rate, cfg, qos);
        out.push_back({c.l, c.v, u.large_scale_gain});
    }
    return out;
}

double delivered_bit_rate(const SystemConfig& cfg, std::span<const UserProfile> users) {
    double packets_per_frame = 0.0;
    for (const auto& u : users) packets_per_frame += u.arrival_rate;
    return (1.0 - cfg.loss_budget) * cfg.packet_bits * packets_per_frame / cfg.frame_duration;
}

Allocation solve_allocation(const SystemConfig& cfg, const std::vector<UserProfile>& users,
                            std::optional<int> fixed_antennas) {
    const QosBudget qos = validate_config(cfg, users);
    const auto ys = build_y_functions(cfg, qos, users);
    const auto bw = allocate_bandwidth(ys, cfg.total_bandwidth);

    Allocation a;
    a.qos = qos;
    a.bandwidth_case = bw.case_tag;
    a.kkt_multiplier = bw.kkt_multiplier;
    a.weighted_y = bw.objective;
    a.antennas_unconstrained = optimal_antennas(bw.objective, qos.eps_h, cfg);

    int n = fixed_antennas.value_or(std::min(a.antennas_unconstrained, cfg.antenna_cap));
    if (n < 2) throw std::invalid_argument("solve_allocation: antennas must be >= 2");
    auto caps = power_thresholds(bw, ys, n, qos.eps_h, cfg);
    while (caps.total > cfg.max_bs_power) {
        if (fixed_antennas || n >= cfg.antenna_cap)
            throw InfeasibleError(BindingConstraint::Power,
                                  fmt::format("sum of power caps {:.6g} W exceeds P_max = {:.6g} W at N_t = {}",
                                              caps.total, cfg.max_bs_power, n));
        ++n;
        caps = power_thresholds(bw, ys, n, qos.eps_h, cfg);
    }
    a.antennas = n;

    a.users.resize(users.size());
    for (std::size_t k = 0; k < users.size(); ++k) {
        auto& ua = a.users[k];
        ua.bandwidth = bw.bandwidth[k];
        ua.snr_target = required_snr(ua.bandwidth, {ys[k].l, ys[k].v});
        ua.gain_threshold = caps.gain_threshold;
        ua.power_cap = caps.power_cap[k];
        ua.mean_tx_power = mean_tx_power(ua.bandwidth, ua.snr_target, ys[k].alpha, n, qos.eps_h, cfg);
        ua.effective_bandwidth = effective_bandwidth(users[k].arrival_rate, qos.eps_q, qos.queue_delay_frames).value;
    }
    a.mean_total_power = mean_total_power(bw.objective, n, qos.eps_h, cfg);
    a.energy_efficiency = delivered_bit_rate(cfg, users) / a.mean_total_power;
    return a;
}

nlohmann::json to_json(const Allocation& a) {
    nlohmann::json users = nlohmann::json::array();
    for (const auto& u : a.users) {
        users.push_back({{"bandwidth", u.bandwidth},
                         {"snr_target", u.snr_target},
                         {"gain_threshold", u.gain_threshold},
                         {"power_cap", u.power_cap},
                         {"mean_tx_power", u.mean_tx_power},
                         {"effective_bandwidth", u.effective_bandwidth}});
    }
    return {{"users", users},
            {"antennas", a.antennas},
            {"antennas_unconstrained", a.antennas_unconstrained},
            {"mean_total_power", a.mean_total_power},
            {"energy_efficiency", a.energy_efficiency},
            {"bandwidth_case", to_string(a.bandwidth_case)},
            {"weighted_y", a.weighted_y},
            {"kkt_multiplier", a.kkt_multiplier},
            {"qos",
             {{"queue_delay_frames", a.qos.queue_delay_frames},
              {"eps_c", a.qos.eps_c},
              {"eps_q", a.qos.eps_q},
              {"eps_h", a.qos.eps_h}}}};
}

}  // namespace urllc

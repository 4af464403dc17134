#pragma once

// Joint bandwidth / power-threshold / antenna-count optimization.
//
// The per-user kernel is y(W) = W * gamma(W) with
// gamma(W) = exp(l/W + v/sqrt(W)) - 1. y first decreases then increases in
// W, and is strictly convex left of its minimizer W^th, so the bandwidth
// problem  min sum_k y_k(W_k)/alpha_k  s.t. sum_k W_k <= W_max  is either
// solved by {W_k^th} outright or reduces to a convex program on the
// simplex, solved here by bisection on the equality multiplier.

#include <limits>
#include <span>
#include <vector>

#include "json.hpp"

#include "urllc/core_model.hpp"
#include "urllc/rate_model.hpp"

namespace urllc {

struct YFunction {
    double l = 0.0;
    double v = 0.0;
    double alpha = 1.0;
};

/// Exponents above this are reported as bandwidth-infeasible.
inline constexpr double kMaxExponent = 700.0;

struct YDerivatives {
    double first = 0.0;
    double second = 0.0;
};

double y_value(double bandwidth, const YFunction& f);
YDerivatives y_derivatives(double bandwidth, const YFunction& f);

/// Unique minimizer W^th of y. Returns +infinity when v == 0 (y decreases
/// monotonically towards its asymptote l).
double find_bandwidth_minimizer(const YFunction& f);

struct SignStructure {
    double argmax_x = 0.0;  // W^(1): maximizer of x(W)
    double root_x = 0.0;    // W^(0): where y'' changes sign
};

/// x(W) = -v W^1.5 + v^2 W + 4 l v sqrt(W) + 4 l^2 carries the sign of y''.
double inflection_polynomial(double bandwidth, const YFunction& f);
SignStructure sign_structure_witness(const YFunction& f);

struct BandwidthSolution {
    std::vector<double> bandwidth;  // W_k [Hz]
    std::vector<double> minimizer;  // W_k^th [Hz]
    BandwidthCase case_tag = BandwidthCase::SufficientBandwidth;
    double objective = 0.0;       // sum_k y_k(W_k)/alpha_k [Hz]
    double kkt_multiplier = 0.0;  // nu, 0 in the bandwidth-rich case
    double primal_residual = 0.0;        // |sum W - W_max| / W_max (bandwidth-limited)
    double stationarity_residual = 0.0;  // max_k |y_k'/alpha_k + nu| / nu (bandwidth-limited)
};

BandwidthSolution allocate_bandwidth(std::span<const YFunction> users, double total_bandwidth);

/// Closed-form integer minimizer of E{P_tot}(N_t), clamped to N_t >= 2.
int optimal_antennas(double weighted_y, double eps_h, const SystemConfig& cfg);

/// E{P_tot} for a fixed antenna count.
double mean_total_power(double weighted_y, int antennas, double eps_h, const SystemConfig& cfg);

struct PowerThresholds {
    double gain_threshold = 0.0;
    std::vector<double> power_cap;
    double total = 0.0;
};

PowerThresholds power_thresholds(const BandwidthSolution& sol, std::span<const YFunction> users, int antennas,
                                 double eps_h, const SystemConfig& cfg);

/// Per-user kernels for a validated scenario.
std::vector<YFunction> build_y_functions(const SystemConfig& cfg, const QosBudget& qos,
                                         std::span<const UserProfile> users);

/// Bits per second offered by all users, net of the loss budget.
double delivered_bit_rate(const SystemConfig& cfg, std::span<const UserProfile> users);

/// Full pipeline. With `fixed_antennas` set, the antenna count is held
/// instead of optimized (throws InfeasibleError if its power caps exceed
/// the budget).
Allocation solve_allocation(const SystemConfig& cfg, const std::vector<UserProfile>& users,
                            std::optional<int> fixed_antennas = std::nullopt);

nlohmann::json to_json(const Allocation& a);

}  // namespace urllc

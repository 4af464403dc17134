#pragma once

// Configuration and result types shared by every stage of the solver.
//
// Unit conventions: time is counted in FRAMES wherever a queue is involved
// (arrival rates and service rates in packets/frame, the queueing budget in
// frames). Everything else is SI with linear power (W), bandwidth (Hz) and
// noise density (W/Hz). dB quantities only exist at ingestion.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace urllc {

struct SystemConfig {
    double frame_duration = 1e-4;              // T_f [s]
    double dl_fraction = 5e-5;                 // DL transmission time per frame [s]
    double e2e_delay = 1e-3;                   // D_max [s]
    double backhaul_delay = 1e-4;              // [s]
    double noise_psd = 5.011872336272714e-21;  // N_0 [W/Hz] (-173 dBm/Hz)
    double total_bandwidth = 20e6;             // W_max [Hz]
    double max_bs_power = 10.0;                // P_max^t [W] (40 dBm)
    double circuit_power_per_antenna = 0.05;   // P^ca [W]
    double fixed_circuit_power = 0.05;         // P_0^c [W]
    double amplifier_efficiency = 0.5;         // rho
    double packet_bits = 160.0;                // u [bits]
    double loss_budget = 3e-7;                 // eps_D

    // Loss split overrides. Unset components default to loss_budget / 3.
    std::optional<double> eps_c;
    std::optional<double> eps_q;
    std::optional<double> eps_h;

    int antenna_cap = 512;
};

/// Queueing-delay budget in frames and the three packet-loss components.
struct QosBudget {
    int queue_delay_frames = 0;
    double eps_c = 0.0;
    double eps_q = 0.0;
    double eps_h = 0.0;
};

struct UserProfile {
    double large_scale_gain = 0.0;  // alpha_k, linear attenuation in (0,1)
    double arrival_rate = 0.0;      // lambda_k [packets/frame], aggregated over node_count nodes
    int node_count = 1;
    std::optional<double> distance;  // [m], when the gain came from the path-loss model
};

struct UserAllocation {
    double bandwidth = 0.0;      // W_k [Hz]
    double snr_target = 0.0;     // gamma_k
    double gain_threshold = 0.0; // g_k^th
    double power_cap = 0.0;      // P_k^th [W]
    double mean_tx_power = 0.0;  // E{P_k^t} [W]
    double effective_bandwidth = 0.0;  // E_k^B [packets/frame]
};

enum class BandwidthCase { SufficientBandwidth, BandwidthLimited };

struct Allocation {
    std::vector<UserAllocation> users;
    int antennas = 0;                // N_t after the power-cap loop
    int antennas_unconstrained = 0;  // closed-form N_t* before the power-cap loop
    double mean_total_power = 0.0;   // E{P_tot} [W]
    double energy_efficiency = 0.0;  // [bits/J]
    BandwidthCase bandwidth_case = BandwidthCase::SufficientBandwidth;
    double weighted_y = 0.0;         // sum_k y_k(W_k)/alpha_k [Hz]
    double kkt_multiplier = 0.0;
    QosBudget qos;
};

/// Invalid configuration. Carries one diagnostic per violated invariant.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> diagnostics);
    const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<std::string> diagnostics_;
};

enum class BindingConstraint { Bandwidth, Power };

/// The QoS targets cannot be met with the available resources.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(BindingConstraint constraint, const std::string& what);
    BindingConstraint constraint() const noexcept { return constraint_; }

private:
    BindingConstraint constraint_;
};

const char* to_string(BindingConstraint c);
const char* to_string(BandwidthCase c);

// Unit conversions.
double db_to_linear(double db);
double linear_to_db(double linear);
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double seconds_to_frames(double seconds, const SystemConfig& cfg);
double frames_to_seconds(double frames, const SystemConfig& cfg);

/// Large-scale attenuation from the 35.3 + 37.6 lg(d) path-loss law.
double path_loss_gain(double distance_m);

/// Builds a user at `distance_m` with `nodes` contributing nodes, each
/// emitting `per_node_rate` packets per second.
UserProfile make_user(double distance_m, int nodes, double per_node_rate, const SystemConfig& cfg);

/// Checks every invariant and resolves the QoS budget. Throws ConfigError
/// listing all violations at once.
QosBudget validate_config(const SystemConfig& cfg, const std::vector<UserProfile>& users);

struct ScenarioFile {
    SystemConfig config;
    std::vector<UserProfile> users;
};

/// Parses the flat `key = value` format documented in the README.
ScenarioFile parse_scenario(const std::string& text);
ScenarioFile load_scenario(const std::filesystem::path& path);

}  // namespace urllc

#pragma once

// Frame-level Monte-Carlo validation of an allocation: block Rayleigh
// fading (one Gamma(N_t, 1) gain per user per frame), Poisson arrivals,
// truncated channel inversion and proactive dropping in deep fades.
//
// Frames are split across independent streams. Every random draw is keyed by
// (seed, stream, frame, user), so a report depends only on
// (policy, frames, seed, streams) and never on the thread count.

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "json.hpp"

#include "urllc/core_model.hpp"
#include "urllc/philox.hpp"

namespace urllc {

struct UserPolicy {
    double bandwidth = 0.0;
    double gamma = 0.0;
    double gain_threshold = 0.0;
    double power_cap = 0.0;
    double service_rate_nominal = 0.0;  // E^B [packets/frame]
    double alpha = 0.0;
    double arrival_rate = 0.0;  // [packets/frame]
    double eps_c = 0.0;
};

struct SimPolicy {
    std::vector<UserPolicy> users;
    int antennas = 2;
    int delay_frames = 1;
};

SimPolicy make_policy(const Allocation& a, const std::vector<UserProfile>& users);

/// Gamma(n, 1) draw as a sum of n unit exponentials.
double draw_channel_gain(CellRng& rng, int n);

/// Poisson draw: inversion for small means, PTRS rejection above 30.
std::uint64_t draw_poisson(CellRng& rng, double mean);

struct Packet {
    std::uint64_t arrival_frame = 0;
    double remaining = 1.0;
};

struct QueueTally {
    double arrivals = 0.0;
    double served = 0.0;
    double dropped = 0.0;
    std::uint64_t drop_events = 0;
    std::uint64_t deep_fade_frames = 0;
    std::uint64_t completed_packets = 0;
    std::uint64_t delay_violations = 0;
    std::uint64_t overflow_frames = 0;  // Q > E^B * D after service
    double tx_power_sum = 0.0;
    std::uint64_t frames = 0;
};

struct UserQueue {
    std::deque<Packet> packets;
    double content = 0.0;  // Q(n), fluid
    QueueTally tally;
};

struct FrameRecord {
    std::uint64_t frame = 0;
    double gain = 0.0;
    double power = 0.0;
    std::uint64_t arrivals = 0;
    double service = 0.0;
    double drop = 0.0;
    double queue_after = 0.0;
};

/// Advances one user's queue by one frame given its channel gain `g`.
/// Arrivals are drawn from `rng`.
FrameRecord step_queue(UserQueue& q, double g, const UserPolicy& policy, int delay_frames, std::uint64_t frame,
                       CellRng& rng, const SystemConfig& cfg);

struct UserSimStats {
    double arrival_count = 0.0;
    double served_count = 0.0;
    double drop_count = 0.0;
    double final_queue = 0.0;
    std::uint64_t drop_events = 0;
    std::uint64_t deep_fade_frames = 0;
    std::uint64_t completed_packets = 0;
    std::uint64_t delay_violations = 0;
    double achieved_eps_h = 0.0;
    double empirical_mean_tx_power = 0.0;
    double empirical_delay_violation = 0.0;  // per completed packet
    double empirical_queue_overflow = 0.0;   // per frame
    double deep_fade_fraction = 0.0;
};

struct SimReport {
    std::uint64_t frames_run = 0;
    double achieved_eps_h = 0.0;
    double empirical_mean_tx_power = 0.0;  // summed over users [W]
    double empirical_delay_violation = 0.0;
    double empirical_queue_overflow = 0.0;
    double arrival_count = 0.0;
    double drop_count = 0.0;
    double served_count = 0.0;
    double final_queue = 0.0;
    std::uint64_t drop_events = 0;
    std::uint64_t rng_seed = 0;
    std::uint32_t stream_count = 0;
    std::vector<UserSimStats> users;
};

struct SimOptions {
    std::uint64_t frames = 0;
    std::uint64_t seed = 1;
    std::uint32_t streams = 1;
    /// Per-frame CSV trace (frame,g,P,a,s,d,Q) of one user in stream 0.
    std::ostream* trace = nullptr;
    std::size_t trace_user = 0;
};

/// OpenMP-parallel over streams.
SimReport run_simulation(const SimPolicy& policy, const SystemConfig& cfg, const SimOptions& opts);

/// Single-threaded reference; bit-identical to run_simulation.
SimReport run_simulation_serial(const SimPolicy& policy, const SystemConfig& cfg, const SimOptions& opts);

nlohmann::json to_json(const SimReport& r);

}  // namespace urllc
